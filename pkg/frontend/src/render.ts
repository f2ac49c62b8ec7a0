/**
 * DOM rendering of the layout scenes. Nothing here computes a number:
 * positions, sizes, angles and fills all arrive ready-made from the
 * layout modules, so this file is only d3 plumbing.
 */

import { arc, select, type Selection } from 'd3';

import type { CompositeDescriptor } from './api';
import { asterLayout, type AsterSlice } from './layout/aster';
import type { HistogramScene } from './layout/histogram';
import type { TreeScene } from './layout/tree';
import { categoryColor } from './palette';

type SvgSel = Selection<SVGSVGElement, unknown, null, undefined>;

const RADIANS = Math.PI / 180;

export interface TreeHandlers {
  onHover(nodeId: number, event: MouseEvent): void;
  onLeave(): void;
  onClick(nodeId: number): void;
}

export function renderTree(
  svgElement: SVGSVGElement,
  scene: TreeScene,
  handlers: TreeHandlers,
): void {
  const svg: SvgSel = select(svgElement);
  svg.selectAll('*').remove();

  if (scene.placeholder !== null) {
    svg
      .append('text')
      .attr('class', 'placeholder')
      .attr('x', '50%')
      .attr('y', '50%')
      .attr('text-anchor', 'middle')
      .text(scene.placeholder);
    return;
  }

  svg
    .append('g')
    .attr('class', 'transitions')
    .selectAll('rect')
    .data(scene.transitions)
    .join('rect')
    .attr('x', (t) => Math.min(t.x0, t.x1))
    .attr('y', (t) => t.y)
    .attr('width', (t) => Math.max(1, Math.abs(t.x1 - t.x0)))
    .attr('height', (t) => Math.max(0, t.height))
    .attr('fill', (t) => t.fill)
    .attr('opacity', 0.85);

  svg
    .append('g')
    .attr('class', 'bars')
    .selectAll('rect')
    .data(scene.bars)
    .join('rect')
    .attr('x', (b) => b.x)
    .attr('y', (b) => b.y)
    .attr('width', (b) => b.width)
    .attr('height', (b) => Math.max(0.5, b.height))
    .attr('fill', (b) => b.fill)
    .attr('stroke', '#444')
    .attr('stroke-width', 0.5)
    .style('cursor', 'pointer')
    .on('mousemove', (event: MouseEvent, b) => handlers.onHover(b.nodeId, event))
    .on('mouseleave', () => handlers.onLeave())
    .on('click', (_event, b) => handlers.onClick(b.nodeId));
}

export function renderAster(
  container: HTMLElement,
  descriptor: CompositeDescriptor,
  radius: number,
  onToggleDetail: (slice: AsterSlice) => void,
): void {
  const slices = asterLayout(descriptor, radius);
  const host = select(container);
  host.selectAll('*').remove();

  host
    .append('h4')
    .style('color', categoryColor(descriptor.composite_id))
    .text(`composite ${descriptor.composite_id}`);

  const size = 2 * radius + 8;
  const svg = host
    .append('svg')
    .attr('width', size)
    .attr('height', size)
    .append('g')
    .attr('transform', `translate(${size / 2},${size / 2})`);

  const shape = arc<AsterSlice>()
    .innerRadius(0)
    .outerRadius((s) => s.outerRadius)
    .startAngle((s) => s.startAngle * RADIANS)
    .endAngle((s) => s.endAngle * RADIANS);

  svg
    .selectAll('path')
    .data(slices)
    .join('path')
    .attr('d', shape)
    .attr('fill', (s) => s.fill)
    .attr('stroke', '#fff')
    .attr('stroke-width', 0.5)
    .style('cursor', (s) => (s.detail !== null ? 'pointer' : 'default'))
    .on('click', (_event, s) => {
      if (s.detail !== null) onToggleDetail(s);
    })
    .append('title')
    .text((s) => s.label);

  svg
    .append('circle')
    .attr('r', radius)
    .attr('fill', 'none')
    .attr('stroke', '#ddd');

  host
    .append('div')
    .attr('class', 'aster-caption')
    .text(`${descriptor.segment_count} segments`);
}

export function renderLegend(
  listElement: HTMLElement,
  types: number[],
): void {
  const host = select(listElement);
  host.selectAll('*').remove();
  host
    .selectAll('li')
    .data(types)
    .join('li')
    .html(
      (t) =>
        `<span class="swatch" style="background:${categoryColor(t)}"></span>` +
        `event type ${t}`,
    );
}

export function renderHistogram(
  svgElement: SVGSVGElement,
  scene: HistogramScene,
): void {
  const svg: SvgSel = select(svgElement);
  svg.selectAll('*').remove();
  svg
    .append('g')
    .selectAll('rect')
    .data(scene.bars)
    .join('rect')
    .attr('x', (b) => b.x)
    .attr('y', (b) => b.y)
    .attr('width', (b) => Math.max(0, b.width - 0.5))
    .attr('height', (b) => b.height)
    .attr('fill', (b) => b.fill)
    .attr('opacity', 0.55);
}

export function renderTooltip(
  tooltipElement: HTMLElement,
  rows: Array<[string, string]>,
  position: { x: number; y: number } | null,
): void {
  const host = select(tooltipElement);
  if (position === null) {
    host.style('display', 'none');
    return;
  }
  host
    .style('display', 'block')
    .style('left', `${position.x + 12}px`)
    .style('top', `${position.y + 12}px`);
  host.selectAll('*').remove();
  const table = host.append('table');
  for (const [label, value] of rows) {
    const tr = table.append('tr');
    tr.append('th').text(label);
    tr.append('td').text(value);
  }
}
