/**
 * Icicle-style layout for the probabilistic event tree.
 *
 * The x-axis is time: each bar sits at its node's average offset from
 * the sequence start. The y-axis is percentage of all sequences: a
 * node's bar height is count / total of the full plot height, so the
 * root always spans the whole extent and each child occupies a slice
 * of its parent's band. Transitions are ribbons from the parent bar to
 * the child bar, filled with a grayscale encoding of the child's
 * positive share (white = 0%, black = 100%).
 */

import { scaleLinear } from 'd3';

import type { TreePayload } from '../api';
import { NEUTRAL_BAR_COLOR, categoryColor, transitionGray } from '../palette';

export interface ZoomTransform {
  kx: number;
  ky: number;
  tx: number;
  ty: number;
}

export const IDENTITY_ZOOM: ZoomTransform = { kx: 1, ky: 1, tx: 0, ty: 0 };

export interface TreeLayoutOptions {
  width: number;
  height: number;
  barWidth?: number;
  margin?: { top: number; right: number; bottom: number; left: number };
  zoom?: ZoomTransform;
}

export interface NodeBar {
  nodeId: number;
  eventType: number | null;
  x: number;
  y: number;
  width: number;
  height: number;
  fill: string;
}

export interface TransitionRibbon {
  parentId: number;
  childId: number;
  /** Right edge of the parent bar. */
  x0: number;
  /** Left edge of the child bar. */
  x1: number;
  y: number;
  height: number;
  fill: string;
}

export interface TreeScene {
  bars: NodeBar[];
  transitions: TransitionRibbon[];
  /** Message shown instead of a chart when there is nothing to draw. */
  placeholder: string | null;
  xDomain: [number, number];
}

const DEFAULT_BAR_WIDTH = 14;
const DEFAULT_MARGIN = { top: 10, right: 20, bottom: 24, left: 40 };

export function layoutTree(
  tree: TreePayload,
  options: TreeLayoutOptions,
): TreeScene {
  const { width, height } = options;
  const barWidth = options.barWidth ?? DEFAULT_BAR_WIDTH;
  const margin = options.margin ?? DEFAULT_MARGIN;
  const zoom = options.zoom ?? IDENTITY_ZOOM;

  if (tree.total_sequences === 0 || tree.nodes.length === 0) {
    return {
      bars: [],
      transitions: [],
      placeholder: 'No sequences to display',
      xDomain: [0, 1],
    };
  }

  const plotHeight = height - margin.top - margin.bottom;
  const total = tree.total_sequences;
  const maxOffset = Math.max(...tree.nodes.map((n) => n.avg_ts_offset), 0);
  const xDomain: [number, number] = [0, maxOffset > 0 ? maxOffset : 1];
  const x = scaleLinear()
    .domain(xDomain)
    .range([margin.left, width - margin.right - barWidth]);

  const zx = (v: number) => v * zoom.kx + zoom.tx;
  const zy = (v: number) => v * zoom.ky + zoom.ty;

  const bars: NodeBar[] = [];
  const transitions: TransitionRibbon[] = [];

  // Depth-first walk carrying each node's y band; children divide the
  // band in order and the terminated remainder stays unoccupied.
  const stack: Array<{ nodeId: number; top: number }> = [
    { nodeId: tree.root, top: margin.top },
  ];
  while (stack.length > 0) {
    const { nodeId, top } = stack.pop()!;
    const node = tree.nodes[nodeId]!;
    const barHeight = (node.count / total) * plotHeight;
    const barX = x(node.avg_ts_offset);
    bars.push({
      nodeId,
      eventType: node.event_type,
      x: zx(barX),
      y: zy(top),
      width: barWidth,
      height: barHeight * zoom.ky,
      fill:
        tree.method === 'sa' && node.event_type !== null
          ? categoryColor(node.event_type)
          : NEUTRAL_BAR_COLOR,
    });

    let childTop = top;
    const placed: Array<{ nodeId: number; top: number }> = [];
    for (const childId of node.children) {
      const child = tree.nodes[childId]!;
      const childHeight = (child.count / total) * plotHeight;
      transitions.push({
        parentId: nodeId,
        childId,
        x0: zx(barX + barWidth),
        x1: zx(x(child.avg_ts_offset)),
        y: zy(childTop),
        height: childHeight * zoom.ky,
        fill: transitionGray(child.count > 0 ? child.positive / child.count : 0),
      });
      placed.push({ nodeId: childId, top: childTop });
      childTop += childHeight;
    }
    // push in reverse so the walk visits children in declaration order
    for (let i = placed.length - 1; i >= 0; i--) stack.push(placed[i]!);
  }

  return { bars, transitions, placeholder: null, xDomain };
}

/** Clamp a zoom so both scales stay strictly positive. */
export function clampZoom(zoom: ZoomTransform): ZoomTransform {
  const MIN_SCALE = 1e-3;
  return {
    kx: Math.max(MIN_SCALE, zoom.kx),
    ky: Math.max(MIN_SCALE, zoom.ky),
    tx: zoom.tx,
    ty: zoom.ty,
  };
}
