/**
 * Overlaid time-histogram layout: one bar series per outcome class on
 * shared bins, negative in blue and positive in red. Heights come
 * straight from the server's per-bin counts under one shared scale.
 */

import { scaleLinear } from 'd3';

import type { HistogramResponse } from '../api';
import { NEGATIVE_COLOR, POSITIVE_COLOR } from '../palette';

export interface HistogramBar {
  series: 'negative' | 'positive';
  bin: number;
  count: number;
  x: number;
  y: number;
  width: number;
  height: number;
  fill: string;
}

export interface HistogramLayoutOptions {
  width: number;
  height: number;
  margin?: { top: number; right: number; bottom: number; left: number };
}

export interface HistogramScene {
  bars: HistogramBar[];
  /** Pixel height representing one count, for axis ticks. */
  unitHeight: number;
  timeDomain: [number, number];
}

const DEFAULT_MARGIN = { top: 6, right: 8, bottom: 18, left: 28 };

export function layoutHistogram(
  response: HistogramResponse,
  options: HistogramLayoutOptions,
): HistogramScene {
  const margin = options.margin ?? DEFAULT_MARGIN;
  const plotWidth = options.width - margin.left - margin.right;
  const plotHeight = options.height - margin.top - margin.bottom;

  const first = response.edges[0] ?? 0;
  const last = response.edges[response.edges.length - 1] ?? 1;
  const x = scaleLinear()
    .domain([first, last])
    .range([margin.left, margin.left + plotWidth]);

  const maxCount = Math.max(1, ...response.negative, ...response.positive);
  const unitHeight = plotHeight / maxCount;
  const baseline = margin.top + plotHeight;

  const bars: HistogramBar[] = [];
  const seriesOf = {
    negative: { counts: response.negative, fill: NEGATIVE_COLOR },
    positive: { counts: response.positive, fill: POSITIVE_COLOR },
  } as const;
  for (const series of ['negative', 'positive'] as const) {
    const { counts, fill } = seriesOf[series];
    counts.forEach((count, bin) => {
      const left = x(response.edges[bin]!);
      const right = x(response.edges[bin + 1]!);
      const height = count * unitHeight;
      bars.push({
        series,
        bin,
        count,
        x: left,
        y: baseline - height,
        width: right - left,
        height,
        fill,
      });
    });
  }
  return { bars, unitHeight, timeDomain: [first, last] };
}
