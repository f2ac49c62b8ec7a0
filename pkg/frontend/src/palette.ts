/**
 * Color assignments shared by every view, so a composite keeps one hue
 * whether it appears as a tree bar, an aster chart or a legend swatch.
 */

import { schemeTableau10 } from 'd3';

/** Sequences without the outcome. */
export const NEGATIVE_COLOR = '#1f77b4';
/** Sequences with the outcome. */
export const POSITIVE_COLOR = '#d62728';

/** Bars for the root and for raw (non-composite) event types. */
export const NEUTRAL_BAR_COLOR = '#b0b0b0';

/** The folded-away remainder slice of an aster chart. */
export const RESIDUAL_COLOR = '#9e9e9e';

/**
 * Categorical color for composite ids and for event-type slices. Both
 * draw from the same cycle, which is what keeps composite tree bars
 * visually consistent with their aster charts.
 */
export function categoryColor(index: number): string {
  const palette = schemeTableau10;
  return palette[((index % palette.length) + palette.length) % palette.length]!;
}

/**
 * Grayscale fill for a tree transition: share of positive sequences,
 * 0 rendered white and 1 rendered black.
 */
export function transitionGray(positiveFraction: number): string {
  const clamped = Math.min(1, Math.max(0, positiveFraction));
  const v = Math.round(255 * (1 - clamped));
  return `rgb(${v},${v},${v})`;
}

/** Inverse of transitionGray, used by tests and the tooltip preview. */
export function grayToFraction(fill: string): number {
  const match = /^rgb\((\d+),(\d+),(\d+)\)$/.exec(fill);
  if (!match) throw new Error(`not a grayscale fill: ${fill}`);
  return 1 - Number(match[1]) / 255;
}
