/**
 * Aster-chart geometry for one composite descriptor.
 *
 * Each slice's angular width is its share of the composite's event
 * mix, and its radius is the descriptor's height fraction (the mean
 * for that event type relative to the highest mean across composites).
 * Event types folded away server-side reappear as a single gray
 * residual slice whose detail list can be expanded in the UI.
 */

import type { CompositeDescriptor } from '../api';
import { RESIDUAL_COLOR, categoryColor } from '../palette';

export interface AsterSlice {
  /** null marks the residual bucket. */
  eventType: number | null;
  label: string;
  /** Degrees clockwise from 12 o'clock. */
  startAngle: number;
  endAngle: number;
  outerRadius: number;
  fill: string;
  /** Residual only: event types folded into this slice. */
  detail: number[] | null;
}

/** Radius given to the residual slice, as a share of the chart radius. */
const RESIDUAL_RADIUS_FRACTION = 0.25;

export function asterLayout(
  descriptor: CompositeDescriptor,
  radius: number,
): AsterSlice[] {
  const visibleWidth = descriptor.slices.reduce(
    (sum, s) => sum + s.width_fraction,
    0,
  );
  const residualWidth = Math.max(0, 1 - visibleWidth);
  const hasResidual = residualWidth > 1e-9 || descriptor.other_bucket.length > 0;
  const totalWidth = visibleWidth + (hasResidual ? residualWidth : 0);
  if (totalWidth <= 0) return [];

  const slices: AsterSlice[] = [];
  let angle = 0;
  for (const slice of descriptor.slices) {
    const span = (slice.width_fraction / totalWidth) * 360;
    slices.push({
      eventType: slice.event_type,
      label: `event type ${slice.event_type}`,
      startAngle: angle,
      endAngle: angle + span,
      outerRadius: slice.height_fraction * radius,
      fill: categoryColor(slice.event_type),
      detail: null,
    });
    angle += span;
  }
  if (hasResidual) {
    slices.push({
      eventType: null,
      label: 'other',
      startAngle: angle,
      endAngle: 360,
      outerRadius: RESIDUAL_RADIUS_FRACTION * radius,
      fill: RESIDUAL_COLOR,
      detail: [...descriptor.other_bucket],
    });
  } else if (slices.length > 0) {
    // absorb float drift so the wheel always closes exactly
    slices[slices.length - 1]!.endAngle = 360;
  }
  return slices;
}
