/**
 * Display formatting: labels for event types and the tooltip rows for
 * a hovered node. Values pass through from the server untouched apart
 * from number formatting.
 */

import type { NodeStats, TreePayload } from './api';

const DAY = 24 * 3600;
const HOUR = 3600;

export function formatDuration(seconds: number): string {
  const abs = Math.abs(seconds);
  if (abs >= DAY) return `${(seconds / DAY).toFixed(1)} d`;
  if (abs >= HOUR) return `${(seconds / HOUR).toFixed(1)} h`;
  return `${Math.round(seconds)} s`;
}

export function formatPercent(fraction: number): string {
  return `${(100 * fraction).toFixed(1)} %`;
}

/**
 * Human name for a node's event type: composites get their composite
 * id, raw events their registry id (the server keys everything by id).
 */
export function typeLabel(
  eventType: number | null,
  method: TreePayload['method'],
): string {
  if (eventType === null) return 'all sequences';
  return method === 'sa' ? `composite ${eventType}` : `event type ${eventType}`;
}

/**
 * Tooltip contents for one hovered bar, straight from NodeStats —
 * counts verbatim, percentages formatted from the served fractions.
 */
export function tooltipRows(
  stats: NodeStats,
  tree: TreePayload,
): Array<[string, string]> {
  const rows: Array<[string, string]> = [
    ['event', typeLabel(stats.event_type, tree.method)],
    ['sequences', `${stats.count}`],
    ['share of total', formatPercent(stats.count / tree.total_sequences)],
    ['with outcome', `${stats.positive} (${formatPercent(stats.shade)})`],
    ['future outcome', `${stats.future_positive}`],
    ['ending here', `${stats.terminated}`],
    ['avg offset', formatDuration(stats.avg_ts_offset)],
    ['avg gap', formatDuration(stats.avg_gap)],
  ];
  return rows;
}
