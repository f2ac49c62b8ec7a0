/**
 * Canned server responses captured from a live run, so the tests pin
 * the exact JSON the backend emits without needing a server.
 */

import type {
  CompositeDescriptor,
  HistogramResponse,
  NodeStats,
  TreeEnvelope,
  TreePayload,
} from '../src/api';

import treeSaJson from './fixtures/tree_sa.json';
import treeMspJson from './fixtures/tree_msp.json';
import compositesSaJson from './fixtures/composites_sa.json';
import statsNode1Json from './fixtures/stats_sa_node1.json';
import histogramNode1Json from './fixtures/histogram_sa_node1.json';

export const treeSa = (treeSaJson as TreeEnvelope).payload;
export const treeMsp = (treeMspJson as TreeEnvelope).payload;
export const compositesSa = compositesSaJson as unknown as CompositeDescriptor[];
export const statsNode1 = statsNode1Json as NodeStats;
export const histogramNode1 = histogramNode1Json as HistogramResponse;

/** A minimal hand-rolled tree for targeted geometry checks. */
export function tinyTree(overrides: Partial<TreePayload> = {}): TreePayload {
  const base: TreePayload = {
    method: 'msp',
    total_sequences: 10,
    root: 0,
    params: { method: 'msp', event_filter: null, min_support: 0.0 },
    sequence_ids: Array.from({ length: 10 }, (_, i) => `s${i}`),
    labels: Array.from({ length: 10 }, (_, i) => i < 5),
    future_labels: Array.from({ length: 10 }, () => false),
    nodes: [
      {
        node_id: 0,
        event_type: null,
        count: 10,
        positive: 5,
        future_positive: 0,
        terminated: 0,
        avg_ts_offset: 0,
        avg_gap: 0,
        children: [1],
        members: [0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
        event_timestamps: {},
      },
      {
        node_id: 1,
        event_type: 3,
        count: 10,
        positive: 5,
        future_positive: 0,
        terminated: 4,
        avg_ts_offset: 1000,
        avg_gap: 1000,
        children: [2],
        members: [0, 1, 2, 3, 4, 5, 6, 7, 8, 9],
        event_timestamps: { negative: [5, 6], positive: [7] },
      },
      {
        node_id: 2,
        event_type: 1,
        count: 6,
        positive: 2,
        future_positive: 1,
        terminated: 6,
        avg_ts_offset: 3000,
        avg_gap: 2000,
        children: [],
        members: [0, 1, 2, 5, 6, 7],
        event_timestamps: { negative: [9], positive: [11] },
      },
    ],
    ...overrides,
  };
  return base;
}
