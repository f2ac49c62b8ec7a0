/**
 * The single view-state reducer behind the workbench.
 *
 * Every UI mutation — pinning a composite, hovering a bar, zooming,
 * editing the parameter draft, submitting an analysis — flows through
 * `reduce` one action at a time, so state transitions are serialized
 * and each invariant (pins within the active analysis, strictly
 * positive zoom scales, at most one in-flight submission) is enforced
 * in one place.
 */

import type { CompositeDescriptor } from './api';
import { IDENTITY_ZOOM, clampZoom, type ZoomTransform } from './layout/tree';

export type Method = 'sa' | 'mcp' | 'msp';

export interface ParameterDraft {
  method: Method;
  /** Segmentation window in seconds (composite pipeline only). */
  window: number;
  /** Number of composite events to learn (composite pipeline only). */
  k: number;
  eventFilter: string[];
  minSupport: number;
  /** Outcome-share threshold used by the subgroup view. */
  threshold: number;
}

export interface ViewState {
  datasetId: string | null;
  analysisId: string | null;
  /** Composite ids available on the active analysis. */
  compositeIds: number[];
  /** Composites with an open aster chart. Always ⊆ compositeIds. */
  pinned: number[];
  hoveredNode: number | null;
  zoom: ZoomTransform;
  draft: ParameterDraft;
  /** Inline validation / submission error, shown next to the panel. */
  draftError: string | null;
  /** Key of the submission in flight; at most one at a time. */
  inFlight: string | null;
  /** Request key -> analysis id for every submission that completed. */
  jobs: Record<string, string>;
}

const WEEK = 7 * 24 * 3600;

export const INITIAL_DRAFT: ParameterDraft = {
  method: 'sa',
  window: WEEK,
  k: 25,
  eventFilter: [],
  minSupport: 0.01,
  threshold: 0.3,
};

export function initialState(): ViewState {
  return {
    datasetId: null,
    analysisId: null,
    compositeIds: [],
    pinned: [],
    hoveredNode: null,
    zoom: IDENTITY_ZOOM,
    draft: { ...INITIAL_DRAFT },
    draftError: null,
    inFlight: null,
    jobs: {},
  };
}

export type Action =
  | { type: 'dataset-selected'; datasetId: string }
  | {
      type: 'analysis-ready';
      requestKey: string;
      analysisId: string;
      compositeIds: number[];
    }
  | { type: 'composite-toggled'; compositeId: number }
  | { type: 'node-hovered'; nodeId: number }
  | { type: 'node-unhovered' }
  | { type: 'zoomed'; zoom: ZoomTransform }
  | { type: 'zoom-reset' }
  | { type: 'draft-edited'; patch: Partial<ParameterDraft> }
  | { type: 'submit-started'; requestKey: string }
  | { type: 'submit-failed'; message: string };

export function reduce(state: ViewState, action: Action): ViewState {
  switch (action.type) {
    case 'dataset-selected':
      return { ...state, datasetId: action.datasetId, draftError: null };
    case 'analysis-ready': {
      const changed = action.analysisId !== state.analysisId;
      return {
        ...state,
        analysisId: action.analysisId,
        compositeIds: [...action.compositeIds],
        pinned: changed
          ? state.pinned.filter((id) => action.compositeIds.includes(id))
          : state.pinned,
        hoveredNode: changed ? null : state.hoveredNode,
        zoom: changed ? IDENTITY_ZOOM : state.zoom,
        draftError: null,
        inFlight: null,
        jobs: { ...state.jobs, [action.requestKey]: action.analysisId },
      };
    }
    case 'composite-toggled': {
      if (!state.compositeIds.includes(action.compositeId)) return state;
      const pinned = state.pinned.includes(action.compositeId)
        ? state.pinned.filter((id) => id !== action.compositeId)
        : [...state.pinned, action.compositeId];
      return { ...state, pinned };
    }
    case 'node-hovered':
      return { ...state, hoveredNode: action.nodeId };
    case 'node-unhovered':
      return { ...state, hoveredNode: null };
    case 'zoomed':
      return { ...state, zoom: clampZoom(action.zoom) };
    case 'zoom-reset':
      return { ...state, zoom: IDENTITY_ZOOM };
    case 'draft-edited':
      return {
        ...state,
        draft: { ...state.draft, ...action.patch },
        draftError: null,
      };
    case 'submit-started':
      if (state.inFlight !== null) return state;
      return { ...state, inFlight: action.requestKey, draftError: null };
    case 'submit-failed':
      return { ...state, inFlight: null, draftError: action.message };
    default:
      return state;
  }
}

/** Tiny observable wrapper so the app renders from one state object. */
export class Store {
  private state: ViewState;
  private readonly listeners: Array<(state: ViewState) => void> = [];

  constructor(state: ViewState = initialState()) {
    this.state = state;
  }

  getState(): ViewState {
    return this.state;
  }

  dispatch(action: Action): ViewState {
    this.state = reduce(this.state, action);
    for (const listener of this.listeners) listener(this.state);
    return this.state;
  }

  subscribe(listener: (state: ViewState) => void): () => void {
    this.listeners.push(listener);
    return () => {
      const at = this.listeners.indexOf(listener);
      if (at >= 0) this.listeners.splice(at, 1);
    };
  }
}

/**
 * Event types shown in the linked legend: exactly the union of slice
 * types across the pinned composites, ascending.
 */
export function legendTypes(
  pinned: number[],
  descriptors: CompositeDescriptor[],
): number[] {
  const union = new Set<number>();
  for (const descriptor of descriptors) {
    if (!pinned.includes(descriptor.composite_id)) continue;
    for (const slice of descriptor.slices) union.add(slice.event_type);
  }
  return [...union].sort((a, b) => a - b);
}

/** Which parameter controls apply to the drafted method. */
export function visibleControls(method: Method): {
  window: boolean;
  k: boolean;
} {
  const composite = method === 'sa';
  return { window: composite, k: composite };
}

/**
 * Client-side mirror of the server's request validation, so obviously
 * invalid drafts never leave the browser.
 */
export function validateDraft(draft: ParameterDraft): string | null {
  if (draft.method === 'sa') {
    if (!Number.isFinite(draft.window) || draft.window <= 0) {
      return 'window must be positive';
    }
    if (!Number.isInteger(draft.k) || draft.k < 1) {
      return 'k must be >= 1';
    }
  }
  if (!(draft.minSupport >= 0 && draft.minSupport < 1)) {
    return 'min_support must be in [0, 1)';
  }
  if (!(draft.threshold >= 0 && draft.threshold <= 1)) {
    return 'threshold must be in [0, 1]';
  }
  return null;
}

/**
 * Canonical identity of a drafted analysis, mirroring the server's
 * content addressing: window and k only matter for the composite
 * pipeline, so two path-method drafts differing only there map to the
 * same key and the second submission reuses the first job.
 */
export function requestKey(datasetId: string, draft: ParameterDraft): string {
  const doc: Record<string, unknown> = {
    dataset_id: datasetId,
    event_filter: [...draft.eventFilter].sort(),
    method: draft.method,
    min_support: draft.minSupport,
  };
  if (draft.method === 'sa') {
    doc['k'] = draft.k;
    doc['window'] = draft.window;
  }
  return JSON.stringify(doc);
}
