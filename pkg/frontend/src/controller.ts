/**
 * Submission flow: validate the draft, skip the network entirely when
 * an identical request already ran, otherwise POST, poll to completion
 * and load the resulting views. Errors leave the prior view in place.
 */

import {
  ApiError,
  type AnalysisRequestBody,
  type ApiClient,
  type CompositeDescriptor,
  type TreePayload,
} from './api';
import { requestKey, validateDraft, type Store } from './state';

export interface AnalysisData {
  tree: TreePayload;
  descriptors: CompositeDescriptor[];
}

export interface SubmitOptions {
  /** Delay between status polls; tests set 0. */
  pollMs?: number;
  maxPolls?: number;
}

const sleep = (ms: number) =>
  ms > 0 ? new Promise((resolve) => setTimeout(resolve, ms)) : Promise.resolve();

export async function loadAnalysis(
  api: ApiClient,
  analysisId: string,
): Promise<AnalysisData> {
  const [envelope, descriptors] = await Promise.all([
    api.fetchTree(analysisId),
    api.fetchComposites(analysisId),
  ]);
  return { tree: envelope.payload, descriptors };
}

/**
 * Drive one submission from the current draft. Returns the analysis id
 * on success, or null when nothing was submitted (invalid draft, no
 * dataset, a submission already in flight, or a failed job).
 */
export async function submitDraft(
  store: Store,
  api: ApiClient,
  cache: Map<string, AnalysisData>,
  options: SubmitOptions = {},
): Promise<string | null> {
  const state = store.getState();
  if (state.datasetId === null) {
    store.dispatch({ type: 'submit-failed', message: 'no dataset selected' });
    return null;
  }
  const problem = validateDraft(state.draft);
  if (problem !== null) {
    store.dispatch({ type: 'submit-failed', message: problem });
    return null;
  }
  if (state.inFlight !== null) return null;

  const key = requestKey(state.datasetId, state.draft);
  const known = state.jobs[key];
  if (known !== undefined && cache.has(known)) {
    // unchanged draft: reuse the completed job, no network traffic
    store.dispatch({
      type: 'analysis-ready',
      requestKey: key,
      analysisId: known,
      compositeIds: cache.get(known)!.descriptors.map((d) => d.composite_id),
    });
    return known;
  }

  store.dispatch({ type: 'submit-started', requestKey: key });
  try {
    const body: AnalysisRequestBody = {
      dataset_id: state.datasetId,
      method: state.draft.method,
      event_filter: [...state.draft.eventFilter].sort(),
      min_support: state.draft.minSupport,
      seed: 0,
    };
    if (state.draft.method === 'sa') {
      body.window = state.draft.window;
      body.k = state.draft.k;
    }
    let ticket = await api.submitAnalysis(body);
    const maxPolls = options.maxPolls ?? 600;
    for (let i = 0; ticket.status === 'pending' || ticket.status === 'running'; i++) {
      if (i >= maxPolls) throw new ApiError(0, 'timed out waiting for the analysis');
      await sleep(options.pollMs ?? 250);
      ticket = await api.analysisStatus(ticket.analysis_id);
    }
    if (ticket.status === 'error') {
      throw new ApiError(0, ticket.error ?? 'analysis failed');
    }
    const data = await loadAnalysis(api, ticket.analysis_id);
    cache.set(ticket.analysis_id, data);
    store.dispatch({
      type: 'analysis-ready',
      requestKey: key,
      analysisId: ticket.analysis_id,
      compositeIds: data.descriptors.map((d) => d.composite_id),
    });
    return ticket.analysis_id;
  } catch (err) {
    const message = err instanceof ApiError ? err.detail : String(err);
    store.dispatch({ type: 'submit-failed', message });
    return null;
  }
}
