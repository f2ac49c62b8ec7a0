/**
 * Typed client for the eventflow analysis server.
 *
 * Every interface here mirrors a JSON payload emitted by the server
 * byte-for-byte; the UI layers on top never compute analytics of their
 * own, so each displayed number is traceable to one of these fields.
 */

export interface DatasetSummary {
  dataset_id: string;
  n_sequences: number;
  n_events: number;
  n_event_types: number;
  positive_fraction: number;
}

export interface TreeNodeJson {
  node_id: number;
  /** Registry id of the event type; null only on the root. */
  event_type: number | null;
  count: number;
  positive: number;
  future_positive: number;
  terminated: number;
  avg_ts_offset: number;
  avg_gap: number;
  children: number[];
  members: number[];
  event_timestamps: { negative?: number[]; positive?: number[] };
  /** Present when the server down-sampled the timestamp lists. */
  timestamps_total?: { negative?: number; positive?: number };
  sampling_seed?: number;
}

export interface TreePayload {
  method: 'sa' | 'mcp' | 'msp';
  total_sequences: number;
  root: number;
  params: {
    method: string;
    window?: number;
    k?: number;
    seed?: number;
    event_filter: string[] | null;
    min_support: number;
  };
  sequence_ids: string[];
  labels: boolean[];
  future_labels: boolean[];
  nodes: TreeNodeJson[];
}

export interface TreeEnvelope {
  schema_version: number;
  kind: string;
  payload: TreePayload;
}

export interface DescriptorSlice {
  event_type: number;
  width_fraction: number;
  height_fraction: number;
}

export interface CompositeDescriptor {
  composite_id: number;
  slices: DescriptorSlice[];
  /** Event types folded into the residual because their share is tiny. */
  other_bucket: number[];
  segment_count: number;
  label_stats: [number, number];
}

export interface NodeStats {
  node_id: number;
  event_type: number | null;
  count: number;
  positive: number;
  future_positive: number;
  terminated: number;
  shade: number;
  avg_ts_offset: number;
  avg_gap: number;
  children: number[];
}

export interface HistogramResponse {
  node_id: number;
  bins: number;
  edges: number[];
  negative: number[];
  positive: number[];
}

export interface QualityResponse {
  method: string;
  min_support_fraction: number;
  information_gain: number;
  avg_height_pct: number;
  n_elements: number;
  base_entropy: number;
}

export interface SubgroupResponse {
  method: string;
  threshold_fraction: number;
  min_support_fraction: number;
  n_sequences: number;
  outcome_pct: number;
  future_precision_pct: number;
  members: number[];
  sequence_ids: string[];
}

export interface AnalysisRequestBody {
  dataset_id: string;
  method: 'sa' | 'mcp' | 'msp';
  window?: number;
  k?: number;
  event_filter?: string[];
  min_support?: number;
  seed?: number;
}

export interface AnalysisTicket {
  analysis_id: string;
  status: 'pending' | 'running' | 'done' | 'error';
  error?: string;
}

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly detail: string,
  ) {
    super(`HTTP ${status}: ${detail}`);
  }
}

/**
 * The subset of the server API the workbench consumes. Tests supply a
 * mock implementation; the app uses HttpApiClient below.
 */
export interface ApiClient {
  listDatasets(): Promise<DatasetSummary[]>;
  submitAnalysis(body: AnalysisRequestBody): Promise<AnalysisTicket>;
  analysisStatus(analysisId: string): Promise<AnalysisTicket>;
  fetchTree(analysisId: string): Promise<TreeEnvelope>;
  fetchComposites(analysisId: string): Promise<CompositeDescriptor[]>;
  fetchQuality(analysisId: string, minSupport: number): Promise<QualityResponse>;
  fetchSubgroups(
    analysisId: string,
    threshold: number,
    minSupport: number,
  ): Promise<SubgroupResponse>;
  fetchNodeStats(analysisId: string, nodeId: number): Promise<NodeStats>;
  fetchHistogram(
    analysisId: string,
    nodeId: number,
    bins: number,
  ): Promise<HistogramResponse>;
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class HttpApiClient implements ApiClient {
  constructor(
    private readonly baseUrl = '',
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, init);
    if (!resp.ok) {
      let detail = resp.statusText;
      try {
        const body = await resp.json();
        if (typeof body.detail === 'string') detail = body.detail;
        else if (body.detail) detail = JSON.stringify(body.detail);
      } catch {
        // keep the status text when the body is not JSON
      }
      throw new ApiError(resp.status, detail);
    }
    return (await resp.json()) as T;
  }

  listDatasets(): Promise<DatasetSummary[]> {
    return this.request('/api/datasets');
  }

  submitAnalysis(body: AnalysisRequestBody): Promise<AnalysisTicket> {
    return this.request('/api/analyses', {
      method: 'POST',
      headers: { 'Content-Type': 'application/json' },
      body: JSON.stringify(body),
    });
  }

  analysisStatus(analysisId: string): Promise<AnalysisTicket> {
    return this.request(`/api/analyses/${analysisId}`);
  }

  fetchTree(analysisId: string): Promise<TreeEnvelope> {
    return this.request(`/api/analyses/${analysisId}/tree`);
  }

  fetchComposites(analysisId: string): Promise<CompositeDescriptor[]> {
    return this.request(`/api/analyses/${analysisId}/composites`);
  }

  fetchQuality(analysisId: string, minSupport: number): Promise<QualityResponse> {
    return this.request(
      `/api/analyses/${analysisId}/quality?min_support=${minSupport}`,
    );
  }

  fetchSubgroups(
    analysisId: string,
    threshold: number,
    minSupport: number,
  ): Promise<SubgroupResponse> {
    return this.request(
      `/api/analyses/${analysisId}/subgroups?threshold=${threshold}&min_support=${minSupport}`,
    );
  }

  fetchNodeStats(analysisId: string, nodeId: number): Promise<NodeStats> {
    return this.request(`/api/analyses/${analysisId}/nodes/${nodeId}/stats`);
  }

  fetchHistogram(
    analysisId: string,
    nodeId: number,
    bins: number,
  ): Promise<HistogramResponse> {
    return this.request(
      `/api/analyses/${analysisId}/nodes/${nodeId}/histogram?bins=${bins}`,
    );
  }
}
