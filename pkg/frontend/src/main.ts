/**
 * Workbench bootstrap: wires the HTTP client, the view-state store and
 * the renderers to the page. All data flows one way — server JSON into
 * layout scenes into DOM — and every interaction dispatches an action.
 */

import { HttpApiClient, type NodeStats } from './api';
import { loadAnalysis, submitDraft, type AnalysisData } from './controller';
import { tooltipRows } from './format';
import { layoutHistogram } from './layout/histogram';
import { layoutTree } from './layout/tree';
import {
  Store,
  legendTypes,
  requestKey,
  visibleControls,
  type Method,
} from './state';
import {
  renderAster,
  renderHistogram,
  renderLegend,
  renderTooltip,
  renderTree,
} from './render';

const TREE_WIDTH = 900;
const TREE_HEIGHT = 480;
const HISTOGRAM_BINS = 40;
const ASTER_RADIUS = 70;
const ZOOM_STEP = 1.1;

const api = new HttpApiClient('');
const store = new Store();
const cache = new Map<string, AnalysisData>();

const el = <T extends HTMLElement | SVGSVGElement>(id: string): T => {
  const found = document.getElementById(id);
  if (!found) throw new Error(`missing element #${id}`);
  return found as unknown as T;
};

const treeSvg = el<SVGSVGElement>('tree');
const histogramSvg = el<SVGSVGElement>('histogram');
const tooltipDiv = el<HTMLElement>('tooltip');
const legendList = el<HTMLElement>('legend');
const asterRow = el<HTMLElement>('asters');
const errorBox = el<HTMLElement>('draft-error');
const statusLine = el<HTMLElement>('status-line');

let lastStats: NodeStats | null = null;

function activeData(): AnalysisData | null {
  const id = store.getState().analysisId;
  return id !== null ? (cache.get(id) ?? null) : null;
}

function redraw(): void {
  const state = store.getState();
  const data = activeData();

  errorBox.textContent = state.draftError ?? '';
  statusLine.textContent = state.inFlight !== null ? 'computing…' : '';

  const controls = visibleControls(state.draft.method);
  el<HTMLElement>('row-window').style.display = controls.window ? '' : 'none';
  el<HTMLElement>('row-k').style.display = controls.k ? '' : 'none';

  if (data === null) {
    renderTree(treeSvg, layoutTree(
      { method: 'sa', total_sequences: 0, root: 0, params: { method: 'sa', event_filter: null, min_support: 0 }, sequence_ids: [], labels: [], future_labels: [], nodes: [] },
      { width: TREE_WIDTH, height: TREE_HEIGHT },
    ), treeHandlers);
    renderLegend(legendList, []);
    asterRow.replaceChildren();
    return;
  }

  renderTree(
    treeSvg,
    layoutTree(data.tree, {
      width: TREE_WIDTH,
      height: TREE_HEIGHT,
      zoom: state.zoom,
    }),
    treeHandlers,
  );

  asterRow.replaceChildren();
  for (const descriptor of data.descriptors) {
    if (!state.pinned.includes(descriptor.composite_id)) continue;
    const holder = document.createElement('div');
    holder.className = 'aster';
    asterRow.appendChild(holder);
    renderAster(holder, descriptor, ASTER_RADIUS, (slice) => {
      const detail = document.createElement('div');
      detail.className = 'aster-detail';
      detail.textContent = `folded event types: ${slice.detail!.join(', ') || 'none'}`;
      holder.appendChild(detail);
    });
  }
  renderLegend(legendList, legendTypes(state.pinned, data.descriptors));
}

const treeHandlers = {
  onHover(nodeId: number, event: MouseEvent): void {
    const state = store.getState();
    const data = activeData();
    if (data === null || state.analysisId === null) return;
    if (state.hoveredNode !== nodeId) {
      store.dispatch({ type: 'node-hovered', nodeId });
      const analysisId = state.analysisId;
      void api.fetchNodeStats(analysisId, nodeId).then((stats) => {
        if (store.getState().hoveredNode !== nodeId) return;
        lastStats = stats;
        renderTooltip(tooltipDiv, tooltipRows(stats, data.tree), {
          x: event.pageX,
          y: event.pageY,
        });
      });
      void api
        .fetchHistogram(analysisId, nodeId, HISTOGRAM_BINS)
        .then((histogram) => {
          if (store.getState().hoveredNode !== nodeId) return;
          renderHistogram(
            histogramSvg,
            layoutHistogram(histogram, { width: 420, height: 140 }),
          );
        })
        .catch(() => renderHistogram(histogramSvg, { bars: [], unitHeight: 0, timeDomain: [0, 1] }));
    } else if (lastStats !== null) {
      renderTooltip(tooltipDiv, tooltipRows(lastStats, data.tree), {
        x: event.pageX,
        y: event.pageY,
      });
    }
  },
  onLeave(): void {
    store.dispatch({ type: 'node-unhovered' });
    lastStats = null;
    renderTooltip(tooltipDiv, [], null);
  },
  onClick(nodeId: number): void {
    const data = activeData();
    if (data === null || data.tree.method !== 'sa') return;
    const eventType = data.tree.nodes[nodeId]?.event_type;
    if (eventType === null || eventType === undefined) return;
    store.dispatch({ type: 'composite-toggled', compositeId: eventType });
  },
};

function wireZoom(): void {
  treeSvg.addEventListener('wheel', (event) => {
    event.preventDefault();
    const { zoom } = store.getState();
    const factor = event.deltaY < 0 ? ZOOM_STEP : 1 / ZOOM_STEP;
    const scaleX = event.shiftKey ? 1 : factor;
    const scaleY = event.ctrlKey ? 1 : factor;
    // zoom about the cursor so the point under it stays put
    store.dispatch({
      type: 'zoomed',
      zoom: {
        kx: zoom.kx * scaleX,
        ky: zoom.ky * scaleY,
        tx: event.offsetX - scaleX * (event.offsetX - zoom.tx),
        ty: event.offsetY - scaleY * (event.offsetY - zoom.ty),
      },
    });
  });
  treeSvg.addEventListener('dblclick', () =>
    store.dispatch({ type: 'zoom-reset' }),
  );
}

function wirePanel(): void {
  const numeric = (id: string): number =>
    Number(el<HTMLInputElement>(id).value);

  el<HTMLSelectElement>('method').addEventListener('change', (event) => {
    store.dispatch({
      type: 'draft-edited',
      patch: { method: (event.target as HTMLSelectElement).value as Method },
    });
  });
  el<HTMLInputElement>('window-days').addEventListener('change', () =>
    store.dispatch({
      type: 'draft-edited',
      patch: { window: Math.round(numeric('window-days') * 24 * 3600) },
    }),
  );
  el<HTMLInputElement>('k').addEventListener('change', () =>
    store.dispatch({ type: 'draft-edited', patch: { k: numeric('k') } }),
  );
  el<HTMLInputElement>('min-support').addEventListener('change', () =>
    store.dispatch({
      type: 'draft-edited',
      patch: { minSupport: numeric('min-support') },
    }),
  );
  el<HTMLInputElement>('event-filter').addEventListener('change', (event) => {
    const raw = (event.target as HTMLInputElement).value;
    const names = raw.split(',').map((s) => s.trim()).filter((s) => s.length > 0);
    store.dispatch({ type: 'draft-edited', patch: { eventFilter: names } });
  });
  el<HTMLElement>('submit').addEventListener('click', () => {
    void submitDraft(store, api, cache);
  });
}

async function boot(): Promise<void> {
  wireZoom();
  wirePanel();
  store.subscribe(redraw);

  const datasets = await api.listDatasets();
  const picker = el<HTMLSelectElement>('dataset');
  picker.replaceChildren(
    ...datasets.map((d) => {
      const option = document.createElement('option');
      option.value = d.dataset_id;
      option.textContent = `${d.dataset_id} — ${d.n_sequences} sequences`;
      return option;
    }),
  );
  picker.addEventListener('change', () =>
    store.dispatch({ type: 'dataset-selected', datasetId: picker.value }),
  );
  const first = datasets[0];
  if (first !== undefined) {
    store.dispatch({ type: 'dataset-selected', datasetId: first.dataset_id });
    const id = await submitDraft(store, api, cache);
    if (id === null) return;
  }
  redraw();
}

// Allow importing this module in tests without touching the DOM.
if (typeof document !== 'undefined' && document.getElementById('tree')) {
  void boot();
}

export { activeData, boot, cache, loadAnalysis, requestKey, store };
