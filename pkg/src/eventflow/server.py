"""HTTP interface: dataset uploads, async analyses, tree/metric queries.

Analyses are content-addressed: the id is a hash of the dataset bytes
plus the effective parameters, so resubmitting an identical request
reuses the cached result instead of recomputing. Jobs run on a small
thread pool; results land under the data directory and survive
restarts.
"""

from __future__ import annotations

import hashlib
import json
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Literal

import numpy as np
from fastapi import FastAPI, Form, HTTPException, Response, UploadFile
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel, Field, field_validator

from . import __version__
from .errors import EventFlowError, ParseError
from .ingest import (
    decode_result,
    load_result,
    parse_timestamp,
    read_events,
    read_outcomes,
    result_bytes,
    save_result,
)
from .metrics import extract_subgroups, quality_report
from .model import Dataset, PrepConfig, build_dataset
from .pipeline import run_analysis

DEFAULT_PORT = 8080


class AnalysisRequest(BaseModel):
    dataset_id: str
    method: Literal["sa", "mcp", "msp"]
    window: int | None = None
    k: int | None = None
    event_filter: list[str] = Field(default_factory=list)
    min_support: float = 0.01
    seed: int = 0

    @field_validator("window")
    @classmethod
    def _window_positive(cls, v):
        if v is not None and v <= 0:
            raise ValueError("window must be positive")
        return v

    @field_validator("k")
    @classmethod
    def _k_at_least_one(cls, v):
        if v is not None and v < 1:
            raise ValueError("k must be >= 1")
        return v

    @field_validator("min_support")
    @classmethod
    def _support_fraction(cls, v):
        if not 0.0 <= v < 1.0:
            raise ValueError("min_support must be in [0, 1)")
        return v

    def canonical(self, dataset_digest: str) -> dict:
        """Parameters that define the analysis identity.

        Window, k and seed only matter for the composite pipeline, so
        they are dropped for mcp/msp and identical requests collapse
        onto one analysis.
        """
        doc = {
            "dataset": dataset_digest,
            "method": self.method,
            "event_filter": sorted(self.event_filter),
            "min_support": self.min_support,
        }
        if self.method == "sa":
            doc["window"] = self.window
            doc["k"] = self.k
            doc["seed"] = self.seed
        return doc


class _Store:
    """Disk layout plus in-memory job state for one server instance."""

    def __init__(self, data_dir: Path):
        self.data_dir = data_dir
        self.datasets_dir = data_dir / "datasets"
        self.analyses_dir = data_dir / "analyses"
        self.datasets_dir.mkdir(parents=True, exist_ok=True)
        self.analyses_dir.mkdir(parents=True, exist_ok=True)
        self.lock = threading.Lock()
        self.jobs: dict[str, dict] = {}
        self.dataset_cache: dict[str, Dataset] = {}
        self.tree_cache: dict[str, object] = {}
        self.executor = ThreadPoolExecutor(max_workers=2)

    def dataset_path(self, dataset_id: str) -> Path:
        return self.datasets_dir / f"{dataset_id}.json"

    def analysis_dir(self, analysis_id: str) -> Path:
        return self.analyses_dir / analysis_id

    def load_dataset(self, dataset_id: str) -> Dataset:
        with self.lock:
            cached = self.dataset_cache.get(dataset_id)
        if cached is not None:
            return cached
        path = self.dataset_path(dataset_id)
        if not path.exists():
            raise HTTPException(status_code=404, detail=f"unknown dataset {dataset_id}")
        dataset = load_result(path)
        with self.lock:
            self.dataset_cache[dataset_id] = dataset
        return dataset

    def status_of(self, analysis_id: str) -> dict | None:
        with self.lock:
            job = self.jobs.get(analysis_id)
            if job is not None:
                return dict(job)
        status_path = self.analysis_dir(analysis_id) / "status.json"
        if status_path.exists():
            return json.loads(status_path.read_text())
        return None

    def load_tree(self, analysis_id: str):
        with self.lock:
            cached = self.tree_cache.get(analysis_id)
        if cached is not None:
            return cached
        tree = load_result(self.analysis_dir(analysis_id) / "tree.json")
        with self.lock:
            self.tree_cache[analysis_id] = tree
        return tree


def _digest(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()[:16]


def _run_job(store: _Store, analysis_id: str, request: AnalysisRequest) -> None:
    out_dir = store.analysis_dir(analysis_id)
    with store.lock:
        store.jobs[analysis_id]["status"] = "running"
    try:
        dataset = store.load_dataset(request.dataset_id)
        result = run_analysis(
            dataset,
            request.method,
            window=request.window,
            k=request.k,
            event_filter=sorted(request.event_filter) or None,
            min_support=request.min_support,
            seed=request.seed,
        )
        save_result(result.tree, out_dir / "tree.json")
        if result.model is not None:
            save_result(result.model, out_dir / "model.json")
        status = {"analysis_id": analysis_id, "status": "done"}
    except EventFlowError as exc:
        status = {"analysis_id": analysis_id, "status": "error", "error": str(exc)}
    except Exception as exc:  # keep the job table consistent on surprises
        status = {"analysis_id": analysis_id, "status": "error", "error": repr(exc)}
    (out_dir / "status.json").write_text(json.dumps(status, sort_keys=True))
    with store.lock:
        store.jobs[analysis_id] = status


def create_app(data_dir: str | Path | None = None) -> FastAPI:
    if data_dir is None:
        data_dir = os.environ.get("EVENTFLOW_DATA_DIR", "eventflow_data")
    store = _Store(Path(data_dir))
    app = FastAPI(title="eventflow", version=__version__)
    app.state.store = store

    @app.get("/api/health")
    def health():
        return {"status": "ok", "version": __version__}

    @app.get("/api/datasets")
    def list_datasets():
        out = []
        for path in sorted(store.datasets_dir.glob("*.json")):
            doc = json.loads(path.read_text())
            summary = doc.get("payload", {}).get("summary", {})
            out.append({"dataset_id": path.stem, **summary})
        return out

    @app.post("/api/datasets", status_code=201)
    async def upload_dataset(
        events: UploadFile,
        outcomes: UploadFile,
        outcome_type: str = Form(...),
        cutoff: str = Form(...),
        eval_end: str = Form(...),
        history_years: float = Form(10.0),
        pre_outcome_days: float = Form(365.0),
    ):
        import tempfile

        try:
            prep = PrepConfig(
                outcome_type=outcome_type,
                cutoff=parse_timestamp(cutoff),
                eval_end=parse_timestamp(eval_end),
                history_years=history_years,
                pre_outcome_days=pre_outcome_days,
            )
        except (ValueError, ParseError) as exc:
            raise HTTPException(status_code=422, detail=str(exc))

        with tempfile.TemporaryDirectory() as tmp:
            ev_path = Path(tmp) / (events.filename or "events.csv")
            out_path = Path(tmp) / (outcomes.filename or "outcomes.csv")
            ev_path.write_bytes(await events.read())
            out_path.write_bytes(await outcomes.read())
            try:
                dataset = build_dataset(
                    read_events(ev_path), read_outcomes(out_path), prep
                )
            except (ParseError, EventFlowError) as exc:
                raise HTTPException(status_code=400, detail=str(exc))

        body = result_bytes(dataset)
        dataset_id = _digest(body)
        store.dataset_path(dataset_id).write_bytes(body)
        with store.lock:
            store.dataset_cache[dataset_id] = dataset
        from dataclasses import asdict

        return {"dataset_id": dataset_id, "summary": asdict(dataset.summary)}

    @app.post("/api/analyses", status_code=202)
    def submit_analysis(request: AnalysisRequest):
        path = store.dataset_path(request.dataset_id)
        if not path.exists():
            raise HTTPException(
                status_code=404, detail=f"unknown dataset {request.dataset_id}"
            )
        dataset_digest = _digest(path.read_bytes())
        canonical = json.dumps(
            request.canonical(dataset_digest), sort_keys=True, separators=(",", ":")
        )
        analysis_id = _digest(canonical.encode())
        out_dir = store.analysis_dir(analysis_id)

        existing = store.status_of(analysis_id)
        if existing is not None and existing["status"] in ("pending", "running", "done"):
            return {"analysis_id": analysis_id, "status": existing["status"]}

        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "request.json").write_text(canonical)
        with store.lock:
            store.jobs[analysis_id] = {"analysis_id": analysis_id, "status": "pending"}
        store.executor.submit(_run_job, store, analysis_id, request)
        return {"analysis_id": analysis_id, "status": "pending"}

    def _must_status(analysis_id: str) -> dict:
        status = store.status_of(analysis_id)
        if status is None:
            raise HTTPException(
                status_code=404, detail=f"unknown analysis {analysis_id}"
            )
        return status

    def _done_tree(analysis_id: str):
        status = _must_status(analysis_id)
        if status["status"] in ("pending", "running"):
            raise HTTPException(status_code=409, detail="analysis not finished")
        if status["status"] == "error":
            raise HTTPException(
                status_code=409, detail=f"analysis failed: {status.get('error')}"
            )
        return store.load_tree(analysis_id)

    @app.get("/api/analyses")
    def list_analyses():
        seen = {}
        for path in sorted(store.analyses_dir.iterdir()):
            status = store.status_of(path.name)
            if status is not None:
                seen[path.name] = status
        with store.lock:
            for analysis_id, job in store.jobs.items():
                seen[analysis_id] = dict(job)
        return sorted(seen.values(), key=lambda s: s["analysis_id"])

    @app.get("/api/analyses/{analysis_id}")
    def analysis_status(analysis_id: str):
        return _must_status(analysis_id)

    @app.get("/api/analyses/{analysis_id}/tree")
    def analysis_tree(analysis_id: str):
        _done_tree(analysis_id)
        body = (store.analysis_dir(analysis_id) / "tree.json").read_bytes()
        return Response(
            content=body,
            media_type="application/json",
            headers={"ETag": _digest(body)},
        )

    @app.get("/api/analyses/{analysis_id}/composites")
    def analysis_composites(analysis_id: str):
        _done_tree(analysis_id)
        model_path = store.analysis_dir(analysis_id) / "model.json"
        if not model_path.exists():
            return []
        doc = json.loads(model_path.read_text())
        decode_result(doc)  # validates the envelope
        return doc["payload"]["descriptors"] or []

    @app.get("/api/analyses/{analysis_id}/quality")
    def analysis_quality(analysis_id: str, min_support: float = 0.01):
        if not 0.0 <= min_support < 1.0:
            raise HTTPException(status_code=422, detail="min_support must be in [0, 1)")
        tree = _done_tree(analysis_id)
        from dataclasses import asdict

        return asdict(quality_report(tree, min_support))

    @app.get("/api/analyses/{analysis_id}/subgroups")
    def analysis_subgroups(
        analysis_id: str, threshold: float = 0.30, min_support: float = 0.01
    ):
        if not 0.0 <= min_support < 1.0:
            raise HTTPException(status_code=422, detail="min_support must be in [0, 1)")
        if not 0.0 <= threshold <= 1.0:
            raise HTTPException(status_code=422, detail="threshold must be in [0, 1]")
        tree = _done_tree(analysis_id)
        report = extract_subgroups(tree, threshold, min_support)
        from dataclasses import asdict

        doc = asdict(report)
        doc["sequence_ids"] = [tree.sequence_ids[si] for si in report.members]
        return doc

    def _must_node(tree, node_id: int):
        if not 0 <= node_id < len(tree.nodes):
            raise HTTPException(status_code=404, detail=f"unknown node {node_id}")
        return tree.node(node_id)

    @app.get("/api/analyses/{analysis_id}/nodes/{node_id}/stats")
    def node_stats(analysis_id: str, node_id: int):
        tree = _done_tree(analysis_id)
        node = _must_node(tree, node_id)
        return {
            "node_id": node.node_id,
            "event_type": node.event_type,
            "count": node.count,
            "positive": node.positive,
            "future_positive": node.future_positive,
            "terminated": node.terminated,
            "shade": node.positive / node.count if node.count else 0.0,
            "avg_ts_offset": node.avg_ts_offset,
            "avg_gap": node.avg_gap,
            "children": list(node.children),
        }

    @app.get("/api/analyses/{analysis_id}/nodes/{node_id}/histogram")
    def node_histogram(analysis_id: str, node_id: int, bins: int = 50):
        if not 1 <= bins <= 500:
            raise HTTPException(status_code=422, detail="bins must be in [1, 500]")
        tree = _done_tree(analysis_id)
        node = _must_node(tree, node_id)
        negative = node.event_timestamps.get("negative", [])
        positive = node.event_timestamps.get("positive", [])
        merged = list(negative) + list(positive)
        if not merged:
            raise HTTPException(
                status_code=422, detail=f"node {node_id} has no event timestamps"
            )
        lo, hi = min(merged), max(merged)
        if lo == hi:
            lo, hi = lo - 0.5, hi + 0.5
        edges = np.linspace(lo, hi, bins + 1)
        neg_counts, _ = np.histogram(negative, bins=edges)
        pos_counts, _ = np.histogram(positive, bins=edges)
        return {
            "node_id": node_id,
            "bins": bins,
            "edges": edges.tolist(),
            "negative": neg_counts.tolist(),
            "positive": pos_counts.tolist(),
        }

    dist = Path(__file__).resolve().parents[2] / "frontend" / "dist"
    if dist.is_dir():
        app.mount("/", StaticFiles(directory=dist, html=True), name="ui")

    return app


def serve(data_dir: str | Path | None = None, port: int | None = None) -> None:
    """Run the API with uvicorn (blocking)."""
    import uvicorn

    if port is None:
        port = int(os.environ.get("EVENTFLOW_PORT", DEFAULT_PORT))
    uvicorn.run(create_app(data_dir), host="0.0.0.0", port=port)
