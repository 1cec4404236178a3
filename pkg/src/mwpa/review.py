"""Local HTTP service for blind human evaluation: serves batch samples to the
review UI, appends rating records durably, and summarizes them.

Ratings land in an append-only JSONL file (one self-contained line per rating),
so a crash between writes never corrupts earlier records and a restart resumes
every evaluator's cursor from the file alone.
"""

from __future__ import annotations

import hashlib
import threading
from pathlib import Path
from typing import Optional

from fastapi import FastAPI, HTTPException
from fastapi.responses import HTMLResponse
from fastapi.staticfiles import StaticFiles

from . import pipeline

DEFAULT_PORT = 8470

_PLACEHOLDER_PAGE = """<!doctype html>
<html><head><title>MWP review</title></head>
<body><h1>MWP review service</h1>
<p>No UI build found. Point --static at the built frontend assets,
or use the JSON API under /api directly.</p></body></html>
"""

# fields the UI may see; method identity stays server-side until summaries
_PUBLIC_SAMPLE_FIELDS = ("blind_id", "original", "augmented")


def _session_id(evaluator_id: str, batch_path: str) -> str:
    return hashlib.sha256(f"session:{evaluator_id}:{batch_path}".encode()).hexdigest()[:12]


class ReviewState:
    def __init__(self, batch_path: str | Path, ratings_path: str | Path):
        self.batch_path = Path(batch_path)
        self.ratings_path = Path(ratings_path)
        if not self.batch_path.is_file():
            raise FileNotFoundError(f"batch file not found: {self.batch_path}")
        self.batch = pipeline.load_eval_batch(self.batch_path)
        self.by_blind_id = {rec["blind_id"]: rec for rec in self.batch}
        self.family_of = {
            rec["blind_id"]: rec.get("method_family", "all") for rec in self.batch
        }
        self.sessions: dict[str, str] = {}  # session_id -> evaluator_id
        self.write_lock = threading.Lock()

    def rated_ids(self, evaluator_id: str) -> set[str]:
        if not self.ratings_path.is_file():
            return set()
        return {
            r.candidate_id
            for r in pipeline.load_ratings(self.ratings_path)
            if r.evaluator_id == evaluator_id
        }

    def open_session(self, evaluator_id: str) -> dict:
        sid = _session_id(evaluator_id, str(self.batch_path))
        self.sessions[sid] = evaluator_id
        rated = self.rated_ids(evaluator_id)
        return {
            "session_id": sid,
            "evaluator_id": evaluator_id,
            "total": len(self.batch),
            "rated": len([r for r in self.batch if r["blind_id"] in rated]),
        }

    def next_samples(self, session_id: str, count: int) -> dict:
        evaluator_id = self.sessions.get(session_id)
        if evaluator_id is None:
            raise HTTPException(status_code=404, detail=f"unknown session {session_id}")
        rated = self.rated_ids(evaluator_id)
        pending = [rec for rec in self.batch if rec["blind_id"] not in rated]
        samples = [
            {key: rec[key] for key in _PUBLIC_SAMPLE_FIELDS} for rec in pending[:count]
        ]
        return {
            "samples": samples,
            "rated": len(self.batch) - len(pending),
            "total": len(self.batch),
        }

    def submit_rating(self, payload: dict) -> dict:
        required = (
            "candidate_id",
            "evaluator_id",
            "equation_preserved",
            "numbers_preserved",
            "semantic_similarity",
            "grammaticality",
        )
        missing = [key for key in required if key not in payload]
        if missing:
            raise HTTPException(status_code=400, detail=f"missing fields: {missing}")
        if payload["candidate_id"] not in self.by_blind_id:
            raise HTTPException(
                status_code=400, detail=f"unknown candidate_id {payload['candidate_id']!r}"
            )
        try:
            record = pipeline.RatingRecord(
                candidate_id=str(payload["candidate_id"]),
                evaluator_id=str(payload["evaluator_id"]),
                equation_preserved=bool(payload["equation_preserved"]),
                numbers_preserved=bool(payload["numbers_preserved"]),
                semantic_similarity=float(payload["semantic_similarity"]),
                grammaticality=int(payload["grammaticality"]),
                timestamp=pipeline.now_timestamp(),
            )
        except (TypeError, ValueError) as exc:
            raise HTTPException(status_code=400, detail=str(exc))
        with self.write_lock:
            pipeline.append_rating(record, self.ratings_path)
        return {"ok": True, "candidate_id": record.candidate_id}

    def summary(self) -> dict:
        records = (
            pipeline.load_ratings(self.ratings_path) if self.ratings_path.is_file() else []
        )
        return pipeline.summarize_ratings(records, self.family_of)


def create_app(
    batch_path: str | Path,
    ratings_path: str | Path,
    static_dir: Optional[str | Path] = None,
) -> FastAPI:
    state = ReviewState(batch_path, ratings_path)
    app = FastAPI(title="mwpa review service")
    app.state.review = state

    @app.post("/api/session")
    def open_session(payload: dict):
        evaluator_id = str(payload.get("evaluator_id", "")).strip()
        if not evaluator_id:
            raise HTTPException(status_code=400, detail="evaluator_id is required")
        return state.open_session(evaluator_id)

    @app.get("/api/samples")
    def samples(session: str, count: int = 1):
        if count < 1:
            raise HTTPException(status_code=400, detail="count must be >= 1")
        return state.next_samples(session, count)

    @app.post("/api/ratings")
    def ratings(payload: dict):
        return state.submit_rating(payload)

    @app.get("/api/summary")
    def summary():
        return state.summary()

    if static_dir is not None and Path(static_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(static_dir), html=True), name="ui")
    else:

        @app.get("/", response_class=HTMLResponse)
        def index():
            return _PLACEHOLDER_PAGE

    return app


def serve(
    batch_path: str | Path,
    ratings_path: str | Path,
    port: int = DEFAULT_PORT,
    static_dir: Optional[str | Path] = None,
) -> None:
    import uvicorn

    app = create_app(batch_path, ratings_path, static_dir)
    uvicorn.run(app, host="127.0.0.1", port=port, log_level="warning")
