"""HTTP JSON service exposing the library to scripts and the explorer UI.

Contract notes:

* every response carries the session's current dataset_version; requests
  may send the version they were built against and get 409 when stale;
* session-scoped POSTs are idempotent per request body: identical bodies
  return the stored prior result (the computations are seeded and pure, so
  this is also a cache);
* all analytics happen here — the UI renders numbers it got from the
  service, never ones it computed.
"""

from __future__ import annotations

import json
from typing import Any

import numpy as np
from fastapi import FastAPI, HTTPException, Request, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from . import coords, cpcr, glcl, jl, rules
from .config import Config
from .dataset import Dataset, DatasetError
from .render import RenderSpec, render_glc_l, render_graphs, render_rule_overlay
from .sessions import Session, SessionError, SessionStore

DomainErrors = (
    DatasetError,
    coords.CoordsError,
    glcl.ModelError,
    rules.RuleError,
    jl.BoundsError,
    cpcr.CpcrError,
    ValueError,
)


class CreateSession(BaseModel):
    csv: str
    label_column: str | int = "class"
    seed: int = 0


class EncodeRequest(BaseModel):
    system: str
    pairing: list[list[int]] | None = None
    offsets: list[list[float]] | list[float] | None = None
    angles: list[float] | None = None
    normalized: bool = True
    dataset_version: int | None = None


class DecodeRequest(BaseModel):
    graph: dict
    dataset_version: int | None = None


class TrainRequest(BaseModel):
    seed: int | None = None
    restarts: int = 8
    max_iters: int = 60
    positive_class: str | None = None
    negative_class: str | None = None
    name: str = "default"
    dataset_version: int | None = None


class AnglesRequest(BaseModel):
    angles: list[float]
    signs: list[int] | None = None
    threshold: float | None = None
    positive_class: str | None = None
    negative_class: str | None = None
    dataset_version: int | None = None


class RuleEvalRequest(BaseModel):
    rule: dict
    pairing: list[list[int]] | None = None
    name: str | None = None
    dataset_version: int | None = None


class FspRequest(BaseModel):
    seed: int | None = None
    max_pairings: int = 1000
    keep: int = 12
    quantiles: int = 10
    max_clauses: int = 3
    name: str = "default"
    dataset_version: int | None = None


class ExplainRequest(BaseModel):
    row: int
    k: int = 2
    model: str = "default"
    dataset_version: int | None = None


def _dataset_summary(session: Session) -> dict:
    d = session.raw
    return {
        "attributes": [
            {"name": a.name, "min": a.observed_min, "max": a.observed_max}
            for a in d.attributes
        ],
        "n_rows": d.n_rows,
        "classes": list(d.class_set),
        "class_counts": d.class_counts(),
        "dropped_rows": d.dropped_rows,
        "labels": list(d.labels),
    }


def _pairing_from(body_pairing: list[list[int]] | None, m: int):
    if body_pairing is None:
        return coords.identity_pairing(m + m % 2)
    return tuple(tuple(int(v) for v in pair) for pair in body_pairing)


def create_app(config: Config = Config()) -> FastAPI:
    app = FastAPI(title="glcvis service", version="0.1.0")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=list(config.cors_origins),
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = SessionStore(config.sessions_dir)
    app.state.store = store
    app.state.config = config

    def get_session(session_id: str) -> Session:
        try:
            return store.get(session_id)
        except SessionError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc

    def check_version(session: Session, requested: int | None) -> None:
        if requested is not None and requested != session.dataset_version:
            raise HTTPException(
                status_code=409,
                detail=(
                    f"dataset version {requested} is stale; "
                    f"current is {session.dataset_version}"
                ),
            )

    def cached(session: Session, key_obj: Any, compute) -> dict:
        """Idempotency per (session, request body): replay stored results."""
        key = json.dumps(key_obj, sort_keys=True, default=str)
        if key in session.response_cache:
            return session.response_cache[key]
        result = compute()
        result["dataset_version"] = session.dataset_version
        with session.lock:
            session.response_cache[key] = result
        return result

    def wrap_domain_errors(fn):
        try:
            return fn()
        except HTTPException:
            raise
        except DomainErrors as exc:
            raise HTTPException(status_code=422, detail=str(exc)) from exc

    @app.get("/healthz")
    def healthz() -> dict:
        return {"status": "ok", "sessions": len(store.ids())}

    # session-less calculators so the UI never computes bounds locally
    @app.get("/jl/min-dim")
    def jl_min_dim(m: int, eps: float) -> dict:
        def run():
            return jl.min_dimension(m, eps).to_json()

        return wrap_domain_errors(run)

    @app.get("/jl/max-points")
    def jl_max_points(k: int, eps: float) -> dict:
        def run():
            return {"k": k, "epsilon": eps, "max_points": jl.max_points(k, eps)}

        return wrap_domain_errors(run)

    @app.post("/sessions")
    def create_session(body: CreateSession) -> dict:
        def run():
            session = store.create(body.csv, body.label_column, seed=body.seed)
            if session.raw.n_rows > config.row_cap:
                raise DatasetError(
                    f"dataset exceeds the row cap ({config.row_cap})"
                )
            return {
                "id": session.id,
                "dataset_version": session.dataset_version,
                "summary": _dataset_summary(session),
            }

        return wrap_domain_errors(run)

    @app.get("/sessions/{session_id}/dataset")
    def get_dataset(session_id: str) -> dict:
        session = get_session(session_id)
        return {
            "dataset_version": session.dataset_version,
            "summary": _dataset_summary(session),
            "normalized_rows": [[float(v) for v in row] for row in session.normalized.rows],
        }

    @app.put("/sessions/{session_id}/dataset")
    def replace_dataset(session_id: str, body: CreateSession) -> dict:
        session = get_session(session_id)

        def run():
            from .dataset import load_csv

            raw = load_csv(body.csv, label_column=body.label_column)
            if raw.n_rows > config.row_cap:
                raise DatasetError(f"dataset exceeds the row cap ({config.row_cap})")
            with session.lock:
                session.replace_dataset(raw)
            store.persist(session)
            return {
                "id": session.id,
                "dataset_version": session.dataset_version,
                "summary": _dataset_summary(session),
            }

        return wrap_domain_errors(run)

    @app.post("/sessions/{session_id}/encode")
    def encode(session_id: str, body: EncodeRequest) -> dict:
        session = get_session(session_id)
        check_version(session, body.dataset_version)

        def run():
            d = session.normalized if body.normalized else session.raw
            pairing = (
                _pairing_from(body.pairing, d.n_attributes)
                if body.system in ("cpc", "spc")
                else None
            )
            offsets = np.asarray(body.offsets, dtype=float) if body.offsets else None
            angles = np.asarray(body.angles, dtype=float) if body.angles else None
            graphs = [
                coords.encode(body.system, row, pairing=pairing, offsets=offsets, angles=angles)
                for row in d.rows
            ]
            return {
                "system": body.system,
                "graphs": [g.to_json() for g in graphs],
                "labels": list(d.labels),
            }

        return cached(session, {"op": "encode", "body": body.model_dump()}, lambda: wrap_domain_errors(run))

    @app.post("/sessions/{session_id}/decode")
    def decode_graph(session_id: str, body: DecodeRequest) -> dict:
        session = get_session(session_id)
        check_version(session, body.dataset_version)

        def run():
            graph = coords.GlcGraph.from_json(body.graph)
            vector = coords.decode(graph)
            return {"vector": [float(v) for v in vector]}

        result = wrap_domain_errors(run)
        result["dataset_version"] = session.dataset_version
        return result

    @app.post("/sessions/{session_id}/glcl/train")
    def glcl_train(session_id: str, body: TrainRequest) -> dict:
        session = get_session(session_id)
        check_version(session, body.dataset_version)

        def run():
            cfg = glcl.TrainConfig(
                restarts=body.restarts,
                max_iters=body.max_iters,
                seed=body.seed if body.seed is not None else session.seed,
            )
            result = glcl.train(
                session.normalized,
                positive_class=body.positive_class,
                negative_class=body.negative_class,
                cfg=cfg,
            )
            model_json = result.model.to_json()
            with session.lock:
                session.models[body.name] = model_json
            store.persist(session)
            return {
                "name": body.name,
                "model": model_json,
                "accuracy": result.accuracy,
                "angles": [float(a) for a in result.model.angles],
            }

        return cached(session, {"op": "train", "body": body.model_dump()}, lambda: wrap_domain_errors(run))

    @app.post("/sessions/{session_id}/glcl/angles")
    def glcl_angles(session_id: str, body: AnglesRequest) -> dict:
        session = get_session(session_id)
        check_version(session, body.dataset_version)

        def run():
            d = session.normalized
            angles = np.asarray(body.angles, dtype=float)
            if angles.size != d.n_attributes:
                raise glcl.ModelError(
                    f"need {d.n_attributes} angles, got {angles.size}"
                )
            signs = (
                np.asarray(body.signs, dtype=float)
                if body.signs is not None
                else np.ones(angles.size)
            )
            if signs.size != angles.size or np.any(np.abs(signs) != 1):
                raise glcl.ModelError("signs must be +1/-1, one per attribute")
            coeffs = np.cos(angles) * signs
            classes = d.class_set
            positive = body.positive_class or (classes[1] if len(classes) > 1 else classes[0])
            negative = body.negative_class or classes[0]
            u = d.rows @ coeffs
            is_pos = d.label_mask(positive)
            if body.threshold is not None:
                threshold = float(body.threshold)
                correct = int(np.sum((u > threshold) == is_pos))
            else:
                threshold, correct = glcl.best_threshold(u, is_pos)
            model = glcl.LinearModel(
                coefficients=np.clip(coeffs, -1, 1),
                threshold=threshold,
                positive_class=positive,
                negative_class=negative,
                attribute_names=d.attribute_names,
            )
            return {
                "projections": [float(v) for v in u],
                "threshold": threshold,
                "accuracy": correct / d.n_rows,
                "model": model.to_json(),
            }

        return cached(session, {"op": "angles", "body": body.model_dump()}, lambda: wrap_domain_errors(run))

    @app.post("/sessions/{session_id}/rules/eval")
    def rules_eval(session_id: str, body: RuleEvalRequest) -> dict:
        session = get_session(session_id)
        check_version(session, body.dataset_version)

        def run():
            rule = rules.RectRule.from_json(body.rule)
            d = session.normalized
            pairing = _pairing_from(body.pairing, d.n_attributes)
            report = rules.evaluate_rule(rule, d, pairing)
            if body.name:
                with session.lock:
                    session.rules[body.name] = {
                        "rule": rule.to_json(),
                        "pairing": [list(p) for p in pairing],
                    }
                store.persist(session)
            return {
                "report": report.to_json(),
                "accuracy": report.accuracy,
                "text": rule.describe(d.attribute_names, pairing),
            }

        return cached(session, {"op": "rules_eval", "body": body.model_dump()}, lambda: wrap_domain_errors(run))

    @app.post("/sessions/{session_id}/fsp")
    def fsp(session_id: str, body: FspRequest) -> dict:
        session = get_session(session_id)
        check_version(session, body.dataset_version)

        def run():
            cfg = rules.FspConfig(
                seed=body.seed if body.seed is not None else session.seed,
                max_pairings=body.max_pairings,
                keep=body.keep,
                quantiles=body.quantiles,
                max_clauses=body.max_clauses,
            )
            result = rules.fsp_search(session.normalized, cfg)
            payload = {
                "pairing": [list(p) for p in result.pairing],
                "rule": result.rule.to_json(),
                "report": result.report.to_json(),
                "accuracy": result.report.accuracy,
                "text": result.rule.describe(
                    session.normalized.attribute_names, result.pairing
                ),
            }
            with session.lock:
                session.rules[body.name] = {
                    "rule": payload["rule"],
                    "pairing": payload["pairing"],
                }
            store.persist(session)
            return payload

        return cached(session, {"op": "fsp", "body": body.model_dump()}, lambda: wrap_domain_errors(run))

    @app.post("/sessions/{session_id}/explain")
    def explain(session_id: str, body: ExplainRequest) -> dict:
        session = get_session(session_id)
        check_version(session, body.dataset_version)

        def run():
            if body.model not in session.models:
                raise glcl.ModelError(f"no trained model named {body.model!r}")
            model = glcl.LinearModel.from_json(session.models[body.model])
            d = session.normalized
            if not 0 <= body.row < d.n_rows:
                raise glcl.ModelError(f"row {body.row} out of range")
            diff = glcl.explain_misclassified(
                d.rows[body.row], d.labels[body.row], d, model, k=body.k
            )
            return {"diff": diff.to_json()}

        return cached(session, {"op": "explain", "body": body.model_dump()}, lambda: wrap_domain_errors(run))

    @app.get("/sessions/{session_id}/render/{kind}")
    def render(
        session_id: str,
        kind: str,
        model: str = "default",
        rule: str | None = None,
        normalized: bool = True,
    ) -> Response:
        session = get_session(session_id)

        def run() -> str:
            d = session.normalized if normalized else session.raw
            if kind == "glcl":
                if model not in session.models:
                    raise glcl.ModelError(f"no trained model named {model!r}")
                lin = glcl.LinearModel.from_json(session.models[model])
                return render_glc_l(d, lin)
            if kind not in coords.SYSTEMS:
                raise coords.CoordsError(f"unknown render kind {kind!r}")
            graphs = [coords.encode(kind, row) for row in d.rows]
            svg = render_graphs(graphs, list(d.labels))
            if rule is not None:
                if rule not in session.rules:
                    raise rules.RuleError(f"no stored rule named {rule!r}")
                stored = rules.RectRule.from_json(session.rules[rule]["rule"])
                svg = render_rule_overlay(svg, stored)
            return svg

        svg = wrap_domain_errors(run)
        return Response(
            content=svg,
            media_type="image/svg+xml",
            headers={"X-Dataset-Version": str(session.dataset_version)},
        )

    return app


def serve(config: Config) -> None:  # pragma: no cover - exercised manually
    import uvicorn

    uvicorn.run(create_app(config), host=config.host, port=config.port, log_level="warning")
