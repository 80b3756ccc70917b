"""Analysis sessions: dataset + normalization + named artifacts.

Each session owns one dataset (raw and normalized forms), a monotonically
increasing dataset version, and the models/rules derived from it. Replacing
the dataset bumps the version and explicitly invalidates every dependent
artifact and cached response — dependents never silently outlive their
inputs. Sessions serialize to JSON and reload across restarts.

Concurrency: reads are lock-free on immutable state; mutations of one
session are serialized by its lock (single writer).
"""

from __future__ import annotations

import json
import threading
import uuid
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from .dataset import Dataset, NormalizationSpec, load_csv, normalize


class SessionError(KeyError):
    pass


@dataclass
class Session:
    id: str
    raw: Dataset
    normalized: Dataset
    norm_spec: NormalizationSpec
    label_column: str | int
    seed: int = 0
    dataset_version: int = 1
    models: dict = dc_field(default_factory=dict)  # name -> model json
    rules: dict = dc_field(default_factory=dict)  # name -> rule json
    response_cache: dict = dc_field(default_factory=dict)
    lock: threading.Lock = dc_field(default_factory=threading.Lock, repr=False)

    def replace_dataset(self, raw: Dataset) -> None:
        norm, spec = normalize(raw)
        self.raw = raw
        self.normalized = norm
        self.norm_spec = spec
        self.dataset_version += 1
        # dependents reference the old dataset version: drop them explicitly
        self.models.clear()
        self.rules.clear()
        self.response_cache.clear()

    def to_json(self) -> dict:
        from .dataset import serialize_csv

        return {
            "id": self.id,
            "csv": serialize_csv(self.raw, label_name="class"),
            "label_column": "class",
            "seed": self.seed,
            "dataset_version": self.dataset_version,
            "models": self.models,
            "rules": self.rules,
        }

    @staticmethod
    def from_json(obj: dict) -> "Session":
        raw = load_csv(obj["csv"], label_column=obj["label_column"])
        norm, spec = normalize(raw)
        return Session(
            id=obj["id"],
            raw=raw,
            normalized=norm,
            norm_spec=spec,
            label_column=obj["label_column"],
            seed=obj.get("seed", 0),
            dataset_version=obj.get("dataset_version", 1),
            models=obj.get("models", {}),
            rules=obj.get("rules", {}),
        )


class SessionStore:
    """Disk-persisted session registry; stateless service apart from this."""

    def __init__(self, directory: str | Path) -> None:
        self.directory = Path(directory)
        self.directory.mkdir(parents=True, exist_ok=True)
        self._sessions: dict[str, Session] = {}
        self._registry_lock = threading.Lock()
        for path in sorted(self.directory.glob("*.json")):
            try:
                session = Session.from_json(json.loads(path.read_text()))
            except (ValueError, KeyError):
                continue  # unreadable snapshot; skip rather than crash the service
            self._sessions[session.id] = session

    def create(
        self, csv_text: str, label_column: str | int, seed: int = 0
    ) -> Session:
        raw = load_csv(csv_text, label_column=label_column)
        norm, spec = normalize(raw)
        session = Session(
            id=uuid.uuid4().hex,
            raw=raw,
            normalized=norm,
            norm_spec=spec,
            label_column=label_column,
            seed=seed,
        )
        with self._registry_lock:
            self._sessions[session.id] = session
        self.persist(session)
        return session

    def get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise SessionError(f"unknown session {session_id!r}") from None

    def persist(self, session: Session) -> None:
        path = self.directory / f"{session.id}.json"
        path.write_text(json.dumps(session.to_json(), sort_keys=True))

    def ids(self) -> list[str]:
        return sorted(self._sessions)
