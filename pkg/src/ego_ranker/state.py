"""Per-ego tournament snapshots that let event streams be ingested in sessions.

Layout of a state directory::

    meta.json           windowing and weights fixed by the first ingest
    egos/<ego>.json     tournament record + the still-open last window
    digests.log         source digest of every ingested batch

The last window seen for an ego stays open (its raw counts are kept) until
a later batch moves past it, so splitting a trace anywhere in time gives the
same record as ingesting it whole.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Iterable, Optional

from ._io import atomic_write, canonical, checksum, safe_name
from .config import RunConfig
from .errors import ConfigError, CorruptState, OutOfOrderBatch, TimestampBeforeEpoch
from .events import EventStream
from .pipeline import fold_cells
from .scoring import LOG_SIZE, InteractionWeights, WindowCounts, WindowSpec, aggregate_counts
from .tournament import TournamentRecord

FORMAT_VERSION = 1


@dataclass
class EgoState:
    record: TournamentRecord
    pending_window: Optional[int] = None
    pending: dict[str, WindowCounts] = field(default_factory=dict)

    @property
    def ego(self) -> str:
        return self.record.ego

    def finalized(self, weights: InteractionWeights) -> TournamentRecord:
        """The record as if the open window were closed now."""
        if self.pending_window is None:
            return self.record
        cells = {(f, self.pending_window): c for f, c in self.pending.items()}
        return fold_cells(self.record, cells, weights)

    def advance(self, cells: dict[tuple[str, int], WindowCounts], weights: InteractionWeights) -> "EgoState":
        """Add a batch of cells; every window but the newest is closed and played."""
        if not cells:
            return self
        first = min(w for _, w in cells)
        if self.pending_window is not None and first < self.pending_window:
            raise OutOfOrderBatch(
                f"ego {self.ego!r}: batch reaches back to window {first}, "
                f"but windows before {self.pending_window} are already closed"
            )
        merged: dict[tuple[str, int], WindowCounts] = {}
        if self.pending_window is not None:
            merged.update({(f, self.pending_window): c for f, c in self.pending.items()})
        for key, counts in cells.items():
            merged[key] = merged[key].merge(counts) if key in merged else counts
        last = max(w for _, w in merged)
        closed = {k: c for k, c in merged.items() if k[1] < last}
        record = fold_cells(self.record, closed, weights)
        pending = {f: c for (f, w), c in merged.items() if w == last}
        return EgoState(record, last, pending)

    def to_json(self) -> dict:
        body = {
            "format": FORMAT_VERSION,
            "ego": self.ego,
            "record": self.record.to_json(),
            "pending": None
            if self.pending_window is None
            else {
                "window": self.pending_window,
                "cells": [[f, *_counts_row(c)] for f, c in sorted(self.pending.items())],
            },
        }
        return {**body, "checksum": checksum(body)}

    @classmethod
    def from_json(cls, doc: dict) -> "EgoState":
        try:
            body = {k: v for k, v in doc.items() if k != "checksum"}
            if doc.get("checksum") != checksum(body):
                raise CorruptState(f"snapshot checksum mismatch for ego {doc.get('ego')!r}")
            if doc["format"] != FORMAT_VERSION:
                raise CorruptState(f"unsupported snapshot format {doc['format']!r}")
            record = TournamentRecord.from_json(doc["record"])
            if record.ego != doc["ego"]:
                raise CorruptState("snapshot ego does not match its record")
            pending = doc["pending"]
            if pending is None:
                return cls(record)
            cells = {row[0]: WindowCounts(*row[1:6], list(row[6])) for row in pending["cells"]}
            return cls(record, int(pending["window"]), cells)
        except (KeyError, TypeError, ValueError, IndexError) as exc:
            raise CorruptState(f"malformed snapshot: {exc!r}") from None


def _counts_row(c: WindowCounts) -> list:
    return [c.f, c.v, c.p, c.e_count, c.e_bytes, list(c.sizes)]


@dataclass
class IngestSummary:
    events: int = 0
    egos: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


class StateStore:
    def __init__(self, root):
        self.root = Path(root)

    @property
    def meta_path(self) -> Path:
        return self.root / "meta.json"

    @property
    def digest_log(self) -> Path:
        return self.root / "digests.log"

    def ego_path(self, ego: str) -> Path:
        return self.root / "egos" / f"{safe_name(ego)}.json"

    def exists(self) -> bool:
        return self.meta_path.exists()

    # metadata ------------------------------------------------------------

    def read_meta(self) -> Optional[dict]:
        if not self.meta_path.exists():
            return None
        doc = self._read_json(self.meta_path)
        body = {k: v for k, v in doc.items() if k != "checksum"}
        if doc.get("checksum") != checksum(body):
            raise CorruptState(f"{self.meta_path}: checksum mismatch")
        return body

    def window_spec(self, config: RunConfig, stream: EventStream | None = None) -> WindowSpec:
        """The windowing fixed by the first ingest, checked against ``config``."""
        meta = self.read_meta()
        if meta is None:
            return config.window_spec(stream)
        if meta["window_length"] != config.window_length:
            raise ConfigError(
                f"state uses {meta['window_length']}s windows but config asks for {config.window_length}s"
            )
        if config.epoch_start is not None and config.epoch_start != meta["epoch_start"]:
            raise ConfigError(f"state epoch_start {meta['epoch_start']} differs from config {config.epoch_start}")
        if meta["weights"] != asdict(config.weights):
            raise ConfigError("state was built with different interaction weights")
        return WindowSpec(meta["window_length"], meta["epoch_start"])

    def _write_meta(self, spec: WindowSpec, weights: InteractionWeights) -> None:
        body = {"window_length": spec.window_length, "epoch_start": spec.epoch_start, "weights": asdict(weights)}
        atomic_write(self.meta_path, json.dumps({**body, "checksum": checksum(body)}, indent=2) + "\n")

    # snapshots -----------------------------------------------------------

    def _read_json(self, path: Path) -> dict:
        try:
            return json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise CorruptState(f"{path}: not valid JSON ({exc.msg})") from None

    def load(self, ego: str) -> EgoState:
        path = self.ego_path(ego)
        if not path.exists():
            return EgoState(TournamentRecord(ego))
        state = EgoState.from_json(self._read_json(path))
        if state.ego != ego:
            raise CorruptState(f"{path} holds ego {state.ego!r}, expected {ego!r}")
        return state

    def save(self, state: EgoState) -> None:
        atomic_write(self.ego_path(state.ego), canonical(state.to_json()) + "\n")

    def egos(self) -> list[str]:
        folder = self.root / "egos"
        if not folder.is_dir():
            return []
        return sorted(self._read_json(p)["ego"] for p in folder.glob("*.json"))

    def seen_digests(self) -> set[str]:
        if not self.digest_log.exists():
            return set()
        return {line.split("\t", 1)[0] for line in self.digest_log.read_text(encoding="utf-8").splitlines() if line}

    # ingest --------------------------------------------------------------

    def ingest(
        self, stream: EventStream, config: RunConfig, egos: Iterable[str] | None = None, source: str = "-"
    ) -> IngestSummary:
        """Fold a batch into the snapshots of ``egos`` (default: everyone in the batch).

        Every snapshot is validated and computed before any file is written.
        """
        summary = IngestSummary(events=len(stream))
        spec = self.window_spec(config, stream)
        if stream.source_digest in self.seen_digests():
            summary.warnings.append(f"source digest {stream.source_digest[:12]} was already ingested; counts will double")
        targets = sorted(stream.users()) if egos is None else sorted(set(egos))
        keep = config.weights.size_scaling == LOG_SIZE
        updated = []
        for ego in targets:
            try:
                cells = aggregate_counts(stream, ego, spec, keep_sizes=keep)
            except TimestampBeforeEpoch as exc:
                raise OutOfOrderBatch(str(exc)) from None
            if not cells:
                continue
            updated.append(self.load(ego).advance(cells, config.weights))
        self.root.mkdir(parents=True, exist_ok=True)
        if self.read_meta() is None:
            self._write_meta(spec, config.weights)
        for state in updated:
            self.save(state)
        with self.digest_log.open("a", encoding="utf-8") as fh:
            fh.write(f"{stream.source_digest}\t{source}\n")
        summary.egos = [s.ego for s in updated]
        return summary
