"""Blinded grading sessions backed by an append-only JSONL event log.

Every state change is an event (session_created, judgment, completed);
replaying the log reconstructs the in-memory state exactly, so a crashed
service resumes where it stopped. Image paths and true labels live only
server-side; graders see opaque tokens.
"""

from __future__ import annotations

import json
import os
import threading
import time
import uuid
from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateSampleError, ValidationError
from ..imagecore import DatasetManifest, read_manifest
from ..statlab import ContingencyTable2x2, TestResult, chi_square_2x2


def _chi_square_or_none(table: ContingencyTable2x2) -> TestResult | None:
    """Chi-square of a grading table; None when a marginal is zero.

    A perfectly graded session has an empty 'incorrect' column, which makes
    the independence test undefined; the table itself is still reported.
    """
    try:
        return chi_square_2x2(table, yates=False)
    except DegenerateSampleError:
        return None

LOG_SCHEMA_VERSION = 1

JUDGED_LABELS = ("real", "fake")


class SequenceError(ValidationError):
    """Judgment index does not match the session cursor."""


class SessionStateError(ValidationError):
    """Operation is invalid for the session's current status."""


class NotFoundError(ValidationError):
    """Unknown session or image token."""


class ConflictError(ValidationError):
    """Session id already in use."""


@dataclass
class SessionItem:
    token: str
    path: str
    true_label: str  # real | synthetic


@dataclass
class TuringSession:
    id: str
    items: list[SessionItem]
    seed: int
    grader: str = ""
    judgments: list[tuple[int, str, float]] = field(default_factory=list)

    @property
    def cursor(self) -> int:
        return len(self.judgments)

    @property
    def total(self) -> int:
        return len(self.items)

    @property
    def status(self) -> str:
        return "complete" if self.cursor >= self.total else "active"

    def table(self) -> ContingencyTable2x2:
        counts = [[0, 0], [0, 0]]
        for idx, judged, _ in self.judgments:
            item = self.items[idx]
            row = 0 if item.true_label == "real" else 1
            # "real" judgment is correct for real items; "fake" for synthetic
            correct = (judged == "real") == (item.true_label == "real")
            counts[row][0 if correct else 1] += 1
        return ContingencyTable2x2(counts=(tuple(counts[0]), tuple(counts[1])))


def aggregate_tables(tables: list[ContingencyTable2x2]) -> ContingencyTable2x2:
    """Cell-wise sum over completed-session tables."""
    acc = [[0, 0], [0, 0]]
    for t in tables:
        for i in range(2):
            for j in range(2):
                acc[i][j] += t.counts[i][j]
    return ContingencyTable2x2(counts=(tuple(acc[0]), tuple(acc[1])))


class TuringStore:
    """Session registry with JSONL persistence. Thread-safe."""

    def __init__(self, log_path: str | None = None):
        self.log_path = log_path
        self.sessions: dict[str, TuringSession] = {}
        self.tokens: dict[str, str] = {}  # token -> image path
        self._lock = threading.Lock()

    # -- persistence --------------------------------------------------------

    def _append(self, event: dict) -> None:
        if self.log_path is None:
            return
        event = {"v": LOG_SCHEMA_VERSION, **event}
        with open(self.log_path, "a") as fh:
            fh.write(json.dumps(event, sort_keys=True) + "\n")
            fh.flush()
            os.fsync(fh.fileno())

    @classmethod
    def replay(cls, log_path: str) -> "TuringStore":
        """Reconstruct a store purely from its event log."""
        store = cls(log_path=None)
        if os.path.exists(log_path):
            with open(log_path) as fh:
                for line in fh:
                    line = line.strip()
                    if not line:
                        continue
                    ev = json.loads(line)
                    store._apply(ev)
        store.log_path = log_path
        return store

    def _apply(self, ev: dict) -> None:
        kind = ev["type"]
        if kind == "session_created":
            s = ev["session"]
            items = [SessionItem(token=i["token"], path=i["path"], true_label=i["label"])
                     for i in s["items"]]
            sess = TuringSession(id=s["id"], items=items, seed=s["seed"],
                                 grader=s.get("grader", ""))
            self.sessions[sess.id] = sess
            for item in items:
                self.tokens[item.token] = item.path
        elif kind == "judgment":
            sess = self.sessions[ev["session_id"]]
            sess.judgments.append((ev["index"], ev["label"], ev["t"]))
        elif kind == "completed":
            pass  # derived from judgment count; kept for auditability

    # -- operations ---------------------------------------------------------

    def create_session(self, real_manifest: str, synth_manifest: str,
                       n_real: int, n_synth: int, seed: int,
                       session_id: str | None = None, grader: str = "") -> TuringSession:
        real = read_manifest(real_manifest)
        synth = read_manifest(synth_manifest)
        real_paths = real.paths("real")
        synth_paths = synth.paths("synthetic")
        if n_real < 1 or n_synth < 1:
            raise ValidationError("n_real and n_synth must be >= 1")
        if len(real_paths) < n_real:
            raise ValidationError(f"real manifest has {len(real_paths)} images, need {n_real}")
        if len(synth_paths) < n_synth:
            raise ValidationError(f"synth manifest has {len(synth_paths)} images, need {n_synth}")

        rng = np.random.default_rng(seed)
        picked = ([(p, "real") for p in
                   (real_paths[i] for i in rng.choice(len(real_paths), n_real, replace=False))]
                  + [(p, "synthetic") for p in
                     (synth_paths[i] for i in rng.choice(len(synth_paths), n_synth, replace=False))])
        order = rng.permutation(len(picked))
        items = [SessionItem(token=uuid.uuid4().hex, path=picked[i][0], true_label=picked[i][1])
                 for i in order]

        with self._lock:
            sid = session_id or uuid.uuid4().hex
            if sid in self.sessions:
                raise ConflictError(f"session id {sid!r} already exists")
            sess = TuringSession(id=sid, items=items, seed=seed, grader=grader)
            self.sessions[sid] = sess
            for item in items:
                self.tokens[item.token] = item.path
            self._append({"type": "session_created", "session": {
                "id": sid, "seed": seed, "grader": grader,
                "items": [{"token": i.token, "path": i.path, "label": i.true_label}
                          for i in items]}})
        return sess

    def get(self, session_id: str) -> TuringSession:
        sess = self.sessions.get(session_id)
        if sess is None:
            raise NotFoundError(f"unknown session {session_id!r}")
        return sess

    def image_path(self, token: str) -> str:
        path = self.tokens.get(token)
        if path is None:
            raise NotFoundError("unknown image token")
        return path

    def next_item(self, session_id: str) -> dict:
        """Blinded view of the item at the cursor; no true label ever."""
        sess = self.get(session_id)
        if sess.status == "complete":
            return {"session_id": sess.id, "status": "complete",
                    "total": sess.total, "index": sess.total}
        item = sess.items[sess.cursor]
        return {"session_id": sess.id, "status": "active", "index": sess.cursor,
                "total": sess.total, "image_token": item.token}

    def submit_judgment(self, session_id: str, item_index: int, judged_label: str) -> dict:
        if judged_label not in JUDGED_LABELS:
            raise ValidationError(f"judged label must be one of {JUDGED_LABELS}")
        with self._lock:
            sess = self.get(session_id)
            # duplicate guard: resubmitting the judgment just recorded is a no-op
            if (sess.judgments and item_index == sess.cursor - 1
                    and sess.judgments[-1][1] == judged_label):
                return {"session_id": sess.id, "cursor": sess.cursor,
                        "status": sess.status, "duplicate": True}
            if sess.status == "complete":
                raise SessionStateError(f"session {session_id!r} is complete")
            if item_index != sess.cursor:
                raise SequenceError(
                    f"expected judgment for index {sess.cursor}, got {item_index}")
            t = time.time()
            sess.judgments.append((item_index, judged_label, t))
            self._append({"type": "judgment", "session_id": sess.id,
                          "index": item_index, "label": judged_label, "t": t})
            if sess.status == "complete":
                self._append({"type": "completed", "session_id": sess.id})
            return {"session_id": sess.id, "cursor": sess.cursor,
                    "status": sess.status, "duplicate": False}

    def session_report(self, session_id: str) -> tuple[ContingencyTable2x2, TestResult | None]:
        sess = self.get(session_id)
        if sess.status != "complete":
            raise SessionStateError(f"session {session_id!r} is not complete")
        table = sess.table()
        return table, _chi_square_or_none(table)

    def aggregate_report(self, session_ids: list[str]) -> tuple[ContingencyTable2x2, TestResult | None]:
        tables = [self.session_report(sid)[0] for sid in session_ids]
        table = aggregate_tables(tables)
        return table, _chi_square_or_none(table)
