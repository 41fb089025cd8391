"""The active-learning boundary: query queue and answer collection.

Queries can be resolved interactively on a terminal, from a scripted answers
file keyed by stable candidate keys, through the HTTP service (another thread
answers while the engine blocks), or automatically with "dont_know" so the
whole pipeline runs headless and deterministic.
"""

from __future__ import annotations

import json
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

ANSWERS = ("yes", "no", "dont_know")
MODES = ("interactive", "scripted", "service", "auto_dont_know")


class OracleError(ValueError):
    pass


@dataclass
class OracleQuery:
    id: str
    kind: str  # pattern | relation | entity | conflict
    relation_name: str
    payload: dict
    context: list[dict] = field(default_factory=list)
    status: str = "pending"
    answer: str | None = None
    iteration: int = 0

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind,
            "relation_name": self.relation_name,
            "payload": self.payload,
            "context": self.context,
            "status": self.status,
            "answer": self.answer,
            "iteration": self.iteration,
        }


class OracleQueue:
    """FIFO query queue; answering may happen from another thread."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._changed = threading.Condition(self._lock)
        self._queries: dict[str, OracleQuery] = {}

    def enqueue(self, queries: list[OracleQuery]) -> list[str]:
        with self._lock:
            for q in queries:
                if q.id in self._queries:
                    raise OracleError(f"duplicate query id {q.id!r}")
            for q in queries:
                self._queries[q.id] = q
            self._changed.notify_all()
        return [q.id for q in queries]

    def get(self, query_id: str) -> OracleQuery:
        with self._lock:
            return self._queries[query_id]

    def pending(self) -> list[OracleQuery]:
        with self._lock:
            return [q for q in self._queries.values() if q.status == "pending"]

    def answer(self, query_id: str, answer: str) -> OracleQuery:
        if answer not in ANSWERS:
            raise OracleError(f"unknown answer {answer!r}")
        with self._lock:
            query = self._queries.get(query_id)
            if query is None:
                raise KeyError(query_id)
            if query.status != "pending":
                raise OracleError(f"query {query_id!r} is not pending")
            query.status = "answered"
            query.answer = answer
            self._changed.notify_all()
            return query

    def expire_pending(self) -> None:
        with self._lock:
            for q in self._queries.values():
                if q.status == "pending":
                    q.status = "expired"
            self._changed.notify_all()

    def wait_until_resolved(self, ids: list[str], timeout: float | None) -> None:
        deadline = None if timeout is None else time.monotonic() + timeout
        with self._lock:
            while any(self._queries[i].status == "pending" for i in ids):
                remaining = None if deadline is None else deadline - time.monotonic()
                if remaining is not None and remaining <= 0:
                    return
                self._changed.wait(remaining)


def load_answers_file(path: str | Path) -> dict[str, str]:
    """JSON map candidate-key -> yes|no|dont_know."""
    path = Path(path)
    try:
        data = json.loads(path.read_text("utf-8"))
    except json.JSONDecodeError as exc:
        raise OracleError(f"{path}: line {exc.lineno}: invalid JSON: {exc.msg}") from None
    if not isinstance(data, dict):
        raise OracleError(f"{path}: answers file must be a JSON object")
    for key, value in data.items():
        if value not in ANSWERS:
            raise OracleError(f"{path}: invalid answer {value!r} for key {key!r}")
    return data


def _render_query(query: OracleQuery) -> str:
    lines = [f"[{query.kind}] {query.relation_name}: {query.payload.get('description', '')}"]
    for ctx in query.context:
        lines.append(f"    ... {ctx['text']}")
    return "\n".join(lines)


def resolve_all(
    queue: OracleQueue,
    mode: str,
    answers: dict[str, str] | None = None,
    timeout: float | None = None,
    input_fn: Callable[[str], str] = input,
    print_fn: Callable[[str], None] = print,
) -> dict[str, str]:
    """Resolve every pending query and return a map query id -> answer.

    Scripted lookups miss -> dont_know; service timeouts expire the query and
    count as dont_know.
    """
    if mode not in MODES:
        raise OracleError(f"unknown oracle mode {mode!r}")
    pending = queue.pending()
    resolved: dict[str, str] = {}
    if mode == "auto_dont_know":
        for q in pending:
            queue.answer(q.id, "dont_know")
            resolved[q.id] = "dont_know"
    elif mode == "scripted":
        answers = answers if answers is not None else {}
        for q in pending:
            answer = answers.get(q.payload.get("key", ""), "dont_know")
            queue.answer(q.id, answer)
            resolved[q.id] = answer
    elif mode == "interactive":
        for q in pending:
            print_fn(_render_query(q))
            answer = ""
            while answer not in ANSWERS:
                raw = input_fn("  yes / no / dont_know [d]? ").strip().lower()
                answer = {"y": "yes", "n": "no", "d": "dont_know", "": "dont_know"}.get(raw, raw)
            queue.answer(q.id, answer)
            resolved[q.id] = answer
    else:  # service
        ids = [q.id for q in pending]
        queue.wait_until_resolved(ids, timeout)
        queue.expire_pending()
        for i in ids:
            q = queue.get(i)
            resolved[i] = q.answer if q.status == "answered" else "dont_know"
    return resolved


class Oracle:
    """Bundles a queue with a resolution mode; the engine's only human contact."""

    def __init__(
        self,
        mode: str = "auto_dont_know",
        answers: dict[str, str] | None = None,
        queue: OracleQueue | None = None,
        timeout: float | None = None,
        input_fn: Callable[[str], str] = input,
        print_fn: Callable[[str], None] = print,
    ) -> None:
        if mode not in MODES:
            raise OracleError(f"unknown oracle mode {mode!r}")
        self.mode = mode
        self.answers = answers if answers is not None else {}
        self.queue = queue if queue is not None else OracleQueue()
        self.timeout = timeout
        self.input_fn = input_fn
        self.print_fn = print_fn
        self._next_id = 0

    def make_query(
        self,
        kind: str,
        relation_name: str,
        payload: dict,
        context: list[dict],
        iteration: int,
    ) -> OracleQuery:
        self._next_id += 1
        return OracleQuery(
            id=f"q{self._next_id:05d}",
            kind=kind,
            relation_name=relation_name,
            payload=payload,
            context=context,
            iteration=iteration,
        )

    def ask(self, queries: list[OracleQuery]) -> dict[str, str]:
        """Enqueue, resolve, and return a map candidate-key -> answer."""
        if not queries:
            return {}
        self.queue.enqueue(queries)
        resolved = resolve_all(
            self.queue,
            self.mode,
            answers=self.answers,
            timeout=self.timeout,
            input_fn=self.input_fn,
            print_fn=self.print_fn,
        )
        return {
            q.payload["key"]: resolved[q.id] for q in queries if q.id in resolved
        }
