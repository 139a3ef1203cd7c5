"""In-process asynchronous message fabric.

Messages live in a pending multiset; a scheduling policy picks which one
to deliver next, so interleavings across peers are fully adversarial
(including LIFO). Delivery is exactly-once. Each message carries a
remaining time-to-live: the receiving handler's processing cost is
subtracted from the TTL of every message it induces, and messages whose
TTL is exhausted are dropped silently (recorded in the run report).

The reference scheduler is single-threaded and, with the unit cost model,
fully deterministic for a given seed.
"""

from __future__ import annotations

import random
import time
from dataclasses import dataclass, field
from typing import Callable

POLICIES = ("random", "per-pair-fifo", "lifo")
COST_MODELS = ("unit", "wallclock")

UNIT_COST_MS = 1.0


@dataclass(frozen=True)
class ScheduleConfig:
    seed: int = 0
    policy: str = "random"
    ttl_budget_ms: float | None = None
    cost_model: str = "unit"

    def __post_init__(self):
        if self.policy not in POLICIES:
            raise ValueError(f"unknown policy {self.policy!r}")
        if self.cost_model not in COST_MODELS:
            raise ValueError(f"unknown cost model {self.cost_model!r}")


@dataclass
class RunReport:
    delivered: int = 0
    dropped: int = 0
    timed_out: bool = False
    model_time_ms: float = 0.0


@dataclass
class TraceRecord:
    seq: int
    message: object
    model_time_ms: float
    induced_forth_receivers: tuple[str, ...] = ()

    def line(self) -> str:
        m = self.message
        payload = "true" if m.kind == "final" else str(m.payload)
        return f"{self.seq} {m.sender} {m.receiver} {m.kind} {len(m.hist)} {payload}"


class HandlerFault(RuntimeError):
    """A peer handler raised; the triggering message is attached."""

    def __init__(self, message, cause: BaseException):
        super().__init__(f"handler fault on {message}: {cause!r}")
        self.message = message
        self.cause = cause


class Fabric:
    """Mailbox multiset plus scheduler for one query run.

    handlers map peer ids to ``handler(msg) -> list[msg]``; sinks are
    terminal consumers (the user endpoint) called as ``sink(msg,
    model_time_ms)`` and induce nothing.
    """

    def __init__(
        self,
        handlers: dict[str, Callable],
        cfg: ScheduleConfig = ScheduleConfig(),
        sinks: dict[str, Callable] | None = None,
        keep_trace: bool = False,
        trace_file=None,
    ):
        self.handlers = handlers
        self.sinks = sinks or {}
        self.cfg = cfg
        self.rng = random.Random(cfg.seed)
        self.pending: list[tuple[object, float | None]] = []
        self.report = RunReport()
        self.records: list[TraceRecord] = [] if keep_trace else None
        self.trace_file = trace_file
        self._seq = 0
        self._in_handler = False

    def inject(self, msg) -> None:
        self.pending.append((msg, self.cfg.ttl_budget_ms))

    def detect_quiescence(self) -> bool:
        return not self.pending and not self._in_handler

    def _select(self) -> int:
        if self.cfg.policy == "random":
            return self.rng.randrange(len(self.pending))
        if self.cfg.policy == "lifo":
            return len(self.pending) - 1
        return 0

    def run_until_quiescent(self) -> RunReport:
        while self.pending:
            msg, ttl = self.pending.pop(self._select())
            receiver = msg.receiver
            self._in_handler = True
            try:
                if receiver in self.sinks:
                    # Sinks are terminal endpoints; they do no reasoning
                    # work, so they are charged the unit cost.
                    induced = []
                    cost = UNIT_COST_MS if self.cfg.cost_model == "unit" else 0.0
                    self.sinks[receiver](msg, self.report.model_time_ms + cost)
                else:
                    try:
                        handler = self.handlers[receiver]
                    except KeyError:
                        raise HandlerFault(msg, KeyError(f"no handler for {receiver!r}"))
                    t0 = time.perf_counter()
                    try:
                        induced = handler(msg)
                    except HandlerFault:
                        raise
                    except Exception as exc:
                        raise HandlerFault(msg, exc) from exc
                    cost = (
                        UNIT_COST_MS
                        if self.cfg.cost_model == "unit"
                        else (time.perf_counter() - t0) * 1000.0
                    )
            finally:
                self._in_handler = False
            self.report.delivered += 1
            self.report.model_time_ms += cost
            forth_receivers = []
            for im in induced:
                if ttl is None:
                    self.pending.append((im, None))
                else:
                    remaining = ttl - cost
                    if remaining <= 0:
                        self.report.dropped += 1
                        self.report.timed_out = True
                        continue
                    self.pending.append((im, remaining))
                if im.kind == "forth":
                    forth_receivers.append(im.receiver)
            self._trace(msg, tuple(forth_receivers))
        return self.report

    def _trace(self, msg, forth_receivers: tuple[str, ...]) -> None:
        if self.records is None and self.trace_file is None:
            return
        rec = TraceRecord(
            seq=self._seq,
            message=msg,
            model_time_ms=self.report.model_time_ms,
            induced_forth_receivers=forth_receivers,
        )
        self._seq += 1
        if self.records is not None:
            self.records.append(rec)
        if self.trace_file is not None:
            self.trace_file.write(rec.line() + "\n")
