"""Per-peer message-passing consequence finding.

Each peer is a single-threaded state machine reacting to three message
kinds: ``forth`` propagates a literal to a peer that shares its variable,
``back`` returns a consequence (a clause over target variables) along the
branch that produced it, and ``final`` notifies the upstream peer that a
branch is complete.

Shared clauses are split: every shared literal is propagated to the
acquaintances sharing it, the per-literal consequence queues are cached
in ``cons`` keyed by (literal, split history), and each arriving
consequence is disjunctively recombined with the queues of its sibling
literals. Answers therefore stream back any time a recombination becomes
possible, long before the query terminates.

Termination accounting is reorder-tolerant: delivery order between two
peers is not guaranteed by the fabric, so a final message carries the
number of back messages its branch sent, and a literal counts as settled
only once every acquaintance sent its final *and* all announced backs
arrived. A peer sends one final upstream per received forth, when every
split clause of that forth has settled.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .clauses import Clause, EMPTY_CLAUSE, Literal
from .errors import InputError, ProtocolError
from .graph import AcquaintanceGraph, PeerId
from .histories import History, effective_clauses, seen_complement, seen_literal_at
from .saturation import (
    DEFAULT_LIMITS,
    SaturationLimits,
    Theory,
    distribute,
    minimize,
    resolvent_set,
)
from .transport import Fabric, RunReport, ScheduleConfig, TraceRecord

USER = "User"

FORTH = "forth"
BACK = "back"
FINAL = "final"


@dataclass(frozen=True)
class Message:
    sender: str
    receiver: str
    kind: str
    hist: History
    payload: Literal | Clause | None
    # On final messages only: how many back messages this branch sent to
    # the receiver, so the receiver can settle under adversarial delivery
    # order. Transport metadata, not part of the reasoning state.
    backs_sent: int = 0

    def __str__(self) -> str:
        payload = "true" if self.kind == FINAL else str(self.payload)
        return f"m({self.sender}->{self.receiver} {self.kind} |{len(self.hist)}| {payload})"


class _LiteralState:
    __slots__ = ("cons", "pending_finals", "expected_backs", "received_backs")

    def __init__(self, seed: Clause | None, n_neighbors: int):
        self.cons: set[Clause] = set() if seed is None else {seed}
        self.pending_finals = n_neighbors
        self.expected_backs = 0
        self.received_backs = 0

    @property
    def settled(self) -> bool:
        return self.pending_finals == 0 and self.received_backs == self.expected_backs


@dataclass
class _Split:
    clause: Clause
    shared: Clause
    local: Clause
    closed: bool = False


@dataclass
class _Branch:
    upstream: str
    q: Literal
    hist: History
    open_splits: set[History] = field(default_factory=set)
    emitted: set[Clause] = field(default_factory=set)
    backs_sent: int = 0
    closed: bool = False


class PeerRuntime:
    """Message handlers plus the per-peer consequence/finality tables."""

    def __init__(self, pid: PeerId, g: AcquaintanceGraph, limits: SaturationLimits = DEFAULT_LIMITS):
        self.id = pid
        self.g = g
        self.limits = limits
        self.theory = g.theory(pid)
        self.targets = g.targets(pid)
        self.splits: dict[History, _Split] = {}
        self.literal_states: dict[tuple[Literal, History], _LiteralState] = {}
        self.branches: dict[tuple[Literal, History], _Branch] = {}

    # -- dispatch ------------------------------------------------------------

    def handle(self, m: Message) -> list[Message]:
        if m.receiver != self.id:
            raise ProtocolError(f"{self.id} received message for {m.receiver}")
        if m.kind == FORTH:
            return self.handle_forth(m)
        if m.kind == BACK:
            return self.handle_back(m)
        if m.kind == FINAL:
            return self.handle_final(m)
        raise ProtocolError(f"unknown message kind {m.kind!r}")

    # -- forth ----------------------------------------------------------------

    def handle_forth(self, m: Message) -> list[Message]:
        q = m.payload
        if not isinstance(q, Literal):
            raise ProtocolError("forth payload must be a literal")
        if q.variable not in self.theory.vocabulary:
            raise InputError(f"variable {q.variable} not in vocabulary of {self.id}")
        hist = m.hist

        if seen_complement(hist, q):
            # The branch assumed the complement earlier: contradiction.
            return [
                self._back(m.sender, ((q, self.id, EMPTY_CLAUSE),) + hist, EMPTY_CLAUSE),
                self._final(m.sender, hist, q, backs=1),
            ]
        if Clause([q]) in self.theory.clauses or seen_literal_at(hist, q, self.id):
            return [self._final(m.sender, hist, q, backs=0)]

        masked = Theory(effective_clauses(self.theory, self.id, hist), self.theory.vocabulary)
        local = {Clause([q])} | set(resolvent_set(q, masked, self.limits))
        if EMPTY_CLAUSE in local:
            return [
                self._back(m.sender, ((q, self.id, EMPTY_CLAUSE),) + hist, EMPTY_CLAUSE),
                self._final(m.sender, hist, q, backs=1),
            ]

        kept: list[tuple[Clause, Clause, Clause]] = []
        for c in sorted(local, key=Clause.sort_key):
            s, l_part = self.g.split_shared(c, self.id)
            if all(x.variable in self.targets for x in l_part):
                kept.append((c, s, l_part))

        if all(s.is_empty for _, s, _ in kept):
            msgs = [
                self._back(m.sender, ((q, self.id, c),) + hist, c) for c, _, _ in kept
            ]
            msgs.append(self._final(m.sender, hist, q, backs=len(msgs)))
            return msgs

        branch = _Branch(upstream=m.sender, q=q, hist=hist)
        self.branches[(q, hist)] = branch
        msgs: list[Message] = []
        for c, s, l_part in kept:
            if s.is_empty:
                msgs.extend(self._emit_back(branch, ((q, self.id, c),) + hist, c))
                continue
            if all(x.variable in self.targets for x in s):
                # The whole clause is already in the target language:
                # return it now, besides splitting it for recombination.
                msgs.extend(self._emit_back(branch, ((q, self.id, c),) + hist, c))
            split_hist: History = ((q, self.id, c),) + hist
            self.splits[split_hist] = _Split(clause=c, shared=s, local=l_part)
            branch.open_splits.add(split_hist)
            for l in sorted(s):
                neighbors = sorted(self.g.acq(l, self.id))
                seed = Clause([l]) if l.variable in self.targets else None
                self.literal_states[(l, split_hist)] = _LiteralState(seed, len(neighbors))
                for rp in neighbors:
                    msgs.append(Message(self.id, rp, FORTH, split_hist, l))
        return msgs

    # -- back -----------------------------------------------------------------

    def handle_back(self, m: Message) -> list[Message]:
        r = m.payload
        if not isinstance(r, Clause):
            raise ProtocolError("back payload must be a clause")
        if len(m.hist) < 2 or m.hist[1][1] != self.id:
            raise ProtocolError(f"back history shape invalid at {self.id}: {m}")
        if not self.g.in_target_language(r):
            raise ProtocolError(f"back payload {r} outside the target language")
        head_literal = m.hist[0][0]
        split_hist = m.hist[1:]
        key = (head_literal, split_hist)
        state = self.literal_states.get(key)
        split = self.splits.get(split_hist)
        if state is None or split is None or split.closed:
            raise ProtocolError(f"back for unknown split at {self.id}: {m}")
        state.cons.add(r)
        state.received_backs += 1

        branch = self.branches[(split_hist[0][0], split_hist[1:])]
        factors = [
            self.literal_states[(l, split_hist)].cons
            for l in split.shared
            if l != head_literal
        ]
        factors.append({split.local.union(r)})
        msgs: list[Message] = []
        for cs in sorted(distribute(factors), key=Clause.sort_key):
            msgs.extend(self._emit_back(branch, split_hist, cs))
        msgs.extend(self._settle(split_hist))
        return msgs

    # -- final ----------------------------------------------------------------

    def handle_final(self, m: Message) -> list[Message]:
        if m.payload is not None:
            raise ProtocolError("final payload must be the completion marker")
        if len(m.hist) < 2 or m.hist[0][2] is not None or m.hist[1][1] != self.id:
            raise ProtocolError(f"final history shape invalid at {self.id}: {m}")
        head_literal = m.hist[0][0]
        split_hist = m.hist[1:]
        key = (head_literal, split_hist)
        state = self.literal_states.get(key)
        if state is None or split_hist not in self.splits:
            raise ProtocolError(f"final for unknown split at {self.id}: {m}")
        if state.pending_finals <= 0:
            raise ProtocolError(f"excess final at {self.id}: {m}")
        state.pending_finals -= 1
        state.expected_backs += m.backs_sent
        return self._settle(split_hist)

    # -- settlement -------------------------------------------------------------

    def _settle(self, split_hist: History) -> list[Message]:
        split = self.splits[split_hist]
        if split.closed:
            return []
        for l in split.shared:
            if not self.literal_states[(l, split_hist)].settled:
                return []
        split.closed = True
        for l in split.shared:
            self.literal_states[(l, split_hist)].cons.clear()
        branch = self.branches[(split_hist[0][0], split_hist[1:])]
        branch.open_splits.discard(split_hist)
        if branch.open_splits or branch.closed:
            return []
        branch.closed = True
        return [
            self._final(branch.upstream, branch.hist, branch.q, backs=branch.backs_sent)
        ]

    # -- message builders ---------------------------------------------------

    def _back(self, to: str, hist: History, payload: Clause) -> Message:
        return Message(self.id, to, BACK, hist, payload)

    def _emit_back(self, branch: _Branch, hist: History, payload: Clause) -> list[Message]:
        if payload in branch.emitted:
            return []
        branch.emitted.add(payload)
        branch.backs_sent += 1
        return [Message(self.id, branch.upstream, BACK, hist, payload)]

    def _final(self, to: str, hist: History, q: Literal, backs: int) -> Message:
        return Message(self.id, to, FINAL, ((q, self.id, None),) + hist, None, backs_sent=backs)


def build_runtimes(
    g: AcquaintanceGraph, limits: SaturationLimits = DEFAULT_LIMITS
) -> dict[PeerId, PeerRuntime]:
    return {pid: PeerRuntime(pid, g, limits) for pid in g.peers}


# ---------------------------------------------------------------------------
# User-side query drivers


@dataclass
class QueryResult:
    """Answer stream of one query plus its termination status."""

    peer: PeerId
    query: Literal | Clause
    answers: list[Clause]
    answer_times_ms: list[float]
    final_received: bool
    report: RunReport
    records: list[TraceRecord] | None
    runtimes: dict[PeerId, PeerRuntime]

    @property
    def timed_out(self) -> bool:
        return self.report.timed_out

    @property
    def unsatisfiable(self) -> bool:
        return EMPTY_CLAUSE in self.answers

    def answer_set(self) -> set[Clause]:
        return set(self.answers)

    def minimized(self) -> set[Clause]:
        return minimize(self.answers)


class _UserCollector:
    """Routes the user-addressed stream and fires the termination event.

    The final message carries the count of backs its branch sent, so the
    event fires only once every announced answer has been delivered, even
    when the fabric reorders the final ahead of late answers.
    """

    def __init__(self, on_answer=None, on_final=None):
        self.answers: list[Clause] = []
        self.times: list[float] = []
        self.final_seen = False
        self.expected: int | None = None
        self.received = 0
        self.terminated = False
        self.on_answer = on_answer
        self.on_final = on_final

    def __call__(self, m: Message, model_time_ms: float) -> None:
        if self.terminated:
            raise ProtocolError(f"user message after termination: {m}")
        if m.kind == BACK:
            self.answers.append(m.payload)
            self.times.append(model_time_ms)
            self.received += 1
            if self.on_answer is not None:
                self.on_answer(m.payload, model_time_ms)
        elif m.kind == FINAL:
            if self.final_seen:
                raise ProtocolError(f"duplicate user final: {m}")
            self.final_seen = True
            self.expected = m.backs_sent
        else:
            raise ProtocolError(f"unexpected user message kind: {m}")
        if self.final_seen and self.received == self.expected:
            self.terminated = True
            if self.on_final is not None:
                self.on_final(model_time_ms)


def ask(
    g: AcquaintanceGraph,
    p: PeerId,
    q: Literal,
    schedule: ScheduleConfig = ScheduleConfig(),
    limits: SaturationLimits = DEFAULT_LIMITS,
    on_answer: Callable | None = None,
    on_final: Callable | None = None,
    keep_trace: bool = False,
    trace_file=None,
) -> QueryResult:
    """Inject the literal at peer p and run the network to quiescence."""
    if q.variable not in g.theory(p).vocabulary:
        raise InputError(f"variable {q.variable} not in vocabulary of {p}")
    runtimes = build_runtimes(g, limits)
    collector = _UserCollector(on_answer, on_final)
    fabric = Fabric(
        handlers={pid: rt.handle for pid, rt in runtimes.items()},
        cfg=schedule,
        sinks={USER: collector},
        keep_trace=keep_trace,
        trace_file=trace_file,
    )
    fabric.inject(Message(USER, p, FORTH, (), q))
    report = fabric.run_until_quiescent()
    return QueryResult(
        peer=p,
        query=q,
        answers=collector.answers,
        answer_times_ms=collector.times,
        final_received=collector.terminated,
        report=report,
        records=fabric.records,
        runtimes=runtimes,
    )


def ask_clause(
    g: AcquaintanceGraph,
    p: PeerId,
    c: Clause,
    schedule: ScheduleConfig = ScheduleConfig(),
    limits: SaturationLimits = DEFAULT_LIMITS,
    on_answer: Callable | None = None,
    keep_trace: bool = False,
) -> QueryResult:
    """Clause input: one independent run per literal, recombined anytime.

    All per-literal queries share one fabric so their messages interleave;
    each new consequence for one literal is combined with the queued
    consequences of the others, and tautological combinations are dropped.
    Single-literal clauses behave exactly like ask().
    """
    if len(c) == 0:
        raise InputError("cannot query the empty clause")
    missing = c.variables() - g.theory(p).vocabulary
    if missing:
        raise InputError(f"variables {sorted(map(str, missing))} not in vocabulary of {p}")
    if len(c) == 1:
        return ask(g, p, c.literals[0], schedule, limits, on_answer, keep_trace=keep_trace)

    runtimes = build_runtimes(g, limits)
    literals = sorted(c)
    collectors = {l: _UserCollector() for l in literals}
    answers: list[Clause] = []
    times: list[float] = []
    emitted: set[Clause] = set()

    def route(m: Message, model_time_ms: float) -> None:
        root = m.hist[-1][0]
        collector = collectors[root]
        before = len(collector.answers)
        collector(m, model_time_ms)
        if len(collector.answers) == before:
            return
        r = collector.answers[-1]
        factors = [{r} if l == root else collectors[l].answers for l in literals]
        for cs in sorted(distribute([set(f) for f in factors]), key=Clause.sort_key):
            if cs.is_tautology() or cs in emitted:
                continue
            emitted.add(cs)
            answers.append(cs)
            times.append(model_time_ms)
            if on_answer is not None:
                on_answer(cs, model_time_ms)

    fabric = Fabric(
        handlers={pid: rt.handle for pid, rt in runtimes.items()},
        cfg=schedule,
        sinks={USER: route},
        keep_trace=keep_trace,
    )
    for l in literals:
        fabric.inject(Message(USER, p, FORTH, (), l))
    report = fabric.run_until_quiescent()
    return QueryResult(
        peer=p,
        query=c,
        answers=answers,
        answer_times_ms=times,
        final_received=all(col.terminated for col in collectors.values()),
        report=report,
        records=fabric.records,
        runtimes=runtimes,
    )
