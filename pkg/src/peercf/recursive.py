"""Single-process recursive consequence finding.

This engine explores the same reasoning branches as the message-passing
one but depth-first in one call stack, which makes it the mid-level
oracle between the centralized saturation oracle and the distributed
engine: slow, obviously correct, deterministic, and producing exactly the
answer set of the distributed engine.

The history short-circuits are applied peer by peer, the way each peer of
a solicited group applies them on message receipt: a peer that already
holds the literal, or that already processed it on this branch, simply
contributes nothing, while the remaining peers of the group still answer.
Group-level short-circuits would also break termination, since a group
containing one fresh peer would otherwise re-split the seen peers'
clauses without bound.
"""

from __future__ import annotations

import sys

from .clauses import Clause, EMPTY_CLAUSE, Literal
from .errors import InputError
from .graph import AcquaintanceGraph, PeerId
from .histories import History, effective_clauses, seen_complement, seen_literal_at
from .saturation import (
    DEFAULT_LIMITS,
    SaturationLimits,
    Theory,
    distribute,
    resolvent_set,
)


def rcf(
    q: Literal,
    p: PeerId,
    g: AcquaintanceGraph,
    limits: SaturationLimits = DEFAULT_LIMITS,
) -> set[Clause]:
    """All target-language consequences of q found from peer p."""
    if q.variable not in g.theory(p).vocabulary:
        raise InputError(f"variable {q.variable} not in vocabulary of {p}")
    # Branch depth is bounded by the distinct (literal, peer) pairs of the
    # graph, which can exceed the default interpreter recursion limit.
    if sys.getrecursionlimit() < 20_000:
        sys.setrecursionlimit(20_000)
    return rcfh(q, frozenset([p]), (), g, limits)


def rcf_clause(
    c: Clause,
    p: PeerId,
    g: AcquaintanceGraph,
    limits: SaturationLimits = DEFAULT_LIMITS,
) -> set[Clause]:
    """Clause input: split into literals, combine the per-literal answers."""
    if len(c) == 0:
        raise InputError("cannot query the empty clause")
    per_literal = [rcf(l, p, g, limits) for l in sorted(c)]
    combined = distribute(per_literal)
    return {r for r in combined if not r.is_tautology()}


def rcfh(
    q: Literal,
    sp: frozenset[PeerId],
    hist: History,
    g: AcquaintanceGraph,
    limits: SaturationLimits,
) -> set[Clause]:
    # A complementary literal was assumed earlier on this branch: every
    # peer of the group closes the branch with the empty clause.
    if seen_complement(hist, q):
        return {EMPTY_CLAUSE}

    q_unit = Clause([q])
    result: set[Clause] = set()
    splittable: list[tuple[PeerId, Clause, Clause, Clause]] = []
    for p in sorted(sp):
        # Peers that hold q, or that already processed it on this branch,
        # contribute nothing (they would answer with a bare final).
        if q_unit in g.theory(p).clauses or seen_literal_at(hist, q, p):
            continue
        masked = Theory(effective_clauses(g.theory(p), p, hist), g.theory(p).vocabulary)
        local = {q_unit} | set(resolvent_set(q, masked, limits))
        if EMPTY_CLAUSE in local:
            result.add(EMPTY_CLAUSE)
            continue
        targets = g.targets(p)
        for c in sorted(local, key=Clause.sort_key):
            s, l_part = g.split_shared(c, p)
            if not all(x.variable in targets for x in l_part):
                continue
            if s.is_empty:
                result.add(c)
                continue
            if all(x.variable in targets for x in s):
                # Shared part already in the target language: direct result,
                # in addition to the split below.
                result.add(c)
            splittable.append((p, c, s, l_part))

    for p, c, s, l_part in splittable:
        new_hist: History = ((q, p, c),) + hist
        answers = []
        for l in sorted(s):
            sub = rcfh(l, g.acq(l, p), new_hist, g, limits)
            if l.variable in g.targets(p):
                # Target literals answer for themselves as well, exactly
                # like the seeded consequence queues of the message engine.
                sub = sub | {Clause([l])}
            answers.append(sub)
        result |= distribute(answers + [[l_part]])
    return result
