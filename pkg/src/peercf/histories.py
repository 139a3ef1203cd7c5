"""Reasoning-branch histories shared by both engines.

A history is a newest-first tuple of ``(literal, peer, clause)`` triples:
the literal was propagated within the peer, and the clause is the
consequence whose split caused the next propagation (``None`` fills the
slot in completion-marker entries). Histories double as cycle detectors
and as the routing path for returning consequences.
"""

from __future__ import annotations

from .clauses import Clause, Literal, Theory

HistEntry = tuple[Literal, str, Clause | None]
History = tuple[HistEntry, ...]


def seen_literal_at(hist: History, l: Literal, peer: str) -> bool:
    return any(e[0] == l and e[1] == peer for e in hist)


def seen_complement(hist: History, l: Literal) -> bool:
    comp = l.complement
    return any(e[0] == comp for e in hist)


def effective_clauses(theory: Theory, peer: str, hist: History) -> set[Clause]:
    """Theory clauses minus the ones consumed earlier on this branch.

    A triple (l, p, c) with c a real clause distinct from l records that
    the branch already resolved p's clause (complement(l) or c) away; the
    removal is branch-local, so it is derived from the history instead of
    mutating the shared theory.
    """
    removed: set[Clause] = set()
    for l, p, c in hist:
        if p != peer or not isinstance(c, Clause):
            continue
        if c == Clause([l]):
            continue
        candidate = c.union(Clause([l.complement]))
        if candidate in theory.clauses:
            removed.add(candidate)
    if not removed:
        return set(theory.clauses)
    return set(theory.clauses) - removed
