"""Resolution, subsumption and prime-implicate computation.

Small-scale operations (single resolution steps, clause-set distribution,
subsumption minimization of answer sets) work directly on ``Clause``
values. Saturation-scale operations encode clause sets into the bit-mask
kernel and run round-based resolution with forward and backward
subsumption. Saturation never keeps tautologies: they subsume nothing and
are never minimal.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from . import kernel
from .clauses import EMPTY_CLAUSE, Clause, Literal, Theory, Variable
from .errors import ResourceCapError


def resolve(c1: Clause, c2: Clause, v: Variable) -> Clause | None:
    """Resolve two clauses on variable v; None when v is not complementary."""
    pos, neg = Literal(v, True), Literal(v, False)
    if pos in c1 and neg in c2:
        keep1, keep2 = pos, neg
    elif neg in c1 and pos in c2:
        keep1, keep2 = neg, pos
    else:
        return None
    return Clause(
        [l for l in c1 if l != keep1] + [l for l in c2 if l != keep2]
    )


def subsumes(c1: Clause, c2: Clause) -> bool:
    """Whether c1's literals are a subset of c2's."""
    return set(c1.literals).issubset(c2.literals)


def distribute(sets: Sequence[Iterable[Clause]]) -> set[Clause]:
    """Pairwise disjunctive combination: pick one clause from each set.

    The empty product is {[]} (the empty clause is the identity of
    disjunction); any empty factor annihilates the result.
    """
    acc: set[Clause] = {EMPTY_CLAUSE}
    for clause_set in sets:
        factor = set(clause_set)
        if not factor:
            return set()
        acc = {a.union(b) for a in acc for b in factor}
    return acc


def minimize(clauses: Iterable[Clause]) -> set[Clause]:
    """Subsumption-minimal members, with tautologies dropped."""
    candidates = sorted(
        {c for c in clauses if not c.is_tautology()}, key=Clause.sort_key
    )
    kept: list[frozenset[Literal]] = []
    out: set[Clause] = set()
    for c in candidates:
        lits = frozenset(c.literals)
        if any(k.issubset(lits) for k in kept):
            continue
        kept.append(lits)
        out.add(c)
    return out


# ---------------------------------------------------------------------------
# Saturation


@dataclass(frozen=True)
class SaturationLimits:
    """Resource budget for one saturation call.

    max_clauses bounds the number of clauses alive at any point;
    time_budget_s is wall-clock seconds (None = unbounded).
    """

    max_clauses: int = 1_000_000
    time_budget_s: float | None = None


DEFAULT_LIMITS = SaturationLimits()


class _Codec:
    """Maps clauses over a fixed variable universe to bit-mask rows."""

    def __init__(self, variables: Iterable[Variable]):
        self.vars = sorted(set(variables))
        self.index = {v: i for i, v in enumerate(self.vars)}
        self.width = max(1, (len(self.vars) + 63) // 64)

    def encode(self, clauses: Iterable[Clause]) -> np.ndarray:
        clause_list = list(clauses)
        rows = np.zeros((len(clause_list), 2 * self.width), dtype=kernel.U64)
        for r, c in enumerate(clause_list):
            for l in c:
                i = self.index[l.variable]
                col = i // 64 if l.positive else self.width + i // 64
                rows[r, col] |= kernel.U64(1) << kernel.U64(i % 64)
        return rows

    def decode(self, rows: np.ndarray) -> list[Clause]:
        out = []
        for r in range(rows.shape[0]):
            lits = []
            for w in range(self.width):
                for half, positive in ((0, True), (self.width, False)):
                    word = int(rows[r, w + half])
                    base = 64 * w
                    while word:
                        low = word & -word
                        lits.append(Literal(self.vars[base + low.bit_length() - 1], positive))
                        word ^= low
            out.append(Clause(lits))
        return out


class _Deadline:
    def __init__(self, limits: SaturationLimits):
        self.limits = limits
        self.t0 = time.monotonic()

    def check(self, n_alive: int) -> None:
        if n_alive > self.limits.max_clauses:
            raise ResourceCapError(
                f"clause cap exceeded: {n_alive} > {self.limits.max_clauses}"
            )
        if (
            self.limits.time_budget_s is not None
            and time.monotonic() - self.t0 > self.limits.time_budget_s
        ):
            raise ResourceCapError(
                f"time budget exceeded ({self.limits.time_budget_s}s)"
            )


def _input_clauses(theory: Theory | Iterable[Clause]) -> tuple[set[Clause], set[Variable]]:
    if isinstance(theory, Theory):
        clauses, vocab = set(theory.clauses), set(theory.vocabulary)
    else:
        clauses = set(theory)
        vocab = {v for c in clauses for v in c.variables()}
    return clauses, vocab


def prime_implicates(
    theory: Theory | Iterable[Clause], limits: SaturationLimits = DEFAULT_LIMITS
) -> frozenset[Clause]:
    """All subsumption-minimal non-tautological consequences of the theory."""
    clauses, vocab = _input_clauses(theory)
    clauses = {c for c in clauses if not c.is_tautology()}
    if EMPTY_CLAUSE in clauses:
        return frozenset([EMPTY_CLAUSE])
    if not clauses:
        return frozenset()
    codec = _Codec(vocab)
    deadline = _Deadline(limits)
    S = kernel.minimize_rows(codec.encode(clauses))
    frontier = S
    while frontier.shape[0]:
        deadline.check(S.shape[0] + frontier.shape[0])
        R = kernel.dedupe_rows(kernel.resolve_round(frontier, S))
        if R.shape[0]:
            R = R[~kernel.subsumed_by_mask(R, S)]
        if R.shape[0]:
            R = kernel.minimize_rows(R)
        if R.shape[0] == 0:
            break
        if (kernel.row_sizes(R) == 0).any():
            return frozenset([EMPTY_CLAUSE])
        keep = ~kernel.subsumed_by_mask(S, R)
        S = np.concatenate([S[keep], R], axis=0)
        frontier = R
    return frozenset(codec.decode(S))


def proper_prime_implicates(
    q: Clause | Literal,
    theory: Theory | Iterable[Clause],
    limits: SaturationLimits = DEFAULT_LIMITS,
) -> frozenset[Clause]:
    """Prime implicates of theory+q not already entailed by the theory alone.

    This is the centralized set-difference oracle: saturate both clause
    sets and drop every implicate subsumed by an implicate of the theory.
    """
    if isinstance(q, Literal):
        q = Clause([q])
    clauses, vocab = _input_clauses(theory)
    vocab |= set(q.variables())
    pi_with = prime_implicates(Theory(clauses | {q}, vocab), limits)
    pi_without = prime_implicates(Theory(clauses, vocab), limits)
    if not pi_without:
        return pi_with
    codec = _Codec(vocab)
    with_rows = codec.encode(sorted(pi_with, key=Clause.sort_key))
    without_rows = codec.encode(pi_without)
    keep = ~kernel.subsumed_by_mask(with_rows, without_rows)
    return frozenset(codec.decode(with_rows[keep]))


def resolvent_set(
    q: Literal,
    theory: Theory | Iterable[Clause],
    limits: SaturationLimits = DEFAULT_LIMITS,
) -> frozenset[Clause]:
    """Clauses derivable by resolution chains whose ancestry includes q.

    Closed under further resolution with the theory and with earlier
    derived clauses; minimized internally, but clauses subsumed by theory
    members are kept (they can still be derivationally proper). Contains
    every prime proper resolvent of q. Clauses literally present in the
    theory are excluded.
    """
    clauses, vocab = _input_clauses(theory)
    clauses = {c for c in clauses if not c.is_tautology()}
    vocab.add(q.variable)
    q_clause = Clause([q])
    codec = _Codec(vocab)
    deadline = _Deadline(limits)

    base = codec.encode(sorted(clauses | {q_clause}, key=Clause.sort_key))
    base_keys = {base[i].tobytes() for i in range(base.shape[0])}
    D = kernel.empty_set(codec.width)
    frontier = codec.encode([q_clause])
    while frontier.shape[0]:
        deadline.check(base.shape[0] + D.shape[0] + frontier.shape[0])
        partners = np.concatenate([base, D], axis=0)
        R = kernel.dedupe_rows(kernel.resolve_round(frontier, partners))
        if R.shape[0]:
            fresh = np.array(
                [R[i].tobytes() not in base_keys for i in range(R.shape[0])]
            )
            R = R[fresh]
        if R.shape[0] and D.shape[0]:
            R = R[~kernel.subsumed_by_mask(R, D)]
        if R.shape[0]:
            R = kernel.minimize_rows(R)
        if R.shape[0] == 0:
            break
        if D.shape[0]:
            D = D[~kernel.subsumed_by_mask(D, R)]
        D = np.concatenate([D, R], axis=0)
        frontier = R
    return frozenset(codec.decode(D))


# ---------------------------------------------------------------------------
# Satisfiability (backtracking with unit propagation; exact, for the
# schema-checking fallback and for validating small instances)


def satisfiable(clauses: Iterable[Clause]) -> bool:
    work = [frozenset(c.literals) for c in clauses if not c.is_tautology()]
    return _dpll(work, {})


def entails(clauses: Iterable[Clause], goal: Clause) -> bool:
    """Whether the clause set entails the goal clause."""
    if goal.is_tautology():
        return True
    negated = [Clause([l.complement]) for l in goal]
    return not satisfiable(list(clauses) + negated)


def _dpll(clauses: list[frozenset[Literal]], assignment: dict[Variable, bool]) -> bool:
    clauses = list(clauses)
    assignment = dict(assignment)
    while True:
        unit = None
        simplified: list[frozenset[Literal]] = []
        for c in clauses:
            live = []
            satisfied = False
            for l in c:
                val = assignment.get(l.variable)
                if val is None:
                    live.append(l)
                elif val == l.positive:
                    satisfied = True
                    break
            if satisfied:
                continue
            if not live:
                return False
            if len(live) == 1 and unit is None:
                unit = live[0]
            simplified.append(frozenset(live))
        clauses = simplified
        if not clauses:
            return True
        if unit is None:
            break
        assignment[unit.variable] = unit.positive
    counts: dict[Variable, int] = {}
    for c in clauses:
        for l in c:
            counts[l.variable] = counts.get(l.variable, 0) + 1
    branch_var = max(counts, key=lambda v: (counts[v], str(v)))
    for value in (True, False):
        assignment[branch_var] = value
        if _dpll(clauses, assignment):
            return True
    return False
