"""Benchmark instance generation and measurement.

Instances follow the small-world recipe: a k-regular ring of peers with
random rewiring, per-peer random 2-clause theories over private
variables, and per-edge mapping clauses of length 2 (stretched to 3 with
probability pct3cnf) joining one variable from each endpoint. Mapping
clauses are stored in both endpoint theories; the variables they use
become the edge labels and enter both vocabularies.

Metrics mirror the measurement campaign: per-query depth (longest
history), width (neighbors solicited per forth), integration degree
(distinct peers along a branch), answer counts and timeout rates.
"""

from __future__ import annotations

import csv
import random
import statistics
from collections import Counter
from dataclasses import dataclass, field

from .clauses import Clause, Literal, Theory, Variable
from .deca import QueryResult, USER, ask
from .errors import InputError, ResourceCapError
from .graph import AcquaintanceGraph, Edge, PeerId, PeerSpec
from .saturation import (
    DEFAULT_LIMITS,
    SaturationLimits,
    prime_implicates,
    proper_prime_implicates,
)
from .transport import ScheduleConfig


@dataclass(frozen=True)
class GenParams:
    np_peers: int
    k: int
    pr: float
    n: int
    m: int
    t: int
    q: int
    pct3cnf: float
    seed: int

    def __post_init__(self):
        if self.np_peers < 3 or self.n <= 0 or self.m <= 0 or self.t <= 0 or self.q <= 0:
            raise InputError("peer/variable/clause counts must be positive (np >= 3)")
        if self.t > self.n:
            raise InputError("t must not exceed n")
        if self.k % 2 != 0 or not 0 < self.k < self.np_peers:
            raise InputError("k must be even and smaller than the peer count")
        if not (0.0 <= self.pr <= 1.0 and 0.0 <= self.pct3cnf <= 1.0):
            raise InputError("pr and pct3cnf must be in [0, 1]")
        if self.n < 3 and self.pct3cnf > 0:
            raise InputError("3-literal mapping clauses need at least 3 variables per peer")


def gen_topology(np_peers: int, k: int, pr: float, rng: random.Random) -> list[tuple[int, int]]:
    """k-regular ring with per-edge random rewiring.

    With probability pr an edge is rewired: each endpoint is flipped by a
    fair coin, conditioned on at least one flip, and flipped endpoints are
    redrawn uniformly. Self-loops and duplicate edges are rejected and
    resampled; after too many rejections the original edge is kept, so the
    edge count is always np*k/2.
    """
    edges = [(i, (i + j) % np_peers) for i in range(np_peers) for j in range(1, k // 2 + 1)]
    norm = lambda a, b: (a, b) if a < b else (b, a)
    edge_set = {norm(a, b) for a, b in edges}
    for idx, (a, b) in enumerate(edges):
        if rng.random() >= pr:
            continue
        edge_set.discard(norm(a, b))
        placed = False
        for _ in range(100):
            flip_a, flip_b = rng.random() < 0.5, rng.random() < 0.5
            if not (flip_a or flip_b):
                continue
            na = rng.randrange(np_peers) if flip_a else a
            nb = rng.randrange(np_peers) if flip_b else b
            if (flip_a and na == a) or (flip_b and nb == b):
                continue
            if na == nb or norm(na, nb) in edge_set:
                continue
            edges[idx] = (na, nb)
            edge_set.add(norm(na, nb))
            placed = True
            break
        if not placed:
            edge_set.add(norm(a, b))
    return edges


@dataclass
class GeneratedInstance:
    graph: AcquaintanceGraph
    params: GenParams
    target_adjustments: int


def _peer_id(i: int) -> PeerId:
    return f"P{i:04d}"


def gen_instance(params: GenParams) -> GeneratedInstance:
    rng = random.Random(params.seed)
    topo = gen_topology(params.np_peers, params.k, params.pr, rng)

    peer_vars = [
        [Variable("", f"x{i}_{j}") for j in range(params.n)]
        for i in range(params.np_peers)
    ]
    clauses: list[set[Clause]] = [set() for _ in range(params.np_peers)]
    vocab: list[set[Variable]] = [set(vs) for vs in peer_vars]
    for i in range(params.np_peers):
        while len(clauses[i]) < params.m:
            a, b = rng.sample(range(params.n), 2)
            c = Clause(
                [
                    Literal(peer_vars[i][a], rng.random() < 0.5),
                    Literal(peer_vars[i][b], rng.random() < 0.5),
                ]
            )
            clauses[i].add(c)
    targets: list[set[Variable]] = [
        set(rng.sample(peer_vars[i], params.t)) for i in range(params.np_peers)
    ]

    edges: set[Edge] = set()
    adjustments = 0
    owner = {v: i for i, vs in enumerate(peer_vars) for v in vs}
    for a, b in topo:
        used: set[Variable] = set()
        for _ in range(params.q):
            va = peer_vars[a][rng.randrange(params.n)]
            vb = peer_vars[b][rng.randrange(params.n)]
            lits = [
                Literal(va, rng.random() < 0.5),
                Literal(vb, rng.random() < 0.5),
            ]
            if rng.random() < params.pct3cnf:
                while True:
                    side = a if rng.random() < 0.5 else b
                    v3 = peer_vars[side][rng.randrange(params.n)]
                    if v3 not in (va, vb):
                        break
                lits.append(Literal(v3, rng.random() < 0.5))
            c = Clause(lits)
            clauses[a].add(c)
            clauses[b].add(c)
            used |= c.variables()
        for v in sorted(used):
            edges.add((v, _peer_id(a), _peer_id(b)))
            other = b if owner[v] == a else a
            vocab[other].add(v)
            # Target status follows the variable's owning peer on every
            # edge that mentions it, keeping edge targets consistent.
            if v in targets[owner[v]] and v not in targets[other]:
                targets[other].add(v)
                adjustments += 1

    peers = {
        _peer_id(i): PeerSpec(
            Theory(clauses[i], vocab[i]), frozenset(targets[i])
        )
        for i in range(params.np_peers)
    }
    return GeneratedInstance(AcquaintanceGraph(peers, edges), params, adjustments)


# ---------------------------------------------------------------------------
# Query measurement


@dataclass
class QueryMetrics:
    query_id: int
    peer: PeerId
    literal: Literal
    depth: int
    width_samples: list[int]
    width_first_hop: int
    integration_degree: int
    answers: int
    first_answer_ms: float | None
    timed_out: bool
    unsat: bool

    @property
    def mean_width(self) -> float:
        return statistics.fmean(self.width_samples) if self.width_samples else 0.0


def measure_query(
    g: AcquaintanceGraph,
    p: PeerId,
    q: Literal,
    query_id: int = 0,
    schedule: ScheduleConfig = ScheduleConfig(),
    limits: SaturationLimits = DEFAULT_LIMITS,
) -> tuple[QueryMetrics, QueryResult]:
    res = ask(g, p, q, schedule=schedule, limits=limits, keep_trace=True)
    depth = 0
    integration = 0
    width_samples: list[int] = []
    first_hop = 0
    for rec in res.records:
        m = rec.message
        depth = max(depth, len(m.hist))
        peers_on_branch = {e[1] for e in m.hist}
        if m.kind == "forth" and m.receiver != USER:
            peers_on_branch.add(m.receiver)
            width_samples.append(len(set(rec.induced_forth_receivers)))
            if not m.hist:
                first_hop = len(set(rec.induced_forth_receivers))
        integration = max(integration, len(peers_on_branch))
    metrics = QueryMetrics(
        query_id=query_id,
        peer=p,
        literal=q,
        depth=depth,
        width_samples=width_samples,
        width_first_hop=first_hop,
        integration_degree=integration,
        answers=len(res.answers),
        first_answer_ms=res.answer_times_ms[0] if res.answer_times_ms else None,
        timed_out=res.timed_out,
        unsat=res.unsatisfiable,
    )
    return metrics, res


@dataclass
class CampaignResult:
    rows: list[QueryMetrics] = field(default_factory=list)
    total_times_ms: list[float] = field(default_factory=list)
    answer_times: list[list[float]] = field(default_factory=list)

    def depth_cdf(self) -> list[tuple[int, float]]:
        return _cdf([r.depth for r in self.rows])

    def width_cdf(self) -> list[tuple[int, float]]:
        return _cdf([r.width_first_hop for r in self.rows])

    def summary(self) -> dict:
        n = len(self.rows)
        out: dict = {"queries": n}
        for kth in (1, 10, 100, 1000):
            times = [t[kth - 1] for t in self.answer_times if len(t) >= kth]
            out[f"ans_{kth}_ms"] = statistics.fmean(times) if times else None
            out[f"ans_{kth}_pct"] = 100.0 * len(times) / n if n else 0.0
        out["all_ms"] = statistics.fmean(self.total_times_ms) if self.total_times_ms else 0.0
        out["timeout_pct"] = 100.0 * sum(r.timed_out for r in self.rows) / n if n else 0.0
        out["mean_answers"] = statistics.fmean([r.answers for r in self.rows]) if n else 0.0
        out["unsat_pct"] = 100.0 * sum(r.unsat for r in self.rows) / n if n else 0.0
        return out


def _cdf(values: list[int]) -> list[tuple[int, float]]:
    if not values:
        return []
    counts = Counter(values)
    total = len(values)
    out = []
    acc = 0
    for v in sorted(counts):
        acc += counts[v]
        out.append((v, acc / total))
    return out


def run_campaign(
    g: AcquaintanceGraph,
    queries: int,
    ttl_ms: float | None,
    seed: int,
    policy: str = "random",
    cost_model: str = "unit",
    limits: SaturationLimits = DEFAULT_LIMITS,
) -> CampaignResult:
    """Random (peer, literal) queries measured one transport per query."""
    rng = random.Random(seed)
    peer_ids = sorted(g.peers)
    result = CampaignResult()
    for qid in range(queries):
        p = peer_ids[rng.randrange(len(peer_ids))]
        vocab = sorted(g.theory(p).vocabulary)
        q = Literal(vocab[rng.randrange(len(vocab))], rng.random() < 0.5)
        schedule = ScheduleConfig(
            seed=rng.randrange(2**31),
            policy=policy,
            ttl_budget_ms=ttl_ms,
            cost_model=cost_model,
        )
        metrics, res = measure_query(g, p, q, qid, schedule, limits)
        result.rows.append(metrics)
        result.total_times_ms.append(res.report.model_time_ms)
        result.answer_times.append(res.answer_times_ms)
    return result


CSV_COLUMNS = [
    "query_id",
    "peer",
    "literal",
    "depth",
    "mean_width",
    "integration_degree",
    "answers",
    "first_answer_ms",
    "timed_out",
    "unsat",
]


def write_report_csv(result: CampaignResult, path: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for r in result.rows:
            writer.writerow(
                [
                    r.query_id,
                    r.peer,
                    str(r.literal),
                    r.depth,
                    f"{r.mean_width:.4f}",
                    r.integration_degree,
                    r.answers,
                    "" if r.first_answer_ms is None else f"{r.first_answer_ms:.3f}",
                    int(r.timed_out),
                    int(r.unsat),
                ]
            )


def write_cdf_csv(cdf: list[tuple[int, float]], path: str, label: str) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow([label, "cum_fraction"])
        for v, frac in cdf:
            writer.writerow([v, f"{frac:.6f}"])


# ---------------------------------------------------------------------------
# Local hardness study (single-theory implicate statistics)


def gen_mixed_theory(n: int, m: int, p_ratio: float, rng: random.Random) -> Theory:
    """Uniform random theory of m clauses, a p_ratio fraction of length 3."""
    if n < 3 and p_ratio > 0:
        raise InputError("3-clauses need at least 3 variables")
    variables = [Variable("", f"y{j}") for j in range(n)]
    n3 = round(m * p_ratio)
    clauses: set[Clause] = set()
    sizes = [3] * n3 + [2] * (m - n3)
    for size in sizes:
        while True:
            idx = rng.sample(range(n), size)
            c = Clause(Literal(variables[i], rng.random() < 0.5) for i in idx)
            if c not in clauses:
                clauses.add(c)
                break
    return Theory(clauses, variables)


@dataclass
class SeedHardness:
    seed: int
    capped: bool
    pi_total_literals: int = 0
    ppi_total_literals: int = 0
    pi_len_counts: dict[int, int] = field(default_factory=dict)
    ppi_len_counts: dict[int, int] = field(default_factory=dict)


@dataclass
class HardnessStudy:
    n: int
    m: int
    p_ratio: float
    results: list[SeedHardness] = field(default_factory=list)

    def ok(self) -> list[SeedHardness]:
        return [r for r in self.results if not r.capped]

    def median_pi_total(self) -> float:
        return statistics.median(r.pi_total_literals for r in self.ok())

    def median_ppi_total(self) -> float:
        return statistics.median(r.ppi_total_literals for r in self.ok())

    def mean_count_of_length(self, length: int) -> float:
        return statistics.fmean(r.pi_len_counts.get(length, 0) for r in self.ok())

    def mean_len_histogram(self) -> dict[int, float]:
        ok = self.ok()
        lengths = sorted({l for r in ok for l in r.pi_len_counts})
        return {
            l: statistics.fmean(r.pi_len_counts.get(l, 0) for r in ok) for l in lengths
        }

    def total_size_cdf(self) -> list[tuple[int, float]]:
        return _cdf([r.pi_total_literals for r in self.ok()])

    def capped_count(self) -> int:
        return sum(r.capped for r in self.results)


def local_hardness_study(
    n: int,
    m: int,
    p_ratio: float,
    seeds: int,
    limits: SaturationLimits = SaturationLimits(max_clauses=400_000, time_budget_s=30.0),
    base_seed: int = 0,
) -> HardnessStudy:
    """Implicate statistics over random theories, one theory per seed.

    For each seed: all prime implicates of the theory, then the proper
    prime implicates of one random literal with respect to it. Seeds that
    blow the resource cap are recorded and excluded from the aggregates.
    """
    study = HardnessStudy(n=n, m=m, p_ratio=p_ratio)
    for s in range(seeds):
        rng = random.Random(base_seed + s)
        theory = gen_mixed_theory(n, m, p_ratio, rng)
        q = Literal(sorted(theory.vocabulary)[rng.randrange(n)], rng.random() < 0.5)
        row = SeedHardness(seed=base_seed + s, capped=False)
        try:
            pi = prime_implicates(theory, limits)
            ppi = proper_prime_implicates(q, theory, limits)
        except ResourceCapError:
            row.capped = True
            study.results.append(row)
            continue
        row.pi_len_counts = dict(Counter(len(c) for c in pi))
        row.ppi_len_counts = dict(Counter(len(c) for c in ppi))
        row.pi_total_literals = sum(len(c) for c in pi)
        row.ppi_total_literals = sum(len(c) for c in ppi)
        study.results.append(row)
    return study
