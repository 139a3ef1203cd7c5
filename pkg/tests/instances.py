"""Random small networks for differential engine testing.

Shared variables are wired as random spanning trees of labelled edges
over the peers that hold them, so the path property holds by
construction. Instances whose union theory has a prime implicate lying
entirely inside the target language are rejected: on those the engines
legitimately return target implicates that the proper-prime oracle
excludes (they are entailed without the query), so the three-way
equality being tested is only a theorem outside that regime.
"""

import random

from peercf import (
    AcquaintanceGraph,
    Clause,
    Literal,
    PeerSpec,
    SaturationLimits,
    Theory,
    Variable,
    prime_implicates,
)
from peercf.errors import ResourceCapError

_FILTER_LIMITS = SaturationLimits(max_clauses=60_000, time_budget_s=20.0)


def random_graph(rng: random.Random, n_peers: int | None = None) -> AcquaintanceGraph:
    if n_peers is None:
        n_peers = rng.randint(4, 8)
    peer_ids = [f"N{i}" for i in range(n_peers)]
    private = {
        p: [Variable("", f"v{i}_{j}") for j in range(rng.randint(1, 3))]
        for i, p in enumerate(peer_ids)
    }
    n_shared = rng.randint(2, 2 + n_peers // 2)
    shared_of: dict[str, list[Variable]] = {p: [] for p in peer_ids}
    edges = set()
    for s in range(n_shared):
        v = Variable("", f"s{s}")
        holders = rng.sample(peer_ids, rng.randint(2, min(3, n_peers)))
        for p in holders:
            shared_of[p].append(v)
        # Random spanning tree over the holders, every edge labelled v.
        connected = [holders[0]]
        for p in holders[1:]:
            edges.add((v, rng.choice(connected), p))
            connected.append(p)
    target_vars = set()
    all_vars = sorted({v for vs in private.values() for v in vs} | {v for vs in shared_of.values() for v in vs})
    for v in all_vars:
        if rng.random() < 0.45:
            target_vars.add(v)

    peers = {}
    for p in peer_ids:
        vocab = private[p] + shared_of[p]
        n_clauses = rng.randint(2, 4)
        clauses = set()
        attempts = 0
        while len(clauses) < n_clauses and attempts < 50:
            attempts += 1
            size = rng.choice((2, 2, 3))
            if size > len(vocab):
                size = len(vocab)
            if size < 2:
                break
            chosen = rng.sample(vocab, size)
            clauses.add(Clause(Literal(v, rng.random() < 0.5) for v in chosen))
        peers[p] = PeerSpec(
            Theory(clauses, vocab), frozenset(v for v in vocab if v in target_vars)
        )
    return AcquaintanceGraph(peers, edges)


def interference_free(g: AcquaintanceGraph) -> bool:
    """True when no prime implicate of the union is all-target.

    This also rejects unsatisfiable unions (the empty clause is trivially
    all-target).
    """
    targets = g.target_variables()
    try:
        pi = prime_implicates(g.union_theory(), _FILTER_LIMITS)
    except ResourceCapError:
        return False
    return not any(all(l.variable in targets for l in c) for c in pi)


def random_query(rng: random.Random, g: AcquaintanceGraph) -> tuple[str, Literal]:
    p = rng.choice(sorted(g.peers))
    v = rng.choice(sorted(g.theory(p).vocabulary))
    return p, Literal(v, rng.random() < 0.5)


def differential_instances(count: int, base_seed: int = 0):
    """Deterministic stream of (graph, peer, literal) triples passing the filter."""
    out = []
    attempt = 0
    while len(out) < count:
        rng = random.Random(base_seed * 1_000_003 + attempt)
        attempt += 1
        g = random_graph(rng)
        if not interference_free(g):
            continue
        out.append((g,) + random_query(rng, g))
    return out
