"""Acquaintance graphs: peers, variable-labelled edges, target variables.

An edge ``(v, a, b)`` declares that peers a and b know they share variable
v. Peers may have common vocabulary variables without a declaring edge;
only the path-property diagnostic looks at raw vocabulary intersections.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field

from .clauses import (
    Clause,
    EMPTY_CLAUSE,
    Literal,
    PeerTheoryFile,
    Theory,
    Variable,
    parse_theory,
    serialize_theory,
)
from .errors import InputError

PeerId = str

Edge = tuple[Variable, PeerId, PeerId]


@dataclass(frozen=True)
class PeerSpec:
    theory: Theory
    targets: frozenset[Variable]


def _normalize_edge(v: Variable, a: PeerId, b: PeerId) -> Edge:
    return (v, a, b) if a <= b else (v, b, a)


class AcquaintanceGraph:
    """Immutable peer network; safe to share between concurrent queries."""

    def __init__(
        self,
        peers: dict[PeerId, PeerSpec],
        edges: set[Edge] | frozenset[Edge],
        validate: bool = True,
    ):
        self.peers: dict[PeerId, PeerSpec] = dict(sorted(peers.items()))
        self.edges: frozenset[Edge] = frozenset(
            _normalize_edge(*e) for e in edges
        )
        self._neighbors: dict[tuple[Variable, PeerId], frozenset[PeerId]] = {}
        self._shared_vars: dict[PeerId, set[Variable]] = {p: set() for p in self.peers}
        adjacency: dict[tuple[Variable, PeerId], set[PeerId]] = {}
        for v, a, b in self.edges:
            adjacency.setdefault((v, a), set()).add(b)
            adjacency.setdefault((v, b), set()).add(a)
            if a in self._shared_vars:
                self._shared_vars[a].add(v)
            if b in self._shared_vars:
                self._shared_vars[b].add(v)
        self._neighbors = {k: frozenset(s) for k, s in adjacency.items()}
        if validate:
            self._validate()

    def _validate(self) -> None:
        for p, spec in self.peers.items():
            stray = spec.targets - spec.theory.vocabulary
            if stray:
                raise InputError(f"peer {p}: target variables outside vocabulary: {sorted(map(str, stray))}")
        for v, a, b in self.edges:
            if a == b:
                raise InputError(f"self-loop edge on {a} for {v}")
            for p in (a, b):
                if p not in self.peers:
                    raise InputError(f"edge references unknown peer {p}")
                if v not in self.peers[p].theory.vocabulary:
                    raise InputError(f"edge variable {v} not in vocabulary of {p}")
            if (v in self.peers[a].targets) != (v in self.peers[b].targets):
                raise InputError(
                    f"edge variable {v} has inconsistent target status on {a}/{b}"
                )

    # -- accessors ----------------------------------------------------------

    def theory(self, p: PeerId) -> Theory:
        try:
            return self.peers[p].theory
        except KeyError:
            raise InputError(f"unknown peer {p!r}") from None

    def targets(self, p: PeerId) -> frozenset[Variable]:
        try:
            return self.peers[p].targets
        except KeyError:
            raise InputError(f"unknown peer {p!r}") from None

    def target_variables(self) -> frozenset[Variable]:
        out: set[Variable] = set()
        for spec in self.peers.values():
            out |= spec.targets
        return frozenset(out)

    def union_clauses(self) -> set[Clause]:
        out: set[Clause] = set()
        for spec in self.peers.values():
            out |= spec.theory.clauses
        return out

    def union_theory(self) -> Theory:
        vocab: set[Variable] = set()
        for spec in self.peers.values():
            vocab |= spec.theory.vocabulary
        return Theory(self.union_clauses(), vocab)

    def acq(self, l: Literal, p: PeerId) -> frozenset[PeerId]:
        """Peers that share the variable of l with p through declared edges."""
        if p not in self.peers:
            raise InputError(f"unknown peer {p!r}")
        return self._neighbors.get((l.variable, p), frozenset())

    def is_shared(self, v: Variable, p: PeerId) -> bool:
        return v in self._shared_vars.get(p, ())

    def split_shared(self, c: Clause, p: PeerId) -> tuple[Clause, Clause]:
        """Split c into (shared part, local part) relative to peer p."""
        if p not in self.peers:
            raise InputError(f"unknown peer {p!r}")
        vocab = self.peers[p].theory.vocabulary
        foreign = c.variables() - vocab
        if foreign:
            raise InputError(
                f"clause variables {sorted(map(str, foreign))} not in vocabulary of {p}"
            )
        shared = self._shared_vars[p]
        s = Clause(l for l in c if l.variable in shared)
        local = Clause(l for l in c if l.variable not in shared)
        return s, local

    def in_target_language(self, c: Clause, p: PeerId | None = None) -> bool:
        """Whether every variable of c is a target variable (of p, or anywhere)."""
        targets = self.targets(p) if p is not None else self.target_variables()
        return all(l.variable in targets for l in c)


@dataclass
class PathPropertyReport:
    holds: bool
    witnesses: list[Edge] = field(default_factory=list)


def check_path_property(g: AcquaintanceGraph) -> PathPropertyReport:
    """Check that peers sharing a variable are connected by edges labelled with it.

    This is the completeness condition: without it the engines stay sound
    but may miss consequences. Witnesses are the disconnected peer pairs.
    """
    by_var: dict[Variable, list[PeerId]] = {}
    for p, spec in g.peers.items():
        for v in spec.theory.vocabulary:
            by_var.setdefault(v, []).append(p)
    witnesses: list[Edge] = []
    for v, holders in sorted(by_var.items()):
        if len(holders) < 2:
            continue
        parent: dict[PeerId, PeerId] = {p: p for p in g.peers}

        def find(x: PeerId) -> PeerId:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for ev, a, b in g.edges:
            if ev == v:
                parent[find(a)] = find(b)
        for i, a in enumerate(holders):
            for b in holders[i + 1 :]:
                if find(a) != find(b):
                    witnesses.append((v, a, b))
    return PathPropertyReport(holds=not witnesses, witnesses=witnesses)


def target_consistency_violations(g: AcquaintanceGraph) -> list[Edge]:
    """Edges whose variable is a target on one endpoint only."""
    out = []
    for v, a, b in sorted(g.edges):
        if (v in g.peers[a].targets) != (v in g.peers[b].targets):
            out.append((v, a, b))
    return out


# ---------------------------------------------------------------------------
# Network manifest format
#
#   peer <id> <theory-file>
#   edge <var> <peer> <peer>
#
# Serialization is deterministic: peers then edges, both lexicographic.


def load_network(path: str, validate: bool = True) -> AcquaintanceGraph:
    manifest = os.path.join(path, "manifest.txt") if os.path.isdir(path) else path
    base = os.path.dirname(os.path.abspath(manifest))
    peers: dict[PeerId, PeerSpec] = {}
    edges: set[Edge] = set()
    with open(manifest, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            fields = line.split()
            if fields[0] == "peer" and len(fields) == 3:
                pid, rel = fields[1], fields[2]
                if pid in peers:
                    raise InputError(f"line {lineno}: duplicate peer {pid}")
                with open(os.path.join(base, rel), "r", encoding="utf-8") as tf:
                    entry = parse_theory(tf.read())
                if entry.peer != pid:
                    raise InputError(
                        f"line {lineno}: theory file declares {entry.peer}, manifest says {pid}"
                    )
                peers[pid] = PeerSpec(entry.theory, entry.targets)
            elif fields[0] == "edge" and len(fields) == 4:
                edges.add((Variable.parse(fields[1]), fields[2], fields[3]))
            else:
                raise InputError(f"line {lineno}: bad manifest line {line!r}")
    return AcquaintanceGraph(peers, edges, validate=validate)


def save_network(g: AcquaintanceGraph, out_dir: str) -> str:
    os.makedirs(out_dir, exist_ok=True)
    lines = []
    for pid in sorted(g.peers):
        fname = f"{pid}.theory"
        entry = PeerTheoryFile(pid, g.peers[pid].theory, g.peers[pid].targets)
        with open(os.path.join(out_dir, fname), "w", encoding="utf-8") as fh:
            fh.write(serialize_theory(entry))
        lines.append(f"peer {pid} {fname}")
    for v, a, b in sorted(g.edges, key=lambda e: (str(e[0]), e[1], e[2])):
        lines.append(f"edge {v} {a} {b}")
    manifest = os.path.join(out_dir, "manifest.txt")
    with open(manifest, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
    return manifest
