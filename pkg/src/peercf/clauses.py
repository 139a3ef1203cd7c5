"""Propositional clauses over peer-qualified variables.

Variables are identified by a ``(peer_qualifier, name)`` pair; benchmark
variables leave the qualifier empty, ontology variables use it for the
owning peer (rendered ``Peer:Name``). Clauses are duplicate-free
disjunctions kept in a canonical sorted order so that equal clauses hash
equal and iteration order is reproducible everywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .errors import InputError


@dataclass(frozen=True, order=True)
class Variable:
    peer_qualifier: str
    name: str

    def __str__(self) -> str:
        if self.peer_qualifier:
            return f"{self.peer_qualifier}:{self.name}"
        return self.name

    @staticmethod
    def parse(token: str) -> "Variable":
        if not token:
            raise InputError("empty variable token")
        if ":" in token:
            qualifier, _, name = token.partition(":")
            if not qualifier or not name:
                raise InputError(f"bad qualified variable {token!r}")
            return Variable(qualifier, name)
        return Variable("", token)


def var(token: str) -> Variable:
    """Shorthand used heavily in tests and fixtures."""
    return Variable.parse(token)


@dataclass(frozen=True, order=True)
class Literal:
    variable: Variable
    positive: bool = True

    @property
    def complement(self) -> "Literal":
        return Literal(self.variable, not self.positive)

    def __str__(self) -> str:
        return str(self.variable) if self.positive else f"-{self.variable}"

    @staticmethod
    def parse(token: str) -> "Literal":
        if token.startswith("-"):
            return Literal(Variable.parse(token[1:]), False)
        return Literal(Variable.parse(token), True)


def lit(token: str) -> Literal:
    return Literal.parse(token)


@dataclass(frozen=True)
class Clause:
    """A duplicate-free disjunction of literals; the empty clause is falsity.

    A clause may be tautological (both polarities of a variable); callers
    that must reject tautologies check ``is_tautology`` explicitly.
    """

    literals: tuple[Literal, ...] = ()
    _sorted: bool = field(default=False, repr=False, compare=False)

    def __init__(self, literals: Iterable[Literal] = ()):
        ordered = tuple(sorted(set(literals)))
        object.__setattr__(self, "literals", ordered)
        object.__setattr__(self, "_sorted", True)

    def __iter__(self) -> Iterator[Literal]:
        return iter(self.literals)

    def __len__(self) -> int:
        return len(self.literals)

    def __contains__(self, literal: Literal) -> bool:
        return literal in self.literals

    @property
    def is_empty(self) -> bool:
        return not self.literals

    def variables(self) -> frozenset[Variable]:
        return frozenset(l.variable for l in self.literals)

    def is_tautology(self) -> bool:
        seen = set(self.literals)
        return any(l.complement in seen for l in self.literals)

    def union(self, other: "Clause") -> "Clause":
        return Clause(self.literals + other.literals)

    def without(self, literal: Literal) -> "Clause":
        return Clause(l for l in self.literals if l != literal)

    def sort_key(self) -> tuple:
        return (len(self.literals), self.literals)

    def __str__(self) -> str:
        if not self.literals:
            return "[]"
        return ",".join(str(l) for l in self.literals)

    @staticmethod
    def parse(text: str) -> "Clause":
        text = text.strip()
        if text in ("[]", ""):
            return EMPTY_CLAUSE
        return Clause(Literal.parse(tok) for tok in text.split(","))


EMPTY_CLAUSE = Clause(())


def clause(*tokens: str) -> Clause:
    """Build a clause from literal tokens, e.g. ``clause("-Far", "Exp")``."""
    return Clause(Literal.parse(t) for t in tokens)


@dataclass(frozen=True)
class Theory:
    """A finite clause set together with its (possibly larger) vocabulary."""

    clauses: frozenset[Clause]
    vocabulary: frozenset[Variable]

    def __init__(self, clauses: Iterable[Clause] = (), vocabulary: Iterable[Variable] = ()):
        clause_set = frozenset(clauses)
        vocab = frozenset(vocabulary)
        used = frozenset(v for c in clause_set for v in c.variables())
        missing = used - vocab
        if missing:
            vocab = vocab | missing
        object.__setattr__(self, "clauses", clause_set)
        object.__setattr__(self, "vocabulary", vocab)

    def __contains__(self, c: Clause) -> bool:
        return c in self.clauses

    def __len__(self) -> int:
        return len(self.clauses)

    def sorted_clauses(self) -> list[Clause]:
        return sorted(self.clauses, key=Clause.sort_key)

    def with_vocabulary(self, extra: Iterable[Variable]) -> "Theory":
        return Theory(self.clauses, self.vocabulary | frozenset(extra))


# ---------------------------------------------------------------------------
# Theory file format
#
#   p <peer-id>
#   v <name> [target]
#   c <lit> <lit> ...
#
# Literals are "name" or "-name"; "#" starts a comment. Parsing and
# serialization round-trip exactly: parse(serialize(parse(text))) == parse(text)
# and serialize is a fixpoint of parse .


@dataclass(frozen=True)
class PeerTheoryFile:
    peer: str
    theory: Theory
    targets: frozenset[Variable]


def parse_theory(text: str) -> PeerTheoryFile:
    peer = None
    vocab: list[Variable] = []
    targets: set[Variable] = set()
    clauses: list[Clause] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        tag, args = fields[0], fields[1:]
        if tag == "p":
            if peer is not None:
                raise InputError(f"line {lineno}: duplicate peer header")
            if len(args) != 1:
                raise InputError(f"line {lineno}: expected 'p <peer-id>'")
            peer = args[0]
        elif tag == "v":
            if len(args) not in (1, 2) or (len(args) == 2 and args[1] != "target"):
                raise InputError(f"line {lineno}: expected 'v <name> [target]'")
            v = Variable.parse(args[0])
            vocab.append(v)
            if len(args) == 2:
                targets.add(v)
        elif tag == "c":
            clauses.append(Clause(Literal.parse(tok) for tok in args))
        else:
            raise InputError(f"line {lineno}: unknown directive {tag!r}")
    if peer is None:
        raise InputError("missing 'p <peer-id>' header")
    theory = Theory(clauses, vocab)
    unknown = theory.vocabulary - frozenset(vocab)
    if unknown:
        names = ", ".join(sorted(str(v) for v in unknown))
        raise InputError(f"clause variables not declared: {names}")
    return PeerTheoryFile(peer=peer, theory=theory, targets=frozenset(targets))


def serialize_theory(entry: PeerTheoryFile) -> str:
    lines = [f"p {entry.peer}"]
    for v in sorted(entry.theory.vocabulary):
        suffix = " target" if v in entry.targets else ""
        lines.append(f"v {v}{suffix}")
    for c in entry.theory.sorted_clauses():
        lines.append("c " + " ".join(str(l) for l in c))
    return "\n".join(lines) + "\n"
