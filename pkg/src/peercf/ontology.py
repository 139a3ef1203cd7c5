"""Class-based peer ontologies and their propositional encoding.

The data model is deliberately small: ontologies are axioms over class
descriptions built from peer-qualified atomic classes with conjunction,
disjunction and complement; storage declarations introduce extensional
(view) classes included in a description; mappings are axioms relating
classes of different peers. Everything reduces to propositional clauses,
with atomic classes as variables and the extensional classes as the
target variables, and the mappings induce the acquaintance edges.

Query rewriting runs consequence finding on the negated query: answers
that are all-negative clauses over extensional variables are exactly the
negations of the conjunctive rewritings.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .clauses import Clause, EMPTY_CLAUSE, Literal, Theory, Variable
from .deca import ask, ask_clause
from .errors import InputError
from .graph import AcquaintanceGraph, Edge, PeerId, PeerSpec
from .recursive import rcf, rcf_clause
from .saturation import (
    DEFAULT_LIMITS,
    SaturationLimits,
    distribute,
    minimize,
    proper_prime_implicates,
    satisfiable,
)
from .transport import ScheduleConfig

# -- class descriptions -------------------------------------------------------

UNIVERSAL = "top"
EMPTY = "bottom"
ATOMIC = "atomic"
AND = "and"
OR = "or"
NOT = "not"


@dataclass(frozen=True)
class ClassDescription:
    kind: str
    atom: Variable | None = None
    children: tuple["ClassDescription", ...] = ()

    def atoms(self) -> set[Variable]:
        if self.kind == ATOMIC:
            return {self.atom}
        out: set[Variable] = set()
        for ch in self.children:
            out |= ch.atoms()
        return out

    def __str__(self) -> str:
        if self.kind == UNIVERSAL:
            return "top"
        if self.kind == EMPTY:
            return "bottom"
        if self.kind == ATOMIC:
            return str(self.atom)
        if self.kind == NOT:
            return f"(not {self.children[0]})"
        return "(" + self.kind + " " + " ".join(str(c) for c in self.children) + ")"


TOP = ClassDescription(UNIVERSAL)
BOTTOM = ClassDescription(EMPTY)


def atomic(name: str | Variable) -> ClassDescription:
    v = name if isinstance(name, Variable) else Variable.parse(name)
    if not v.peer_qualifier:
        raise InputError(f"atomic class {v} must be peer-qualified")
    return ClassDescription(ATOMIC, atom=v)


def conj(*parts: ClassDescription) -> ClassDescription:
    return ClassDescription(AND, children=tuple(parts))


def disj(*parts: ClassDescription) -> ClassDescription:
    return ClassDescription(OR, children=tuple(parts))


def neg(part: ClassDescription) -> ClassDescription:
    return ClassDescription(NOT, children=(part,))


def parse_description(text: str) -> ClassDescription:
    tokens = text.replace("(", " ( ").replace(")", " ) ").split()
    desc, rest = _parse_tokens(tokens)
    if rest:
        raise InputError(f"trailing tokens in description: {' '.join(rest)}")
    return desc


def _parse_tokens(tokens: list[str]) -> tuple[ClassDescription, list[str]]:
    if not tokens:
        raise InputError("empty class description")
    tok, rest = tokens[0], tokens[1:]
    if tok == "top":
        return TOP, rest
    if tok == "bottom":
        return BOTTOM, rest
    if tok != "(":
        return atomic(tok), rest
    if not rest:
        raise InputError("unbalanced '(' in description")
    op, rest = rest[0], rest[1:]
    if op not in (AND, OR, NOT):
        raise InputError(f"unknown description operator {op!r}")
    children = []
    while rest and rest[0] != ")":
        child, rest = _parse_tokens(rest)
        children.append(child)
    if not rest:
        raise InputError("unbalanced '(' in description")
    rest = rest[1:]
    if op == NOT:
        if len(children) != 1:
            raise InputError("'not' takes exactly one description")
        return neg(children[0]), rest
    if not children:
        raise InputError(f"'{op}' needs at least one child")
    return ClassDescription(op, children=tuple(children)), rest


# -- axioms and schemas -------------------------------------------------------

COMPLETE = "complete"
PARTIAL = "partial"
EQUIV = "equiv"
INCL = "incl"
DISJOINT = "disjoint"


@dataclass(frozen=True)
class Axiom:
    kind: str
    left: ClassDescription
    right: ClassDescription

    def atoms(self) -> set[Variable]:
        return self.left.atoms() | self.right.atoms()


@dataclass(frozen=True)
class StorageDeclaration:
    view: Variable
    bound: ClassDescription


@dataclass(frozen=True)
class Assertion:
    individual: str
    view: Variable


@dataclass
class PeerSchema:
    peer: PeerId
    ontology: list[Axiom] = field(default_factory=list)
    storage: list[StorageDeclaration] = field(default_factory=list)
    mappings: list[Axiom] = field(default_factory=list)
    assertions: list[Assertion] = field(default_factory=list)


@dataclass
class NetworkSchema:
    peers: dict[PeerId, PeerSchema] = field(default_factory=dict)

    def peer(self, pid: PeerId) -> PeerSchema:
        return self.peers.setdefault(pid, PeerSchema(pid))

    def extensional_classes(self) -> set[Variable]:
        return {d.view for ps in self.peers.values() for d in ps.storage}


# -- propositional encoding ---------------------------------------------------

# Formulas are small nested tuples: ("var", v), ("true",), ("false",),
# ("and"|"or", (parts...)), ("not", f), ("implies", a, b), ("iff", a, b).

Formula = tuple


def prop_encode_description(d: ClassDescription) -> Formula:
    if d.kind == UNIVERSAL:
        return ("true",)
    if d.kind == EMPTY:
        return ("false",)
    if d.kind == ATOMIC:
        return ("var", d.atom)
    if d.kind == AND:
        return ("and", tuple(prop_encode_description(c) for c in d.children))
    if d.kind == OR:
        return ("or", tuple(prop_encode_description(c) for c in d.children))
    if d.kind == NOT:
        return ("not", prop_encode_description(d.children[0]))
    raise InputError(f"unknown description kind {d.kind!r}")


def axiom_formula(ax: Axiom) -> Formula:
    left = prop_encode_description(ax.left)
    right = prop_encode_description(ax.right)
    if ax.kind in (PARTIAL, INCL):
        return ("implies", left, right)
    if ax.kind in (COMPLETE, EQUIV):
        return ("iff", left, right)
    if ax.kind == DISJOINT:
        return ("or", (("not", left), ("not", right)))
    raise InputError(f"unknown axiom kind {ax.kind!r}")


def clausify(f: Formula) -> set[Clause]:
    """Equivalence-preserving clausal form with tautologies suppressed."""
    cnf = _cnf(_nnf(f, False))
    return {c for c in cnf if not c.is_tautology()}


def _nnf(f: Formula, negate: bool) -> Formula:
    tag = f[0]
    if tag == "true":
        return ("false",) if negate else ("true",)
    if tag == "false":
        return ("true",) if negate else ("false",)
    if tag == "var":
        return ("nlit", f[1]) if negate else ("plit", f[1])
    if tag == "not":
        return _nnf(f[1], not negate)
    if tag == "and":
        parts = tuple(_nnf(p, negate) for p in f[1])
        return ("or" if negate else "and", parts)
    if tag == "or":
        parts = tuple(_nnf(p, negate) for p in f[1])
        return ("and" if negate else "or", parts)
    if tag == "implies":
        return _nnf(("or", (("not", f[1]), f[2])), negate)
    if tag == "iff":
        both = ("and", (("implies", f[1], f[2]), ("implies", f[2], f[1])))
        return _nnf(both, negate)
    raise InputError(f"unknown formula tag {tag!r}")


def _cnf(f: Formula) -> set[Clause]:
    tag = f[0]
    if tag == "true":
        return set()
    if tag == "false":
        return {EMPTY_CLAUSE}
    if tag == "plit":
        return {Clause([Literal(f[1], True)])}
    if tag == "nlit":
        return {Clause([Literal(f[1], False)])}
    if tag == "and":
        out: set[Clause] = set()
        for part in f[1]:
            out |= _cnf(part)
        return out
    if tag == "or":
        factor_sets = [_cnf(part) for part in f[1]]
        return distribute(factor_sets)
    raise InputError(f"unexpected NNF tag {tag!r}")


def _owner(v: Variable) -> PeerId:
    if not v.peer_qualifier:
        raise InputError(f"class {v} is not peer-qualified")
    return v.peer_qualifier


def prop_encode_schema(schema: NetworkSchema) -> AcquaintanceGraph:
    """Encode every peer's axioms as clauses and derive the edges.

    Target variables are exactly the extensional classes. For every
    mapping declared at P that involves a foreign peer P', every atomic
    class of the mapping owned by P or P' labels an edge between them, and
    enters both vocabularies.
    """
    extensional = schema.extensional_classes()
    clauses: dict[PeerId, set[Clause]] = {}
    vocab: dict[PeerId, set[Variable]] = {}
    for pid, ps in schema.peers.items():
        local: set[Clause] = set()
        for ax in ps.ontology:
            foreign = {v for v in ax.atoms() if _owner(v) != pid}
            if foreign:
                raise InputError(
                    f"ontology axiom of {pid} references foreign classes {sorted(map(str, foreign))}"
                )
            local |= clausify(axiom_formula(ax))
        for decl in ps.storage:
            if _owner(decl.view) != pid:
                raise InputError(f"view {decl.view} not owned by {pid}")
            local |= clausify(
                axiom_formula(Axiom(INCL, ClassDescription(ATOMIC, atom=decl.view), decl.bound))
            )
        for ax in ps.mappings:
            local |= clausify(axiom_formula(ax))
        clauses[pid] = local
        vocab[pid] = {v for c in local for v in c.variables()}
        vocab[pid] |= {v for ax in ps.ontology for v in ax.atoms()}
        vocab[pid] |= {d.view for d in ps.storage} | {
            v for d in ps.storage for v in d.bound.atoms()
        }

    edges: set[Edge] = set()
    for pid, ps in schema.peers.items():
        for ax in ps.mappings:
            atoms = ax.atoms()
            owners = {_owner(v) for v in atoms}
            unknown = owners - set(schema.peers)
            if unknown:
                raise InputError(
                    f"mapping at {pid} references unknown peers {sorted(unknown)}"
                )
            foreign = owners - {pid}
            if not foreign:
                raise InputError(f"mapping at {pid} involves no acquaintance: {ax}")
            for other in foreign:
                for v in atoms:
                    if _owner(v) in (pid, other):
                        edges.add((v, pid, other))
                        vocab[pid].add(v)
                        vocab[other].add(v)

    peers = {
        pid: PeerSpec(
            Theory(clauses[pid], vocab[pid]),
            frozenset(v for v in vocab[pid] if v in extensional),
        )
        for pid in schema.peers
    }
    return AcquaintanceGraph(peers, edges)


# -- schema files -------------------------------------------------------------
#
#   peer <id>
#   class <P:A> complete|partial <desc>
#   equiv|incl|disjoint <desc> <desc>
#   view <P:ViewA> <desc>
#   map <desc> <desc>
#   individual <name> <P:ViewA>
#
# Descriptions are prefix expressions: (and ...), (or ...), (not ...),
# top, bottom, or a qualified name. Lines before the first "peer" header
# are an error. equiv/incl/disjoint lines naming a foreign class are
# recorded as mappings of the current peer; "map" forces an inclusion
# mapping and must involve a foreign class.


def parse_schema(text: str) -> NetworkSchema:
    schema = NetworkSchema()
    current: PeerSchema | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split(None, 1)
        tag = fields[0]
        rest = fields[1] if len(fields) > 1 else ""
        try:
            if tag == "peer":
                pid = rest.strip()
                if not pid or " " in pid:
                    raise InputError("expected 'peer <id>'")
                current = schema.peer(pid)
                continue
            if current is None:
                raise InputError(f"directive {tag!r} before any 'peer' header")
            if tag == "class":
                name_tok, _, desc_text = rest.partition(" ")
                kind_tok, _, desc_text = desc_text.strip().partition(" ")
                if kind_tok not in (COMPLETE, PARTIAL):
                    raise InputError("expected 'class <P:A> complete|partial <desc>'")
                left = atomic(name_tok)
                if _owner(left.atom) != current.peer:
                    raise InputError(f"class {left.atom} not owned by {current.peer}")
                ax = Axiom(COMPLETE if kind_tok == COMPLETE else PARTIAL, left, parse_description(desc_text))
                _record_axiom(current, ax)
            elif tag in (EQUIV, INCL, DISJOINT):
                d1, remainder = _parse_tokens(_tokens(rest))
                d2, leftover = _parse_tokens(remainder)
                if leftover:
                    raise InputError("trailing tokens after second description")
                _record_axiom(current, Axiom(tag, d1, d2))
            elif tag == "view":
                name_tok, _, desc_text = rest.partition(" ")
                view = Variable.parse(name_tok)
                current.storage.append(StorageDeclaration(view, parse_description(desc_text)))
            elif tag == "map":
                d1, remainder = _parse_tokens(_tokens(rest))
                d2, leftover = _parse_tokens(remainder)
                if leftover:
                    raise InputError("trailing tokens after second description")
                ax = Axiom(INCL, d1, d2)
                if all(_owner(v) == current.peer for v in ax.atoms()):
                    raise InputError("mapping involves no foreign class")
                current.mappings.append(ax)
            elif tag == "individual":
                name_tok, _, view_tok = rest.partition(" ")
                current.assertions.append(Assertion(name_tok, Variable.parse(view_tok.strip())))
            else:
                raise InputError(f"unknown directive {tag!r}")
        except InputError as exc:
            raise InputError(f"schema line {lineno}: {exc}") from None
    return schema


def _tokens(text: str) -> list[str]:
    return text.replace("(", " ( ").replace(")", " ) ").split()


def _record_axiom(ps: PeerSchema, ax: Axiom) -> None:
    if any(_owner(v) != ps.peer for v in ax.atoms()):
        ps.mappings.append(ax)
    else:
        ps.ontology.append(ax)


# -- rewriting ----------------------------------------------------------------


@dataclass(frozen=True)
class ConjunctiveRewriting:
    """A conjunction of extensional classes subsumed by the query."""

    conjuncts: frozenset[Variable]

    @staticmethod
    def from_clause(c: Clause) -> "ConjunctiveRewriting":
        return ConjunctiveRewriting(frozenset(l.variable for l in c))

    def as_clause(self) -> Clause:
        return Clause(Literal(v, False) for v in self.conjuncts)

    def __str__(self) -> str:
        return " & ".join(sorted(str(v) for v in self.conjuncts))


ENGINES = ("deca", "recursive", "oracle")


def _negated_query_answers(
    q_atom: Variable,
    g: AcquaintanceGraph,
    engine: str,
    schedule: ScheduleConfig,
    limits: SaturationLimits,
) -> set[Clause]:
    peer = _owner(q_atom)
    if peer not in g.peers:
        raise InputError(f"query references unknown peer {peer}")
    if q_atom not in g.theory(peer).vocabulary:
        raise InputError(f"query class {q_atom} unknown on {peer}")
    query = Literal(q_atom, False)
    if engine == "deca":
        return ask(g, peer, query, schedule=schedule, limits=limits).answer_set()
    if engine == "recursive":
        return rcf(query, peer, g, limits)
    if engine == "oracle":
        answers = proper_prime_implicates(query, g.union_theory(), limits)
        targets = g.target_variables()
        return {c for c in answers if all(l.variable in targets for l in c)}
    raise InputError(f"unknown engine {engine!r}; expected one of {ENGINES}")


def rewritings(
    query: ClassDescription,
    schema: NetworkSchema | AcquaintanceGraph,
    engine: str = "recursive",
    maximal: bool = True,
    schedule: ScheduleConfig = ScheduleConfig(),
    limits: SaturationLimits = DEFAULT_LIMITS,
) -> set[ConjunctiveRewriting]:
    """Maximal proper conjunctive rewritings of a positive query.

    The query must combine atomic classes of one peer with conjunction and
    disjunction. Consequence finding runs on the negated atomic
    components; candidate clauses that are all-negative over extensional
    variables are combined along the query structure, filtered for
    properness (satisfiable together with the schema) and minimized.
    With maximal=False the raw candidate set is returned, unfiltered, to
    observe the anytime stream.
    """
    g = schema if isinstance(schema, AcquaintanceGraph) else prop_encode_schema(schema)
    owners = {_owner(v) for v in query.atoms()}
    if len(owners) != 1:
        raise InputError(f"query must use a single peer's vocabulary, got {sorted(owners)}")
    extensional = g.target_variables()

    def collect(d: ClassDescription) -> set[Clause]:
        if d.kind == ATOMIC:
            answers = _negated_query_answers(d.atom, g, engine, schedule, limits)
            return {
                c
                for c in answers
                if len(c) > 0
                and all((not l.positive) and l.variable in extensional for l in c)
            }
        if d.kind == AND:
            return distribute([collect(ch) for ch in d.children])
        if d.kind == OR:
            out: set[Clause] = set()
            for ch in d.children:
                out |= collect(ch)
            return out
        raise InputError(
            "queries are positive combinations of atomic classes (and/or only)"
        )

    candidates = collect(query)
    if not maximal:
        return {ConjunctiveRewriting.from_clause(c) for c in candidates}
    union = g.union_clauses()
    proper = set()
    for c in candidates:
        units = [Clause([l.complement]) for l in c]
        if satisfiable(list(union) + units):
            proper.add(c)
    return {ConjunctiveRewriting.from_clause(c) for c in minimize(proper)}


# -- schema satisfiability ----------------------------------------------------


def check_schema_satisfiability(
    schema: NetworkSchema | AcquaintanceGraph,
    engine: str = "recursive",
    limits: SaturationLimits = DEFAULT_LIMITS,
) -> bool:
    """True iff the encoded union of all peer theories has a model.

    The distributed check simulates peers joining clause by clause: before
    a clause enters the network it is asked as a query, and an empty
    clause among the combined answers convicts the union. The "oracle"
    engine is the centralized backtracking fallback.
    """
    g = schema if isinstance(schema, AcquaintanceGraph) else prop_encode_schema(schema)
    if engine == "oracle":
        return satisfiable(g.union_clauses())
    if engine not in ("recursive", "deca"):
        raise InputError(f"unknown engine {engine!r}")

    grown: dict[PeerId, set[Clause]] = {pid: set() for pid in g.peers}

    def current_graph() -> AcquaintanceGraph:
        return AcquaintanceGraph(
            {
                pid: PeerSpec(
                    Theory(grown[pid], g.peers[pid].theory.vocabulary),
                    g.peers[pid].targets,
                )
                for pid in g.peers
            },
            g.edges,
        )

    for pid in sorted(g.peers):
        for c in sorted(g.theory(pid).clauses, key=Clause.sort_key):
            if c.is_tautology():
                grown[pid].add(c)
                continue
            stage = current_graph()
            if engine == "deca":
                answers = ask_clause(stage, pid, c, limits=limits).answer_set()
            else:
                answers = rcf_clause(c, pid, stage, limits)
            if EMPTY_CLAUSE in answers:
                return False
            grown[pid].add(c)
    return True
