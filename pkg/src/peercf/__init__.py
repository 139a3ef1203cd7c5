"""Peer-to-peer propositional consequence finding.

A network of peers, each holding a clausal theory over its own
vocabulary, connected by shared-variable edges. Queries are literals (or
clauses) posed to one peer; answers are the consequences over target
variables, computed either by the distributed message-passing engine, the
equivalent single-process recursive engine, or the centralized saturation
oracle used to validate both.
"""

from .clauses import (
    Clause,
    EMPTY_CLAUSE,
    Literal,
    PeerTheoryFile,
    Theory,
    Variable,
    clause,
    lit,
    parse_theory,
    serialize_theory,
    var,
)
from .deca import Message, PeerRuntime, QueryResult, USER, ask, ask_clause, build_runtimes
from .errors import InputError, ProtocolError, ResourceCapError
from .graph import (
    AcquaintanceGraph,
    PeerSpec,
    check_path_property,
    load_network,
    save_network,
)
from .recursive import rcf, rcf_clause
from .saturation import (
    SaturationLimits,
    distribute,
    entails,
    minimize,
    prime_implicates,
    proper_prime_implicates,
    resolve,
    resolvent_set,
    satisfiable,
    subsumes,
)
from .transport import Fabric, RunReport, ScheduleConfig

__version__ = "0.1.0"

__all__ = [
    "AcquaintanceGraph",
    "Clause",
    "EMPTY_CLAUSE",
    "Fabric",
    "InputError",
    "Literal",
    "Message",
    "PeerRuntime",
    "PeerSpec",
    "PeerTheoryFile",
    "ProtocolError",
    "QueryResult",
    "ResourceCapError",
    "RunReport",
    "SaturationLimits",
    "ScheduleConfig",
    "Theory",
    "USER",
    "Variable",
    "ask",
    "ask_clause",
    "build_runtimes",
    "check_path_property",
    "clause",
    "distribute",
    "entails",
    "lit",
    "load_network",
    "minimize",
    "parse_theory",
    "prime_implicates",
    "proper_prime_implicates",
    "rcf",
    "rcf_clause",
    "resolve",
    "resolvent_set",
    "satisfiable",
    "save_network",
    "serialize_theory",
    "subsumes",
    "var",
]
