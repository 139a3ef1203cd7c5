"""Shared test networks.

The four-peer travel network: a tour operator (P1) whose far destinations
are Chile or Kenya, a police-regulation peer (P2), a sanitary-advice peer
(P3) and an accommodation peer (P4). The four-person restaurant-bookmark
network exercises the ontology encoding.
"""

from peercf import AcquaintanceGraph, PeerSpec, Theory, clause, var
from peercf.ontology import (
    Axiom,
    COMPLETE,
    DISJOINT,
    EQUIV,
    INCL,
    NetworkSchema,
    PARTIAL,
    StorageDeclaration,
    atomic,
    conj,
    disj,
)


def travel_graph() -> AcquaintanceGraph:
    p1 = Theory(
        [clause("-Far", "Chile", "Kenya"), clause("-Far", "Int"), clause("-Far", "Exp")],
        [var(n) for n in ("Far", "Chile", "Kenya", "Int", "Exp")],
    )
    p2 = Theory([clause("-Int", "Pass")], [var("Int"), var("Pass")])
    p3 = Theory(
        [clause("-Kenya", "YellowFev"), clause("-Kenya", "-Lodge", "Palu")],
        [var(n) for n in ("Kenya", "YellowFev", "Lodge", "Palu")],
    )
    p4 = Theory(
        [clause("-Kenya", "Lodge"), clause("-Chile", "Hotel"), clause("-Palu", "AntiM")],
        [var(n) for n in ("Kenya", "Lodge", "Chile", "Hotel", "Palu", "AntiM")],
    )
    peers = {
        "P1": PeerSpec(p1, frozenset({var("Exp")})),
        "P2": PeerSpec(p2, frozenset({var("Pass")})),
        "P3": PeerSpec(p3, frozenset({var("Lodge"), var("YellowFev"), var("Palu")})),
        "P4": PeerSpec(p4, frozenset({var("Lodge"), var("Hotel"), var("Palu"), var("AntiM")})),
    }
    edges = {
        (var("Int"), "P1", "P2"),
        (var("Kenya"), "P1", "P3"),
        (var("Kenya"), "P1", "P4"),
        (var("Chile"), "P1", "P4"),
        (var("Lodge"), "P3", "P4"),
        (var("Palu"), "P3", "P4"),
    }
    return AcquaintanceGraph(peers, edges)


TRAVEL_EXPECTED = {
    clause("Exp"),
    clause("Pass"),
    clause("Hotel", "Lodge"),
    clause("Hotel", "Palu"),
    clause("Hotel", "AntiM"),
    clause("Hotel", "YellowFev"),
}


def restaurant_schema() -> NetworkSchema:
    schema = NetworkSchema()

    ann = schema.peer("Ann")
    ann.ontology.append(Axiom(PARTIAL, atomic("Ann:R"), atomic("Ann:G")))
    ann.ontology.append(
        Axiom(COMPLETE, atomic("Ann:R"), disj(atomic("Ann:S1"), atomic("Ann:S2"), atomic("Ann:S3")))
    )
    for a, b in (("Ann:S1", "Ann:S2"), ("Ann:S1", "Ann:S3"), ("Ann:S2", "Ann:S3")):
        ann.ontology.append(Axiom(DISJOINT, atomic(a), atomic(b)))
    for sub in ("Ann:C", "Ann:T", "Ann:V"):
        ann.ontology.append(Axiom(PARTIAL, atomic(sub), atomic("Ann:O")))
    for view, cls in (
        ("Ann:ViewS2", "Ann:S2"),
        ("Ann:ViewC", "Ann:C"),
        ("Ann:ViewV", "Ann:V"),
        ("Ann:ViewT", "Ann:T"),
        ("Ann:ViewI", "Ann:I"),
    ):
        ann.storage.append(StorageDeclaration(var(view), atomic(cls)))
    ann.mappings.append(Axiom(INCL, atomic("Bob:Q"), atomic("Ann:G")))
    ann.mappings.append(Axiom(INCL, atomic("Ann:O"), atomic("Bob:A")))

    bob = schema.peer("Bob")
    for view, cls in (("Bob:ViewA", "Bob:A"), ("Bob:ViewQ", "Bob:Q")):
        bob.storage.append(StorageDeclaration(var(view), atomic(cls)))
    bob.mappings.append(Axiom(EQUIV, atomic("Bob:A"), atomic("Ann:O")))

    chris = schema.peer("Chris")
    for view, cls in (("Chris:ViewF", "Chris:F"), ("Chris:ViewCA", "Chris:CA")):
        chris.storage.append(StorageDeclaration(var(view), atomic(cls)))
    chris.mappings.append(Axiom(INCL, atomic("Chris:F"), atomic("Dora:SF")))

    dora = schema.peer("Dora")
    dora.ontology.append(Axiom(PARTIAL, atomic("Dora:P"), atomic("Dora:DP")))
    dora.ontology.append(Axiom(PARTIAL, atomic("Dora:SF"), atomic("Dora:DP")))
    dora.storage.append(StorageDeclaration(var("Dora:ViewP"), atomic("Dora:P")))
    dora.mappings.append(Axiom(INCL, conj(atomic("Bob:A"), atomic("Ann:G")), atomic("Dora:DP")))

    return schema


RESTAURANT_EXPECTED_CLAUSES = {
    "Ann": {
        clause("-Ann:R", "Ann:G"),
        clause("-Ann:R", "Ann:S1", "Ann:S2", "Ann:S3"),
        clause("-Ann:S1", "Ann:R"),
        clause("-Ann:S2", "Ann:R"),
        clause("-Ann:S3", "Ann:R"),
        clause("-Ann:S1", "-Ann:S2"),
        clause("-Ann:S1", "-Ann:S3"),
        clause("-Ann:S2", "-Ann:S3"),
        clause("-Ann:C", "Ann:O"),
        clause("-Ann:T", "Ann:O"),
        clause("-Ann:V", "Ann:O"),
        clause("-Ann:ViewS2", "Ann:S2"),
        clause("-Ann:ViewC", "Ann:C"),
        clause("-Ann:ViewV", "Ann:V"),
        clause("-Ann:ViewT", "Ann:T"),
        clause("-Ann:ViewI", "Ann:I"),
        clause("-Bob:Q", "Ann:G"),
        clause("-Ann:O", "Bob:A"),
    },
    "Bob": {
        clause("-Bob:ViewA", "Bob:A"),
        clause("-Bob:ViewQ", "Bob:Q"),
        clause("-Bob:A", "Ann:O"),
        clause("-Ann:O", "Bob:A"),
    },
    "Chris": {
        clause("-Chris:ViewF", "Chris:F"),
        clause("-Chris:ViewCA", "Chris:CA"),
        clause("-Chris:F", "Dora:SF"),
    },
    "Dora": {
        clause("-Dora:P", "Dora:DP"),
        clause("-Dora:SF", "Dora:DP"),
        clause("-Dora:ViewP", "Dora:P"),
        clause("-Bob:A", "-Ann:G", "Dora:DP"),
    },
}
