import itertools
import random
from collections import Counter

import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from bfcalc import engine as E
from bfcalc.catalog import cp2, k3, k3_sum
from bfcalc.errors import Inconsistent, PreconditionViolation
from bfcalc.fourman import ManifoldDescriptor, SurfaceData, blowup_times, glue
from support import diagonal, naive_infer, outcome, random_kb, snapshot

Z22 = (0,) * 22
B = E.BF


def axioms():
    return E.load_catalog_axioms(E.KnowledgeBase())


# -- lattice ---------------------------------------------------------------


def test_join_table():
    assert E.join(B.UNKNOWN, B.ZERO) == B.ZERO
    assert E.join(B.NONZERO, B.NONZERO_FREE) == B.NONZERO_FREE
    assert E.join(B.NONZERO_TORSION, B.NONZERO) == B.NONZERO_TORSION
    assert E.join(B.ZERO, B.NONZERO) is None
    assert E.join(B.NONZERO_FREE, B.NONZERO_TORSION) is None
    for a, b in itertools.product(B, repeat=2):
        assert E.join(a, b) == E.join(b, a)
        j = E.join(a, b)
        if j is not None:
            assert E.join(j, a) == j and E.join(j, b) == j


def test_sw_facts():
    assert E.SWFact(3).parity == "odd" and E.SWFact(3).nonzero
    assert not E.SWFact(parity="even").nonzero
    assert E.join_sw(E.SWFact(parity="odd"), E.SWFact(5)) == E.SWFact(5)
    assert E.join_sw(E.SWFact(2), E.SWFact(parity="odd")) is None
    assert E.SWFact.parse("odd") == E.SWFact(parity="odd")
    with pytest.raises(ValueError):
        E.SWFact(2, "odd")


# -- forced and local rules ---------------------------------------------------


def test_empty_kb_is_unknown():
    _, v = E.query(E.KnowledgeBase(), "K3", Z22)
    assert v.state == B.UNKNOWN and str(v.group) == "Z"


def test_k3_from_axiom():
    kb, v = E.query(axioms(), "K3", Z22)
    assert v.state == B.NONZERO_FREE
    assert v.provenance.rule == "group-torsion-type"
    text = E.explain(kb, ("K3", Z22))
    assert text.startswith("FACT BF(K3, 0) = NonzeroFree BY group-torsion-type FROM")


def test_forced_rules():
    X = diagonal("N", 0, 3)
    _, v = E.query(E.KnowledgeBase(), X.name, (1, 1, 1)) if False else E.query(E.add_manifold(E.KnowledgeBase(), X), "N", (1, 1, 1))
    assert v.state == B.NONZERO and v.provenance.rule == "negative-definite-nonvanishing"
    kb = E.add_manifold(E.KnowledgeBase(), cp2())
    _, v = E.query(kb, "CP2", (3,))
    assert v.state == B.ZERO  # d = 0 on b2+ = 1
    assert v.provenance.rule == "b2plus-one-vanishing"
    _, v = E.query(kb, "CP2", (1,))
    assert v.state == B.ZERO and v.provenance.rule == "negative-dimension-vanishing"


def test_trivial_group_forces_zero():
    X = diagonal("T", 4, 1)
    kb, v = E.query(E.add_manifold(E.KnowledgeBase(), X), "T", (3, 3, 3, 1, 1))
    assert str(kb.group(("T", (3, 3, 3, 1, 1)))) == "0"
    assert v.state == B.ZERO and v.provenance.rule == "trivial-group-vanishing"
    kb = E.assert_fact(E.add_manifold(E.KnowledgeBase(), X), "T", (3, 3, 3, 1, 1), bf="Nonzero")
    with pytest.raises(Inconsistent):
        E.infer(kb)


def test_sw_consistency():
    kb = E.assert_fact(E.KnowledgeBase(), "K3", Z22, sw=E.SWFact(parity="odd"))
    assert E.query(kb, "K3", Z22)[1].state == B.NONZERO_FREE
    kb = E.assert_fact(E.KnowledgeBase(), "K3", Z22, bf="Zero")
    kb = E.infer(kb)
    assert kb.sw_fact(("K3", Z22)) == E.SWFact(0)


def test_inconsistency_chain():
    kb = E.assert_fact(axioms(), "K3", Z22, bf="Zero")
    with pytest.raises(Inconsistent) as err:
        E.infer(kb)
    rules = [p.rule if p else None for _, p in err.value.chain]
    assert "asserted" in rules


def test_torsion_guard():
    kb = E.add_manifold(E.KnowledgeBase(), k3_sum(2))
    with pytest.raises(Inconsistent):
        E.assert_fact(kb, "#2K3", (0,) * 44, bf="NonzeroFree")  # d = 1, group is torsion


def test_unknown_manifold_and_bad_class():
    with pytest.raises(PreconditionViolation):
        E.KnowledgeBase().manifold("nope")
    kb = E.add_manifold(E.KnowledgeBase(), cp2())
    with pytest.raises(Exception):
        E.query(kb, "CP2", (2,))
    other = ManifoldDescriptor("CP2", 0, 0, 1, [[-1]])
    with pytest.raises(PreconditionViolation):
        E.add_manifold(kb, other)


# -- gluing ---------------------------------------------------------------------


@pytest.mark.parametrize("m, state, group", [(1, "NonzeroFree", "Z"), (2, "NonzeroTorsion", "Z/2"), (3, "NonzeroTorsion", "Z + Z/2"), (4, "NonzeroTorsion", "Z/8"), (5, "Zero", "Z"), (6, "Zero", "Z/4")])
def test_k3_sums(m, state, group):
    X = k3_sum(m)
    kb, v = E.query(axioms(), X.name, (0,) * X.rank)
    assert (v.state.value, str(v.group)) == (state, group)
    if m <= 4:
        assert E.bf_dimension(kb, X.name) == m - 1


def test_gluing_restriction_and_vanishing():
    X = k3_sum(2)
    kb = E.assert_fact(E.KnowledgeBase(), X.name, (0,) * 44, bf="Nonzero")
    kb = E.infer(kb)
    assert kb.state(("K3", Z22)) == B.NONZERO_FREE
    assert kb.bf[("K3", Z22)][1].rule in ("gluing-nonvanishing-restriction", "group-torsion-type")
    kb = E.assert_fact(E.KnowledgeBase(), "K3", Z22, bf="Zero")
    kb, v = E.query(kb, X.name, (0,) * 44)
    assert v.state == B.ZERO


# -- transfer --------------------------------------------------------------------


def pair_kb(large_state, cl, cs, pos, neg=1):
    A, Bm = diagonal("A", pos, neg), diagonal("B", pos, neg)
    kb = E.add_manifold(E.add_manifold(E.KnowledgeBase(), A), Bm)
    kb = E.declare_common_complement(kb, ("B", cs), ("A", cl))
    kb = E.assert_fact(kb, "A", cl, bf=large_state)
    return E.query(kb, "B", cs)


def test_transfer_condition_star():
    kb, v = pair_kb("NonzeroTorsion", (3, 3, 3, 3, 1, 1), (3, 3, 3, 1, 1, 1), 5)
    assert (kb.dim(("A", (3, 3, 3, 3, 1, 1))), kb.dim(("B", (3, 3, 3, 1, 1, 1)))) == (2, 0)
    assert v.state == B.ZERO and v.provenance.rule == "vanishing-under-condition-star"


def test_transfer_three_to_one():
    # b2+ = 10: both groups are Z/2, so only the restriction map decides
    kb, v = pair_kb("Nonzero", (3,) * 7 + (1,) * 4, (3,) * 6 + (1,) * 5, 10)
    assert str(kb.group(("A", (3,) * 7 + (1,) * 4))) == "Z/2" and str(kb.group(("B", (3,) * 6 + (1,) * 5))) == "Z/2"
    assert v.state == B.ZERO and v.provenance.rule == "trivial-restriction-3-to-1"


@pytest.mark.parametrize("state", ["Zero", "NonzeroFree", "Nonzero"])
def test_transfer_equal_dimension(state):
    _, v = pair_kb(state, (3, 3, 3, 1, 1, 1), (1, 3, 3, 3, 1, 1), 5)
    want = "NonzeroFree" if state == "Nonzero" else state  # d = 0: group Z
    assert v.state.value == want


def test_transfer_nonvanishing_upward():
    A, Bm = diagonal("A", 5, 1), diagonal("B", 5, 1)
    kb = E.add_manifold(E.add_manifold(E.KnowledgeBase(), A), Bm)
    kb = E.declare_common_complement(kb, ("B", (3, 3, 3, 1, 1, 1)), ("A", (3, 3, 3, 3, 1, 1)))
    kb = E.assert_fact(kb, "B", (3, 3, 3, 1, 1, 1), bf="Nonzero")
    with pytest.raises(Inconsistent):
        # nonzero below forces nonzero above, but condition (*) there kills the bottom
        E.infer(E.assert_fact(kb, "A", (3, 3, 3, 3, 1, 1), bf="NonzeroTorsion"))
    kb2, v = E.query(kb, "A", (3, 3, 3, 3, 1, 1))
    assert v.state.nonzero


def test_common_complement_requires_matching_betti():
    kb = E.add_manifold(E.add_manifold(E.KnowledgeBase(), diagonal("A", 3, 1)), diagonal("B", 5, 1))
    with pytest.raises(PreconditionViolation):
        E.declare_common_complement(kb, ("A", (1, 1, 1, 1)), ("B", (1,) * 6))


# -- blowups and basic classes ----------------------------------------------------


@pytest.mark.parametrize("k", range(1, 7))
def test_blowup_basic_classes(k):
    Y = blowup_times(k3(), k)
    kb = E.infer(E.add_manifold(axioms(), Y))
    got = E.confirmed_classes(kb, Y.name)
    assert got == {Z22 + s for s in itertools.product((1, -1), repeat=k)}


def test_blowup_non_simple_class_vanishes():
    Y = blowup_times(k3(), 1)
    kb, v = E.query(E.add_manifold(axioms(), Y), Y.name, Z22 + (3,))
    assert v.state == B.ZERO


def test_log_transform_classes():
    F = SurfaceData("immersed_sphere", (1,) + (0,) * 21, positive_double_points=1)
    for p in range(1, 6):
        _, Xp, res = E.basic_classes_log_transform(axioms(), "K3", F, p)
        if p == 1:
            assert set(res) == {Z22}
            continue
        assert sorted(c[-1] for c in res) == [2 * k - (p - 1) for k in range(p)]
    with pytest.raises(PreconditionViolation):
        E.query(E.add_manifold(axioms(), Xp), Xp.name, Z22 + (1,))  # wrong parity of t for p = 5
    _, X2, _ = E.basic_classes_log_transform(axioms(), "K3", F, 2)
    # t = 7 is (4 alpha, -1): an honest class over an unknown base class, so no verdict
    kb, v = E.query(E.add_manifold(axioms(), X2), X2.name, Z22 + (7,))
    assert v.state == B.UNKNOWN
    assert X2.realize(Z22 + (7,)) == X2.realize((4,) + (0,) * 21 + (-1,))


# -- flags ------------------------------------------------------------------------


def test_symplectic_flags():
    kb = E.infer(E.add_manifold(E.KnowledgeBase(), k3()))
    assert kb.flag("K3", E.BLOWUP_SIMPLE) is True
    assert kb.flag("K3", E.homogeneous(0)) is True
    kb = E.infer(E.add_manifold(kb, k3_sum(2)))
    assert kb.flag("#2K3", E.BLOWUP_SIMPLE) is True
    assert kb.flag("#2K3", E.homogeneous(1)) is True


def test_homogeneous_vanishing():
    X = diagonal("H", 3, 1)
    kb = E.assert_flag(E.add_manifold(E.KnowledgeBase(), X), "H", E.homogeneous(0))
    # (3,1,1,1): c^2 = 10, chi = 6, sigma = 2 -> d = -2; (3,3,1,1): d = 0; (3,3,3,1): d = 2
    kb, v = E.query(kb, "H", (3, 3, 3, 1))
    assert v.state == B.ZERO and v.provenance.rule == "homogeneous-type-vanishing"


def test_surface_flags():
    X = ManifoldDescriptor("T", 0, 3, 1, [[0, 1, 0, 0], [1, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, -1]])
    kb = E.add_manifold(E.KnowledgeBase(), X)
    kb = E.add_surface(kb, "T", SurfaceData("embedded", (1, 1, 0, 0), genus=2))
    assert E.infer(kb).flag("T", E.BLOWUP_SIMPLE) is True
    kb = E.add_surface(E.add_manifold(E.KnowledgeBase(), X), "T", SurfaceData("immersed_sphere", (1, 1, 0, 0), positive_double_points=2))
    assert E.infer(kb).flag("T", E.BLOWUP_SIMPLE) is True


def test_mod2_criterion():
    kb = E.assert_flag(E.add_manifold(E.KnowledgeBase(), k3()), "K3", E.CUP_CONDITION)
    assert E.infer(kb).flag("K3", E.MOD2_SIMPLE) is True


# -- BF dimension and verdicts -----------------------------------------------------


def test_bf_dimension_conventions():
    kb = E.add_manifold(E.add_manifold(E.KnowledgeBase(), cp2()), diagonal("N", 0, 2))
    assert E.bf_dimension(kb, "CP2") == E.POS_INF
    assert E.bf_dimension(kb, "N") == E.NEG_INF
    kb = E.add_manifold(kb, "S4")
    assert E.bf_dimension(kb, "S4") == -1
    kb = E.add_manifold(kb, k3_sum(2))
    assert str(E.bf_dimension(kb, "#2K3")) == "Unknown(>= 1)"


def test_decomposition_verdicts():
    kb = axioms()
    K = k3()
    assert E.decomposition_verdict(kb, [K, K], [K]).kind == "Obstructed"
    P = ManifoldDescriptor("P", 0, 6, 38, k3_sum(2).form)
    assert E.decomposition_verdict(kb, [K, K], [P]).kind == "Consistent"
    # without a known odd SW value on the pieces nothing can be said
    A = ManifoldDescriptor("A", 0, 3, 19, k3().form)
    Bm = ManifoldDescriptor("B", 0, 3, 19, k3().form)
    v = E.decomposition_verdict(E.KnowledgeBase(), [A, Bm], [P])
    assert v.kind == "Unknown"
    Q = [diagonal("Q1", 2, 13), diagonal("Q2", 2, 13), diagonal("Q3", 2, 12)]
    v = E.decomposition_verdict(kb, [K, K], Q)
    assert v.kind == "Obstructed" and "k >= l fails (2 < 3)" in v.reasons
    R = [diagonal("R1", 1, 19), diagonal("R2", 5, 19)]
    v = E.decomposition_verdict(kb, [K, K], R)
    assert v.kind == "Obstructed"


def test_adjunction_verdicts():
    sphere = SurfaceData("embedded", (1, 1) + (0,) * 20, genus=0)
    kb, v = E.adjunction_verdict(E.KnowledgeBase(), "K3", Z22, sphere)
    assert v.kind == "Violated" and kb.state(("K3", Z22)) == B.ZERO
    # with the canonical class known to be basic, the same surface is a contradiction
    with pytest.raises(Inconsistent):
        E.adjunction_verdict(axioms(), "K3", Z22, sphere)
    S = SurfaceData("embedded", (1, 1) + (0,) * 20, genus=2)
    assert E.adjunction_verdict(axioms(), "K3", Z22, S)[1].kind == "Holds"
    with pytest.raises(PreconditionViolation):
        E.adjunction_verdict(axioms(), "K3", Z22, SurfaceData("embedded", (1, -1) + (0,) * 20, genus=3))


def test_immersed_adjunction_alternative():
    X = diagonal("D", 3, 1)
    c = (3, 3, 1, 1)  # d = 0
    kb = E.assert_fact(E.add_manifold(E.KnowledgeBase(), X), "D", c, bf="Nonzero")
    S = SurfaceData("immersed_sphere", (1, 0, 0, 0), positive_double_points=0)
    kb, v = E.adjunction_verdict(kb, "D", c, S)
    assert v.kind == "Holds" and v.derived
    shifted = (5, 3, 1, 1)
    assert kb.bf[("D", shifted)][0].nonzero or kb.state(("D", shifted)) != B.UNKNOWN
    kb2 = E.assert_flag(E.add_manifold(E.KnowledgeBase(), X), "D", E.BLOWUP_SIMPLE)
    assert E.adjunction_verdict(kb2, "D", c, S)[1].kind == "Violated"
    assert E.adjunction_verdict(E.add_manifold(E.KnowledgeBase(), X), "D", c, S)[1].kind == "Unknown"


def test_simple_type_verdict():
    out = E.simple_type_verdict(axioms(), "K3")
    assert out[E.BLOWUP_SIMPLE] is True
    assert out[E.homogeneous(0)] is True
    assert out[E.MOD2_SIMPLE] is None


# -- fixed point ---------------------------------------------------------------------


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10**6))
def test_infer_matches_naive_oracle(seed):
    kb = random_kb(random.Random(seed))
    fast = outcome(E.infer, kb)
    slow = outcome(naive_infer, kb, random.Random(seed ^ 0x5EED))
    assert fast == slow
    if fast != "Inconsistent":
        once = E.infer(kb)
        assert snapshot(E.infer(once)) == snapshot(once)


@settings(max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(st.integers(0, 10**6))
def test_infer_is_monotone(seed):
    rng = random.Random(seed)
    kb = random_kb(rng)
    try:
        full = E.infer(kb)
    except Inconsistent:
        return
    # dropping the last asserted fact can only lose conclusions
    facts = [k for k, (_, p) in kb.bf.items() if p and p.rule == "asserted"]
    if not facts:
        return
    smaller = kb.copy()
    del smaller.bf[facts[-1]]
    less = E.infer(smaller)
    for key, (st_, _) in less.bf.items():
        assert E.join(full.state(key), st_) == full.state(key)


def test_rule_names_are_descriptive():
    kb = E.infer(E.add_manifold(axioms(), k3_sum(3)))
    kb, _ = E.query(kb, "#3K3", (0,) * 66)
    rules = Counter(p.rule for _, p in kb.bf.values() if p)
    assert all(r.replace("-", "").replace("_", "").isalnum() for r in rules)
