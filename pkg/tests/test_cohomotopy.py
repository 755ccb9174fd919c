from math import gcd

import pytest

from bfcalc.abelian import FgAbGroup
from bfcalc.cells import StableComplex, cp_stunted
from bfcalc.cohomotopy import (
    cell_hurewicz,
    cells_for,
    check_range,
    complex_cohomotopy,
    cp_cohomotopy,
    hurewicz_table,
    restriction_map,
)
from bfcalc.errors import OutOfRange, Unsupported


def Zmod(k):
    return FgAbGroup.cyclic(k)


def test_complex_examples():
    assert str(complex_cohomotopy(StableComplex.parse("S10,e12:eta"), 11).group) == "0"
    assert str(complex_cohomotopy(StableComplex.parse("S8,e10"), 9).group) == "Z/2"
    assert str(complex_cohomotopy(StableComplex.sphere(12), 12).group) == "Z"
    assert str(complex_cohomotopy(StableComplex.sphere(12), 9).group) == "Z/24"


def test_audit_trail():
    res = complex_cohomotopy(cp_stunted(7, 3), 11)
    assert not res.ambiguous
    assert res.derivation
    assert "cells 1..3" in res.audit()


def test_ambiguity_is_reported():
    # mod 2 Moore spectrum: the splice 0 -> Z/2 -> ? -> Z/2 -> 0 is left open
    res = complex_cohomotopy(StableComplex.parse("S0,e1:2"), -1)
    assert res.ambiguous
    assert {str(c) for c in res.group.candidates} == {"Z/4", "Z/2 + Z/2"}


@pytest.mark.parametrize(
    "n, j, ker, coker",
    [(7, 3, "Z/8", "0"), (4, 4, "0", "Z/12"), (6, 1, "0", "0"), (5, 1, "Z/2", "0"), (6, 2, "0", "Z/2"), (5, 2, "Z/2", "0")],
)
def test_hurewicz_spot_values(n, j, ker, coker):
    h = hurewicz_table(n, j)
    assert (str(h.kernel), str(h.cokernel)) == (ker, coker)


def test_cp_cohomotopy_examples():
    assert str(cp_cohomotopy(9, 0)) == "Z"
    assert str(cp_cohomotopy(6, 3)) == "Z/2"
    for k in range(4, 40):
        assert cp_cohomotopy(k - 1, 2) == FgAbGroup.from_orders([0, gcd(2, k - 2)])


def test_group_order_matches_kernel_for_even_j():
    for n in range(5, 60):
        for j in (0, 2, 4, 6):
            g, h = cp_cohomotopy(n, j), hurewicz_table(n, j)
            assert g.free_rank == 1 and g.torsion_subgroup() == h.kernel


def test_ranges():
    with pytest.raises(OutOfRange):
        hurewicz_table(4, 5)
    with pytest.raises(OutOfRange):
        hurewicz_table(3, 3)
    with pytest.raises(OutOfRange):
        check_range(10, 7)
    check_range(4, 4)


def test_cells_for():
    assert [cells_for(j) for j in range(7)] == [1, 2, 2, 3, 3, 4, 4]


def test_cell_hurewicz_agrees_with_tables():
    for n in range(4, 40):
        for j in (1, 2, 3):
            assert cell_hurewicz(cp_stunted(n, cells_for(j)), 2 * n - j) == hurewicz_table(n, j)


def test_restriction_examples():
    for n in range(5, 30):
        assert restriction_map(n, 3, 1).is_zero()
        assert restriction_map(n, 5, 2).is_zero()
    f = restriction_map(8, 6, 2)
    assert f.matrix == ((3,),)  # 24 / gcd(24, 8)
    g = restriction_map(7, 6, 2)
    assert str(g.target) == "Z + Z/2" and g.matrix == ((0,), (6,))
    h = restriction_map(7, 2, 1)
    assert str(h.source) == "Z + Z/2" and h.matrix == ((0, 1),)
    assert restriction_map(6, 1, 1).target.is_trivial()
    assert restriction_map(6, 4, 0).is_zero() is False
    with pytest.raises(Unsupported):
        restriction_map(6, 4, 1)


def test_restriction_isomorphisms():
    for n in range(6, 40):
        for j in (5, 6):
            f = restriction_map(n, j, 1)
            assert f.source == f.target and f.matrix == tuple(
                tuple(int(i == k) for k in range(f.source.ngens)) for i in range(f.source.ngens)
            )


def test_restriction_composes():
    checked = 0
    for n in range(7, 60):
        for j in range(0, 7):
            for s1 in range(0, 4):
                for s2 in range(0, 4):
                    try:
                        whole = restriction_map(n, j, s1 + s2)
                        first = restriction_map(n, j, s1)
                        second = restriction_map(n - s1, j - 2 * s1, s2) if j - 2 * s1 >= 0 else None
                    except (Unsupported, OutOfRange):
                        continue
                    if second is None:
                        assert whole.target.is_trivial()
                        continue
                    assert second @ first == whole
                    checked += 1
    assert checked > 500
