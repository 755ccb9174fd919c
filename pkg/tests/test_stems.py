import itertools

import pytest

from bfcalc.errors import OutOfRange
from bfcalc.stems import ETA, ETA2, IOTA, NU, StemElement, compose, generator_order, precomposition_map, stem_group


def multiples(d):
    order = generator_order(d)
    if order is None:
        return [StemElement(d, 0)]
    rng = range(-4, 5) if order == 0 else range(order)
    return [StemElement(d, k) for k in rng]


ALL = [x for d in range(0, 6) for x in multiples(d)]


def test_table():
    assert str(stem_group(0)) == "Z"
    assert str(stem_group(1)) == "Z/2"
    assert str(stem_group(2)) == "Z/2"
    assert str(stem_group(3)) == "Z/24"
    for d in (-5, -1, 4, 5):
        assert stem_group(d).is_trivial()
    with pytest.raises(OutOfRange):
        stem_group(6)
    with pytest.raises(OutOfRange):
        stem_group(-6)


def test_reduced_coefficients():
    assert StemElement(1, 3).coeff == 1
    assert StemElement(3, -1).coeff == 23
    assert StemElement(4, 7).is_zero()
    assert StemElement(0, -3).coeff == -3
    with pytest.raises(OutOfRange):
        StemElement(6, 1)


def test_identities():
    assert (2 * ETA).is_zero()
    assert (24 * NU).is_zero()
    assert compose(ETA, compose(ETA, ETA)) == 12 * NU
    assert compose(ETA, NU).is_zero()
    assert compose(ETA, ETA) == ETA2
    assert compose(StemElement(0, 5), NU) == 5 * NU
    with pytest.raises(OutOfRange):
        compose(NU, NU)


def test_bilinear_exhaustive():
    for a, a2, b in itertools.product(ALL, ALL, ALL):
        if a.degree != a2.degree or a.degree + b.degree > 5:
            continue
        assert compose(a + a2, b) == compose(a, b) + compose(a2, b)
        assert compose(b, a + a2) == compose(b, a) + compose(b, a2)


def test_associative_and_commutative_exhaustive():
    for a, b, c in itertools.product(ALL, ALL, ALL):
        if a.degree + b.degree + c.degree > 5:
            continue
        assert compose(compose(a, b), c) == compose(a, compose(b, c))
        assert compose(a, b) == compose(b, a)


def test_parse_round_trip():
    for x in ALL:
        if not x.is_zero():
            assert StemElement.parse(str(x)) == x
    assert StemElement.parse("12*nu") == 12 * NU
    assert StemElement.parse("η") == ETA
    assert StemElement.parse("1") == IOTA


def test_precomposition():
    f = precomposition_map(ETA, 0)
    assert str(f.source) == "Z" and str(f.target) == "Z/2" and f.matrix == ((1,),)
    assert precomposition_map(StemElement(1, 4), 0).is_zero()
    assert precomposition_map(6 * NU, 0).matrix == ((6,),)
    # additivity in the attaching element
    for d in (1, 2, 3):
        for a, b in itertools.product(multiples(d), repeat=2):
            for m in range(-5, 6 - d):
                assert precomposition_map(a + b, m) == precomposition_map(a, m) + precomposition_map(b, m)
