"""Stable homotopy groups of spheres in degrees -5..5.

Each nonzero group is cyclic on a named generator::

    0: Z{iota}   1: Z/2{eta}   2: Z/2{eta^2}   3: Z/24{nu}

and every other degree in range is zero.  Products follow eta^3 = 12 nu and
eta nu = 0; anything landing in degree 4 or 5 vanishes.
"""

from __future__ import annotations

from dataclasses import dataclass

from .abelian import FgAbGroup, GroupHom
from .errors import OutOfRange

MIN_DEGREE = -5
MAX_DEGREE = 5

# order of the generator in each nonzero degree; 0 stands for infinite order
_ORDER = {0: 0, 1: 2, 2: 2, 3: 24}
GENERATOR_NAMES = {0: "iota", 1: "eta", 2: "eta^2", 3: "nu"}


def _check(d: int) -> None:
    if not MIN_DEGREE <= d <= MAX_DEGREE:
        raise OutOfRange(f"stem degree {d} is outside {MIN_DEGREE}..{MAX_DEGREE}")


def stem_group(d: int) -> FgAbGroup:
    """pi^S_d as an abelian group."""
    _check(d)
    if d not in _ORDER:
        return FgAbGroup()
    return FgAbGroup.cyclic(_ORDER[d])


def generator_order(d: int) -> int | None:
    """Order of the generator of pi^S_d: 0 for Z, ``None`` if the group is zero."""
    _check(d)
    return _ORDER.get(d)


@dataclass(frozen=True)
class StemElement:
    """``coeff`` times the generator of pi^S_degree, with ``coeff`` reduced."""

    degree: int
    coeff: int = 1

    def __post_init__(self):
        if not 0 <= self.degree <= MAX_DEGREE:
            raise OutOfRange(f"stem elements live in degrees 0..{MAX_DEGREE}, not {self.degree}")
        order = _ORDER.get(self.degree)
        if order is None:
            c = 0
        elif order == 0:
            c = int(self.coeff)
        else:
            c = int(self.coeff) % order
        object.__setattr__(self, "coeff", c)

    def is_zero(self) -> bool:
        return self.coeff == 0

    def __add__(self, other: StemElement) -> StemElement:
        if self.degree != other.degree:
            raise ValueError("cannot add stem elements of different degrees")
        return StemElement(self.degree, self.coeff + other.coeff)

    def __neg__(self) -> StemElement:
        return StemElement(self.degree, -self.coeff)

    def __rmul__(self, k: int) -> StemElement:
        return StemElement(self.degree, k * self.coeff)

    def __mul__(self, other):
        if isinstance(other, int):
            return StemElement(self.degree, other * self.coeff)
        return compose(self, other)

    def __str__(self) -> str:
        if self.coeff == 0:
            return "0"
        name = GENERATOR_NAMES[self.degree]
        return name if self.coeff == 1 else f"{self.coeff}{name}"

    @staticmethod
    def parse(text: str) -> StemElement:
        """Read forms such as ``eta``, ``3nu``, ``12*nu``, ``eta^2``, ``5``."""
        t = text.strip().replace("*", "").replace("η²", "eta^2").replace("η", "eta").replace("ν", "nu")
        for deg in (2, 1, 3, 0):
            name = GENERATOR_NAMES[deg]
            if t.endswith(name):
                head = t[: -len(name)]
                coeff = int(head) if head not in ("", "+", "-") else int(head + "1")
                return StemElement(deg, coeff)
        if t == "0":
            return StemElement(1, 0)
        return StemElement(0, int(t))


ZERO_BY_DEGREE = {d: StemElement(d, 0) for d in range(0, MAX_DEGREE + 1)}
IOTA = StemElement(0, 1)
ETA = StemElement(1, 1)
ETA2 = StemElement(2, 1)
NU = StemElement(3, 1)


def compose(a: StemElement, b: StemElement) -> StemElement:
    """Product in the stable stems (commutative in this range)."""
    deg = a.degree + b.degree
    if deg > MAX_DEGREE:
        raise OutOfRange(f"product degree {deg} exceeds {MAX_DEGREE}")
    k = a.coeff * b.coeff
    if k == 0 or deg >= 4:
        return StemElement(deg, 0)
    lo, hi = sorted((a.degree, b.degree))
    if lo == 0:
        return StemElement(deg, k)
    if (lo, hi) == (1, 1):
        return StemElement(2, k)
    if (lo, hi) == (1, 2):
        return StemElement(3, 12 * k)
    raise AssertionError("unreachable")  # pragma: no cover


def precomposition_map(alpha: StemElement, m: int) -> GroupHom:
    """The map pi^S_m -> pi^S_{m+d} sending x to x o alpha (d = deg alpha)."""
    d = alpha.degree
    _check(m)
    _check(m + d)
    src = stem_group(m)
    tgt = stem_group(m + d)
    if src.is_trivial() or tgt.is_trivial():
        return GroupHom.zero(src, tgt)
    image = compose(StemElement(m, 1), alpha)
    return GroupHom(src, tgt, [[image.coeff]])
