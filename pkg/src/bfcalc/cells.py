"""Small stable cell complexes and the stunted projective spaces built from them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .errors import OutOfRange
from .stems import MAX_DEGREE, StemElement, compose

MAX_CELLS = 3


@dataclass(frozen=True)
class Cell:
    """A cell of dimension ``dim`` attached by ``attaching[i]`` onto cell ``i``."""

    dim: int
    attaching: tuple[StemElement, ...] = ()


@dataclass(frozen=True)
class StableComplex:
    cells: tuple[Cell, ...]

    def __post_init__(self):
        cells = tuple(self.cells)
        object.__setattr__(self, "cells", cells)
        if not cells:
            raise ValueError("a complex needs at least one cell")
        if len(cells) > MAX_CELLS:
            raise OutOfRange(f"at most {MAX_CELLS} cells are supported")
        for i, c in enumerate(cells):
            if i and c.dim <= cells[i - 1].dim:
                raise ValueError("cell dimensions must strictly increase")
            if len(c.attaching) != i:
                raise ValueError(f"cell {i} needs one attaching component per earlier cell")
            for j, a in enumerate(c.attaching):
                if a.degree != c.dim - 1 - cells[j].dim:
                    raise ValueError(
                        f"component onto cell {j} must have stem degree "
                        f"{c.dim - 1 - cells[j].dim}, got {a.degree}"
                    )
        if len(cells) == 3:
            # pinching to the middle cell and then to the suspended bottom
            # cell is null, so the top component must compose to zero
            inner, outer = cells[1].attaching[0], cells[2].attaching[1]
            if inner.degree + outer.degree <= MAX_DEGREE and not compose(inner, outer).is_zero():
                raise ValueError("attaching data is not a valid complex: composite is nonzero")

    @staticmethod
    def build(dims: Sequence[int], attaching: Sequence[Sequence[StemElement | int]] = ()) -> StableComplex:
        """Convenience constructor; integers in ``attaching`` are coefficients on
        the generator of the appropriate degree, and missing data means zero."""
        cells = []
        for i, d in enumerate(dims):
            comps = list(attaching[i]) if i < len(attaching) else []
            comps += [0] * (i - len(comps))
            elems = []
            for j, a in enumerate(comps):
                deg = d - 1 - dims[j]
                elems.append(a if isinstance(a, StemElement) else _element(deg, a))
            cells.append(Cell(d, tuple(elems)))
        return StableComplex(tuple(cells))

    @staticmethod
    def sphere(dim: int) -> StableComplex:
        return StableComplex((Cell(dim),))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(c.dim for c in self.cells)

    def skeleton(self, k: int) -> StableComplex:
        """The subcomplex of the first ``k`` cells."""
        return StableComplex(self.cells[:k])

    def collapse_bottom(self) -> StableComplex:
        """Quotient by the bottom cell."""
        if len(self.cells) < 2:
            raise ValueError("nothing left after collapsing the only cell")
        return StableComplex(tuple(Cell(c.dim, c.attaching[1:]) for c in self.cells[1:]))

    def top_is_split(self) -> bool:
        """True when the top cell is attached trivially (a wedge summand)."""
        return all(a.is_zero() for a in self.cells[-1].attaching)

    def __str__(self) -> str:
        parts = [f"S{self.cells[0].dim}"]
        for c in self.cells[1:]:
            comps = [str(a) for a in c.attaching if not a.is_zero()]
            parts.append(f"e{c.dim}" + (":" + "+".join(comps) if comps else ""))
        return ",".join(parts)

    @staticmethod
    def parse(text: str) -> StableComplex:
        """Read ``S8,e10:eta`` or ``S4,e6,e8:nu+eta``.

        Each attaching component is matched to the earlier cell its stem
        degree points at.
        """
        items = [t.strip() for t in text.split(",") if t.strip()]
        if not items or not items[0].upper().startswith("S"):
            raise ValueError("the first cell must be written S<dim>")
        dims = [int(items[0][1:])]
        attach: list[list[StemElement]] = [[]]
        for item in items[1:]:
            head, _, tail = item.partition(":")
            if not head.lower().startswith("e"):
                raise ValueError(f"cells after the first are written e<dim>, got {item!r}")
            d = int(head[1:])
            comps = [_element(d - 1 - e, 0) for e in dims]
            for tok in filter(None, (t.strip() for t in tail.split("+"))):
                x = StemElement.parse(tok)
                target = d - 1 - x.degree
                if target not in dims:
                    raise ValueError(f"{tok} does not reach any earlier cell of e{d}")
                j = dims.index(target)
                comps[j] = comps[j] + x
            dims.append(d)
            attach.append(comps)
        return StableComplex(tuple(Cell(d, tuple(a)) for d, a in zip(dims, attach)))


def _element(degree: int, coeff: int) -> StemElement:
    if not 0 <= degree <= MAX_DEGREE:
        if coeff:
            raise OutOfRange(f"attaching degree {degree} is outside the stem table")
        raise OutOfRange(f"cells too far apart: attaching degree {degree}")
    return StemElement(degree, coeff)


def cp_stunted(n: int, k: int) -> StableComplex:
    """The top ``k`` cells of CP^n, that is CP^n / CP^{n-k}."""
    if k == 1:
        if n < 1:
            raise OutOfRange("CP^n needs n >= 1")
        return StableComplex.sphere(2 * n)
    if k == 2:
        if n < 3:
            raise OutOfRange("the two-cell model needs n >= 3")
        return StableComplex.build([2 * n - 2, 2 * n], [[], [n - 1]])
    if k == 3:
        if n < 4:
            raise OutOfRange("the three-cell model needs n >= 4")
        if n % 2:
            # middle cell on bottom by eta; top cell: (n+1)/2 nu on bottom, (n-1) eta = 0 on middle
            return StableComplex.build(
                [2 * n - 4, 2 * n - 2, 2 * n], [[], [1], [(n + 1) // 2, n - 1]]
            )
        return StableComplex.build(
            [2 * n - 4, 2 * n - 2, 2 * n], [[], [0], [(n - 2) // 2, 1]]
        )
    raise OutOfRange(f"no {k}-cell model of stunted CP^n is available")


def hp_q_stunted(n: int, which: str) -> StableComplex:
    """Two-cell models of HP^n_{n-2} (``which='HP'``) and the quaternionic
    quasi-projective space Q^n_{n-2} (``which='Q'``)."""
    if n < 3:
        raise OutOfRange("the two-cell model needs n >= 3")
    w = which.upper()
    if w == "HP":
        return StableComplex.build([4 * n - 4, 4 * n], [[], [n - 1]])
    if w == "Q":
        return StableComplex.build([4 * n - 5, 4 * n - 1], [[], [n]])
    raise ValueError(f"which must be 'HP' or 'Q', not {which!r}")
