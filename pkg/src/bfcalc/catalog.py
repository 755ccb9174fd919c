"""Standard manifolds and their externally supplied seed facts."""

from __future__ import annotations

from functools import lru_cache

from .fourman import ManifoldDescriptor, block_sum, glue

HYPERBOLIC = ((0, 1), (1, 0))

# Cartan matrix of E8 (positive definite, even, unimodular)
E8 = (
    (2, -1, 0, 0, 0, 0, 0, 0),
    (-1, 2, -1, 0, 0, 0, 0, 0),
    (0, -1, 2, -1, 0, 0, 0, -1),
    (0, 0, -1, 2, -1, 0, 0, 0),
    (0, 0, 0, -1, 2, -1, 0, 0),
    (0, 0, 0, 0, -1, 2, -1, 0),
    (0, 0, 0, 0, 0, -1, 2, 0),
    (0, 0, -1, 0, 0, 0, 0, 2),
)
NEG_E8 = tuple(tuple(-x for x in r) for r in E8)


def s4() -> ManifoldDescriptor:
    return ManifoldDescriptor("S4", 0, 0, 0, ())


def cp2() -> ManifoldDescriptor:
    return ManifoldDescriptor("CP2", 0, 1, 0, ((1,),), symplectic=True)


def cp2bar() -> ManifoldDescriptor:
    return ManifoldDescriptor("CP2bar", 0, 0, 1, ((-1,),))


def s2xs2() -> ManifoldDescriptor:
    return ManifoldDescriptor("S2xS2", 0, 1, 1, HYPERBOLIC, symplectic=True)


@lru_cache(maxsize=None)
def k3() -> ManifoldDescriptor:
    form = block_sum(HYPERBOLIC, HYPERBOLIC, HYPERBOLIC, NEG_E8, NEG_E8)
    return ManifoldDescriptor("K3", 0, 3, 19, form, symplectic=True)


def k3_canonical() -> tuple[int, ...]:
    """K3 has trivial canonical class."""
    return (0,) * 22


@lru_cache(maxsize=None)
def k3_sum(m: int) -> ManifoldDescriptor:
    """#m K3 with pieces recorded for the decomposition rules."""
    if m < 1:
        raise ValueError("m must be at least 1")
    X = k3()
    for _ in range(m - 1):
        X = glue(X, k3())
    if m > 1:
        X = ManifoldDescriptor(
            f"#{m}K3", X.b1, X.b2_plus, X.b2_minus, X.form, pieces=X.pieces, glue_kind=X.glue_kind
        )
    return X


# Axioms supplied from outside the calculus.  Each entry is
# (manifold name, c1, SW value, note).
EXTERNAL_AXIOMS = (
    ("K3", k3_canonical(), 1, "symplectic non-vanishing of the canonical class (external input)"),
)

CATALOG = {
    "S4": s4,
    "CP2": cp2,
    "CP2bar": cp2bar,
    "S2xS2": s2xs2,
    "K3": k3,
}


def lookup(name: str) -> ManifoldDescriptor:
    """Resolve a catalog name, including ``#mK3`` forms."""
    if name in CATALOG:
        return CATALOG[name]()
    if name.startswith("#") and name.endswith("K3"):
        return k3_sum(int(name[1:-2]))
    raise KeyError(f"unknown catalog manifold {name!r}")
