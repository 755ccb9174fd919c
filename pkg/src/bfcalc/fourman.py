"""Homological descriptors of 4-manifolds, spin^c classes and surgeries.

A :class:`ManifoldDescriptor` keeps the data the invariant calculus needs:
Betti numbers, the intersection form on free H^2, a few trusted flags and a
record of how the manifold was built (gluing pieces, blowup classes,
rational blowdown and log transform data).

Characteristic classes are written in the Poincare-dual basis, so the
pairing with a class x is ``c^T Q x`` and ``c^2 = c^T Q c``.  On a rational
blowdown the form is the (usually non-unimodular) orthogonal complement of
the plumbing, and classes are given by their values on its basis instead:
``<c, x> = c . x`` and ``c^2 = c^T Q^{-1} c``.

Classes on a log transform ``X_(p)`` carry one extra coordinate: the
coefficient of ``f``, the dual of the multiple fiber ``beta = alpha / p``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from .abelian import integer_nullspace
from .errors import (
    BadEmbedding,
    IncompatibleBoundary,
    NoLift,
    NonIntegerDimension,
    NonUnique,
    NotCharacteristic,
    PreconditionViolation,
)
from .lattice import inertia, inverse_rational, is_symmetric, pair, short_vectors, solve_rational

IntVec = tuple[int, ...]
IntMat = tuple[tuple[int, ...], ...]


def _mat(m: Sequence[Sequence[int]]) -> IntMat:
    return tuple(tuple(int(x) for x in r) for r in m)


def block_sum(*forms: Sequence[Sequence[int]]) -> IntMat:
    n = sum(len(f) for f in forms)
    out = [[0] * n for _ in range(n)]
    off = 0
    for f in forms:
        k = len(f)
        for i in range(k):
            for j in range(k):
                out[off + i][off + j] = int(f[i][j])
        off += k
    return _mat(out)


@dataclass(frozen=True)
class BoundaryComponent:
    label: str
    swf_spherical: bool = True
    rational_homology_sphere: bool = True


@dataclass(frozen=True)
class BlowdownData:
    """How ``X_p`` sits relative to ``X``: the plumbing classes and the basis of
    their orthogonal complement, both in ``X``'s coordinates."""

    parent: "ManifoldDescriptor"
    p: int
    plumbing: IntMat  # rows are the classes v_1..v_{p-1}
    complement: IntMat  # rows are the basis w_1..w_k of the complement


@dataclass(frozen=True)
class LogData:
    parent: "ManifoldDescriptor"
    alpha: IntVec
    p: int


@dataclass(frozen=True)
class ManifoldDescriptor:
    name: str
    b1: int
    b2_plus: int
    b2_minus: int
    form: IntMat
    h1_no_2torsion: bool = True
    symplectic: bool = False
    boundary: tuple[BoundaryComponent, ...] = ()
    euler_input: Optional[int] = None
    pieces: tuple["ManifoldDescriptor", ...] = ()
    glue_kind: str = ""
    exceptional: tuple[int, ...] = ()
    blowup_of: Optional["ManifoldDescriptor"] = field(default=None, repr=False)
    blowdown: Optional[BlowdownData] = field(default=None, repr=False)
    log: Optional[LogData] = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "form", _mat(self.form))
        object.__setattr__(self, "boundary", tuple(self.boundary))
        object.__setattr__(self, "pieces", tuple(self.pieces))
        object.__setattr__(self, "exceptional", tuple(self.exceptional))
        if min(self.b1, self.b2_plus, self.b2_minus) < 0:
            raise ValueError("Betti numbers must be non-negative")
        if len(self.form) != self.b2_plus + self.b2_minus:
            raise ValueError(
                f"{self.name}: form has rank {len(self.form)}, expected "
                f"b2+ + b2- = {self.b2_plus + self.b2_minus}"
            )
        if not is_symmetric(self.form):
            raise ValueError(f"{self.name}: intersection form is not symmetric")
        if self.boundary and self.euler_input is None:
            raise ValueError(f"{self.name}: a manifold with boundary needs its Euler characteristic")

    @staticmethod
    def create(name: str, b1: int, form: Sequence[Sequence[int]], **kw) -> "ManifoldDescriptor":
        """Build a descriptor from user data, checking the form in full.

        Betti numbers b2+/b2- are read off the form's inertia.  A closed
        manifold whose form is not unimodular triggers a warning only.
        """
        form = _mat(form)
        if not is_symmetric(form):
            raise ValueError(f"{name}: intersection form is not symmetric")
        pos, neg, zero = inertia(form)
        if zero:
            raise ValueError(f"{name}: intersection form is degenerate")
        for key in ("b2_plus", "b2_minus"):
            want = kw.pop(key, None)
            have = pos if key == "b2_plus" else neg
            if want is not None and want != have:
                raise ValueError(f"{name}: {key} = {want} disagrees with the form ({have})")
        x = ManifoldDescriptor(name, b1, pos, neg, form, **kw)
        if x.is_closed:
            from .abelian import determinant

            if abs(determinant([list(r) for r in form])) != 1:
                warnings.warn(f"{name}: closed manifold with non-unimodular form", stacklevel=2)
        return x

    # -- derived data ---------------------------------------------------

    @property
    def rank(self) -> int:
        return len(self.form)

    @property
    def class_rank(self) -> int:
        """Length of a characteristic class vector on this manifold."""
        return self.rank + (1 if self.log else 0)

    @property
    def sigma(self) -> int:
        return self.b2_plus - self.b2_minus

    @property
    def is_closed(self) -> bool:
        return not self.boundary

    @property
    def euler(self) -> int:
        if self.is_closed:
            return 2 - 2 * self.b1 + self.b2_plus + self.b2_minus
        return int(self.euler_input)

    @property
    def piece_list(self) -> tuple["ManifoldDescriptor", ...]:
        """Gluing pieces, or the manifold itself when it is not glued."""
        return self.pieces or (self,)

    def piece_slices(self) -> list[slice]:
        out, off = [], 0
        for pc in self.piece_list:
            out.append(slice(off, off + pc.rank))
            off += pc.rank
        return out

    def homological_data(self) -> tuple:
        return (self.b1, self.b2_plus, self.b2_minus, self.sigma, self.euler, self.form)

    def self_intersection(self, alpha: Sequence[int]) -> int:
        return pair(self.form, alpha, alpha)

    def pairing(self, c: Sequence[int], x: Sequence[int]):
        """<c, x> for a class c (extended coordinates allowed) and x in H_2."""
        if self.blowdown:
            return sum(a * b for a, b in zip(c, x))
        if self.log and len(c) == self.rank + 1:
            base = pair(self.form, c[: self.rank], x)
            return base + Fraction(c[self.rank] * pair(self.form, self.log.alpha, x), self.log.p)
        return pair(self.form, c, x)

    def square(self, c: Sequence[int]):
        if self.blowdown:
            return pair(inverse_rational(self.form), c, c) if self.rank else 0
        if self.log and len(c) == self.rank + 1:
            v = self.realize(c)
            return sum(v[i] * sum(self.form[i][j] * v[j] for j in range(self.rank)) for i in range(self.rank))
        return pair(self.form, c, c)

    def realize(self, c: Sequence[int]) -> tuple:
        """The class as a (possibly rational) vector in the basis of ``form``."""
        if self.blowdown:
            return tuple(solve_rational(self.form, c)) if self.rank else ()
        if self.log and len(c) == self.rank + 1:
            t = Fraction(c[self.rank], self.log.p)
            return tuple(Fraction(x) + t * a for x, a in zip(c[: self.rank], self.log.alpha))
        return tuple(c)

    def __str__(self) -> str:
        return self.name


@dataclass(frozen=True)
class SpincStructure:
    manifold: ManifoldDescriptor
    c1: IntVec
    # pairings with the plumbing classes of the parent, for blowdown lifts
    residue: Optional[IntVec] = None

    def __post_init__(self):
        object.__setattr__(self, "c1", tuple(int(x) for x in self.c1))
        if len(self.c1) != self.manifold.class_rank:
            raise ValueError(
                f"c1 has {len(self.c1)} coordinates, {self.manifold.name} needs "
                f"{self.manifold.class_rank}"
            )

    def is_characteristic(self) -> bool:
        X = self.manifold
        c = self.c1
        if X.log:
            # only the base part lives on a lattice we know; the f-coefficient
            # of a characteristic class has the parity of p - 1
            c, t = c[: X.rank], c[X.rank]
            if (t - (X.log.p - 1)) % 2:
                return False
        for i in range(X.rank):
            e = [0] * X.rank
            e[i] = 1
            v = pair(X.form, c, e) if X.log else X.pairing(c, e)
            if (v - X.form[i][i]) % 2:
                return False
        return True

    def square(self):
        return self.manifold.square(self.c1)

    def restrict(self, k: int) -> "SpincStructure":
        """Restriction to the k-th gluing piece."""
        X = self.manifold
        sl = X.piece_slices()[k]
        return SpincStructure(X.piece_list[k], self.c1[sl])


def spinc(X: ManifoldDescriptor, c1: Sequence[int]) -> SpincStructure:
    """A spin^c structure, rejected unless characteristic."""
    s = SpincStructure(X, tuple(c1))
    if not s.is_characteristic():
        raise NotCharacteristic(f"{list(c1)} is not characteristic on {X.name}")
    return s


def virtual_dimension(s: SpincStructure) -> int:
    """d = (c1^2 - 2 chi - 3 sigma) / 4."""
    if not s.is_characteristic():
        raise NotCharacteristic(f"{list(s.c1)} is not characteristic on {s.manifold.name}")
    X = s.manifold
    num = s.square() - 2 * X.euler - 3 * X.sigma
    if Fraction(num).denominator != 1 or int(num) % 4:
        raise NonIntegerDimension(f"(c1^2 - 2chi - 3sigma) = {num} is not divisible by 4")
    return int(num) // 4


# ---------------------------------------------------------------------------
# surgeries


def blowup(X: ManifoldDescriptor) -> ManifoldDescriptor:
    """X # CP^2-bar, with the new class E appended to the basis."""
    if X.log:
        raise PreconditionViolation("blow up the manifold before the log transform")
    return ManifoldDescriptor(
        f"{X.name}#CP2bar",
        X.b1,
        X.b2_plus,
        X.b2_minus + 1,
        block_sum(X.form, [[-1]]),
        h1_no_2torsion=X.h1_no_2torsion,
        symplectic=X.symplectic,
        boundary=X.boundary,
        euler_input=None if X.is_closed else X.euler + 1,
        exceptional=X.exceptional + (X.rank,),
        blowup_of=X,
    )


def blowup_times(X: ManifoldDescriptor, k: int) -> ManifoldDescriptor:
    for _ in range(k):
        X = blowup(X)
    return X


def blowup_spinc(s: SpincStructure, r: int) -> SpincStructure:
    """s # s_{(2r+1)E} on the blowup; d drops by r(r+1)."""
    if not s.is_characteristic():
        raise NotCharacteristic(f"{list(s.c1)} is not characteristic")
    out = SpincStructure(blowup(s.manifold), s.c1 + (2 * r + 1,))
    assert virtual_dimension(out) == virtual_dimension(s) - r * (r + 1)
    return out


CONNECTED_SUM = "connected_sum"


def _is_s4(X: ManifoldDescriptor) -> bool:
    return X.is_closed and X.rank == 0 and X.b1 == 0 and not X.pieces and not X.log


def glue(
    X1: ManifoldDescriptor,
    X2: ManifoldDescriptor,
    along: str | tuple[str, str] = CONNECTED_SUM,
    name: str | None = None,
) -> ManifoldDescriptor:
    """Connected sum, or gluing along boundary components ``(label1, label2)``."""
    if along == CONNECTED_SUM:
        if _is_s4(X2):
            return X1
        if _is_s4(X1):
            return X2
        kind = CONNECTED_SUM
        boundary = X1.boundary + X2.boundary
        chi_shift = -2
    else:
        l1, l2 = along
        c1 = next((c for c in X1.boundary if c.label == l1), None)
        c2 = next((c for c in X2.boundary if c.label == l2), None)
        if c1 is None or c2 is None:
            raise IncompatibleBoundary(f"no boundary components {l1!r}/{l2!r}")
        for c in (c1, c2):
            if not (c.swf_spherical and c.rational_homology_sphere):
                raise IncompatibleBoundary(
                    f"boundary {c.label!r} is not an SWF-spherical rational homology sphere"
                )
        kind = "rational_homology_sphere"
        boundary = tuple(c for c in X1.boundary if c is not c1) + tuple(
            c for c in X2.boundary if c is not c2
        )
        chi_shift = 0
    if X1.log or X2.log:
        raise PreconditionViolation("gluing log-transformed descriptors is not modeled")
    euler = X1.euler + X2.euler + chi_shift
    return ManifoldDescriptor(
        name or f"{X1.name}#{X2.name}" if kind == CONNECTED_SUM else name or f"{X1.name}U{X2.name}",
        X1.b1 + X2.b1,
        X1.b2_plus + X2.b2_plus,
        X1.b2_minus + X2.b2_minus,
        block_sum(X1.form, X2.form),
        h1_no_2torsion=X1.h1_no_2torsion and X2.h1_no_2torsion,
        symplectic=False,
        boundary=boundary,
        euler_input=None if not boundary else euler,
        pieces=X1.piece_list + X2.piece_list,
        glue_kind=kind,
    )


def glue_spinc(*parts: SpincStructure) -> SpincStructure:
    """The spin^c structure on a gluing whose restrictions are ``parts``."""
    X = parts[0].manifold
    for s in parts[1:]:
        X = glue(X, s.manifold)
    return SpincStructure(X, tuple(x for s in parts for x in s.c1))


# ---------------------------------------------------------------------------
# surfaces, log transforms


@dataclass(frozen=True)
class SurfaceData:
    kind: str  # "embedded" or "immersed_sphere"
    homology_class: IntVec
    genus: int = 0
    positive_double_points: int = 0
    negative_double_points: int = 0
    non_torsion: bool = True

    def __post_init__(self):
        object.__setattr__(self, "homology_class", tuple(int(x) for x in self.homology_class))
        if self.kind not in ("embedded", "immersed_sphere"):
            raise ValueError(f"unknown surface kind {self.kind!r}")
        if min(self.genus, self.positive_double_points, self.negative_double_points) < 0:
            raise ValueError("genus and double point counts must be non-negative")

    def self_intersection(self, X: ManifoldDescriptor) -> int:
        if len(self.homology_class) != X.rank:
            raise ValueError("surface class has the wrong number of coordinates")
        return X.self_intersection(self.homology_class)


def log_transform(X: ManifoldDescriptor, fishtail: SurfaceData, p: int) -> ManifoldDescriptor:
    """Multiplicity-p log transform in a fishtail neighborhood.

    The result keeps the Betti numbers and form of ``X`` and records the
    multiple-fiber class ``f = alpha / p`` as an extra class coordinate.
    Multiplicity one changes nothing and returns ``X`` itself.
    """
    if p < 1:
        raise PreconditionViolation("multiplicity must be positive")
    if fishtail.kind != "immersed_sphere" or fishtail.positive_double_points != 1:
        raise PreconditionViolation("a fishtail is an immersed sphere with one positive double point")
    if not fishtail.non_torsion or not any(fishtail.homology_class):
        raise PreconditionViolation("the fishtail class must be non-torsion")
    if fishtail.self_intersection(X) != 0:
        raise PreconditionViolation("the fishtail class must have square zero")
    if X.log:
        raise PreconditionViolation("repeated log transforms are not modeled")
    if p == 1:
        return X
    return replace(
        X,
        name=f"{X.name}_({p})",
        symplectic=False,
        log=LogData(X, fishtail.homology_class, p),
        pieces=(),
        glue_kind="",
        blowup_of=None,
        blowdown=None,
    )


# ---------------------------------------------------------------------------
# rational blowdown


def plumbing_matrix(p: int) -> IntMat:
    """Linear plumbing C_p: weights -(p+2), -2, ..., -2 (p-1 spheres)."""
    if p < 2:
        raise ValueError("C_p needs p >= 2")
    n = p - 1
    m = [[0] * n for _ in range(n)]
    for i in range(n):
        m[i][i] = -2
        if i + 1 < n:
            m[i][i + 1] = m[i + 1][i] = 1
    m[0][0] = -(p + 2)
    return _mat(m)


def rational_blowdown(
    X: ManifoldDescriptor, p: int, cp_embedding: Sequence[Sequence[int]], h1_no_2torsion: bool | None = None
) -> ManifoldDescriptor:
    """Replace the plumbing spanned by ``cp_embedding`` with a rational ball.

    The free H^2 of the result is modeled by the orthogonal complement of
    the plumbing classes, with a basis found by integer nullspace.
    """
    V = _mat(cp_embedding)
    if len(V) != p - 1 or any(len(v) != X.rank for v in V):
        raise BadEmbedding(f"need {p - 1} classes with {X.rank} coordinates each")
    gram = [[pair(X.form, a, b) for b in V] for a in V]
    if _mat(gram) != plumbing_matrix(p):
        raise BadEmbedding(f"Gram matrix {gram} is not the C_{p} plumbing {list(plumbing_matrix(p))}")
    if X.log:
        raise PreconditionViolation("rational blowdown of a log transform is not modeled")
    rows = [[sum(v[i] * X.form[i][j] for i in range(X.rank)) for j in range(X.rank)] for v in V]
    W = integer_nullspace(rows, X.rank)  # columns span the complement
    basis = _mat([[W[i][k] for i in range(X.rank)] for k in range(len(W[0]) if W else 0)])
    form = [[pair(X.form, a, b) for b in basis] for a in basis]
    out = ManifoldDescriptor(
        f"{X.name}_rbd{p}",
        X.b1,
        X.b2_plus,
        X.b2_minus - (p - 1),
        form,
        h1_no_2torsion=X.h1_no_2torsion if h1_no_2torsion is None else h1_no_2torsion,
        symplectic=False,
        boundary=X.boundary,
        euler_input=None if X.is_closed else X.euler - (p - 1),
        blowdown=BlowdownData(X, p, V, basis),
    )
    from .abelian import determinant

    if out.is_closed and out.rank and abs(determinant([list(r) for r in out.form])) != 1:
        warnings.warn(
            f"{out.name}: complement lattice is not unimodular; classes are modeled on it",
            stacklevel=2,
        )
    return out


def _ball_residues(p: int) -> list[IntVec]:
    """Pairings b with the plumbing spheres for which a lift keeps d fixed:
    characteristic on C_p with b^T C_p^{-1} b = -(p-1)."""
    G = [list(r) for r in plumbing_matrix(p)]
    A = [[-x for x in r] for r in inverse_rational(G)]  # positive definite
    out = []
    for b in short_vectors(A, p - 1):
        if pair(A, b, b) == p - 1 and all((b[i] - G[i][i]) % 2 == 0 for i in range(p - 1)):
            out.append(tuple(b))
    return sorted(out)


def restrict_to_blowdown(s: SpincStructure, Xp: ManifoldDescriptor) -> SpincStructure:
    """The structure on ``X_p`` obtained from ``s`` on the parent manifold.

    The result records ``s``'s pairings with the plumbing spheres.  For
    p >= 3 several d-preserving lifts can share the same restriction away
    from the plumbing, and the recorded pairings select ``s`` among them.
    """
    data = Xp.blowdown
    if data is None or s.manifold != data.parent:
        raise PreconditionViolation("structure does not live on the blowdown's parent")
    X = data.parent
    res = tuple(pair(X.form, s.c1, v) for v in data.plumbing)
    if res not in _ball_residues(data.p):
        # s is not a lift with d(s) = d(s_p)
        raise PreconditionViolation(
            f"pairings {list(res)} with the plumbing do not preserve d across the blowdown"
        )
    t = tuple(pair(X.form, s.c1, w) for w in data.complement)
    return SpincStructure(Xp, t, residue=res)


def lift_candidates(sp: SpincStructure) -> list[SpincStructure]:
    """Characteristic classes on the parent restricting to ``sp`` with equal d."""
    Xp = sp.manifold
    data = Xp.blowdown
    if data is None:
        raise PreconditionViolation(f"{Xp.name} is not a rational blowdown")
    X = data.parent
    rows = [list(w) for w in data.complement] + [list(v) for v in data.plumbing]
    M = [[sum(r[i] * X.form[i][j] for i in range(X.rank)) for j in range(X.rank)] for r in rows]
    d_target = virtual_dimension(sp)
    out = []
    for b in _ball_residues(data.p):
        if sp.residue is not None and b != tuple(sp.residue):
            continue
        c = solve_rational(M, list(sp.c1) + list(b))
        if any(x.denominator != 1 for x in c):
            continue
        s = SpincStructure(X, tuple(int(x) for x in c))
        if s.is_characteristic() and virtual_dimension(s) == d_target:
            out.append(s)
    return out


def lift_spinc(sp: SpincStructure) -> SpincStructure:
    """The unique characteristic lift of ``sp`` with the same virtual dimension."""
    if not sp.is_characteristic():
        raise NotCharacteristic(f"{list(sp.c1)} is not characteristic")
    cands = lift_candidates(sp)
    if not cands:
        raise NoLift(f"no characteristic lift of {list(sp.c1)} with d = {virtual_dimension(sp)}")
    if len(cands) > 1:
        X = sp.manifold.blowdown.parent
        if not (X.h1_no_2torsion and sp.manifold.h1_no_2torsion):
            raise NonUnique(f"{len(cands)} lifts; H_1 has 2-torsion")
        raise NonUnique(
            f"{len(cands)} lifts match; the boundary residue is needed to pick one "
            "(restrict from the parent to record it)"
        )
    return cands[0]
