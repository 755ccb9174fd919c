"""Finitely generated abelian groups and homomorphisms between them.

Everything here is exact integer arithmetic on plain Python ints.  A group is
stored in invariant-factor form ``Z/d1 + ... + Z/dt + Z^r`` with
``d1 | d2 | ... | dt`` and every ``di >= 2``.  The canonical generator order is
torsion generators first (in divisibility order) followed by free generators,
which is the order in which a Smith normal form diagonal naturally lists them.

>>> G = FgAbGroup(1, (2, 24))
>>> str(G)
'Z + Z/2 + Z/24'
>>> f = GroupHom(FgAbGroup.cyclic(24), FgAbGroup.cyclic(24), [[2]])
>>> str(kernel(f))
'Z/2'
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import gcd
from typing import Sequence, Union

Matrix = list[list[int]]


# ---------------------------------------------------------------------------
# matrix helpers


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def zeros(rows: int, cols: int) -> Matrix:
    return [[0] * cols for _ in range(rows)]


def matmul(a: Matrix, b: Matrix, inner: int | None = None) -> Matrix:
    """Product of integer matrices.  ``inner`` is needed only when both
    operands have a zero-size shared dimension and cannot report it."""
    rows = len(a)
    cols = len(b[0]) if b else 0
    k = len(b) if inner is None else inner
    out = zeros(rows, cols)
    for i in range(rows):
        ai = a[i]
        oi = out[i]
        for t in range(k):
            x = ai[t]
            if x:
                bt = b[t]
                for j in range(cols):
                    oi[j] += x * bt[j]
    return out


def transpose(a: Matrix) -> Matrix:
    return [list(col) for col in zip(*a)]


def determinant(a: Matrix) -> int:
    """Exact determinant via fraction-free Bareiss elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def _snf(a: Sequence[Sequence[int]]):
    rows = len(a)
    cols = len(a[0]) if rows else 0
    d = [list(map(int, r)) for r in a]
    u = identity(rows)
    ui = identity(rows)  # kept equal to u^{-1}
    v = identity(cols)

    def swap_rows(i, j):
        d[i], d[j] = d[j], d[i]
        u[i], u[j] = u[j], u[i]
        for r in ui:
            r[i], r[j] = r[j], r[i]

    def swap_cols(i, j):
        for r in d:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, q):  # row_dst -= q * row_src
        if q:
            rs, rd = d[src], d[dst]
            for c in range(cols):
                rd[c] -= q * rs[c]
            us, ud = u[src], u[dst]
            for c in range(rows):
                ud[c] -= q * us[c]
            for r in ui:
                r[src] += q * r[dst]

    def add_col(src, dst, q):  # col_dst -= q * col_src
        if q:
            for r in d:
                r[dst] -= q * r[src]
            for r in v:
                r[dst] -= q * r[src]

    t = 0
    while t < min(rows, cols):
        # smallest nonzero entry of the remaining block becomes the pivot
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                x = d[i][j]
                if x and (best is None or abs(x) < best[0]):
                    best = (abs(x), i, j)
        if best is None:
            break
        swap_rows(t, best[1])
        swap_cols(t, best[2])
        while True:
            p = d[t][t]
            clean = True
            for i in range(t + 1, rows):
                if d[i][t]:
                    add_row(t, i, d[i][t] // p)
                    clean = clean and not d[i][t]
            for j in range(t + 1, cols):
                if d[t][j]:
                    add_col(t, j, d[t][j] // p)
                    clean = clean and not d[t][j]
            if clean:
                # the pivot must also divide the rest of the block
                bad = next(
                    (i for i in range(t + 1, rows)
                     if any(d[i][j] % p for j in range(t + 1, cols))),
                    None,
                )
                if bad is None:
                    break
                add_row(bad, t, -1)
                continue
            best = (abs(d[t][t]), t, t)
            for i in range(t + 1, rows):
                if d[i][t] and abs(d[i][t]) < best[0]:
                    best = (abs(d[i][t]), i, t)
            for j in range(t + 1, cols):
                if d[t][j] and abs(d[t][j]) < best[0]:
                    best = (abs(d[t][j]), t, j)
            swap_rows(t, best[1])
            swap_cols(t, best[2])
        if d[t][t] < 0:
            d[t] = [-x for x in d[t]]
            u[t] = [-x for x in u[t]]
            for r in ui:
                r[t] = -r[t]
        t += 1
    return u, ui, d, v


def smith_normal_form(a: Sequence[Sequence[int]]) -> tuple[Matrix, Matrix, Matrix]:
    """Return ``(U, D, V)`` with ``U @ A @ V == D``.

    ``U`` and ``V`` are unimodular, ``D`` is diagonal with non-negative entries
    forming a divisibility chain; zeros (if any) come last.  Works for empty
    and non-square input.

    >>> smith_normal_form([[2, 4], [6, 8]])[1]
    [[2, 0], [0, 4]]
    """
    u, _, d, v = _snf(a)
    return u, d, v


def _diagonal(d: Matrix) -> list[int]:
    return [d[i][i] for i in range(min(len(d), len(d[0]) if d else 0))]


# ---------------------------------------------------------------------------
# groups


@dataclass(frozen=True)
class FgAbGroup:
    """``Z^free_rank + Z/t1 + ... + Z/tk`` with ``t1 | t2 | ...`` and ``ti >= 2``."""

    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "torsion", tuple(int(t) for t in self.torsion))
        if self.free_rank < 0:
            raise ValueError("free rank must be non-negative")
        for i, t in enumerate(self.torsion):
            if t < 2:
                raise ValueError(f"invariant factor {t} < 2")
            if i and t % self.torsion[i - 1]:
                raise ValueError(f"invariant factors {self.torsion} are not a divisibility chain")

    @staticmethod
    def trivial() -> FgAbGroup:
        return FgAbGroup()

    @staticmethod
    def free(rank: int) -> FgAbGroup:
        return FgAbGroup(rank)

    @staticmethod
    def cyclic(order: int) -> FgAbGroup:
        """``Z/order``; order 0 means ``Z`` and order 1 the trivial group."""
        return FgAbGroup.from_orders([order])

    @staticmethod
    def from_orders(orders: Sequence[int]) -> FgAbGroup:
        """Canonical form of a direct sum of cyclic groups (0 means ``Z``)."""
        return presentation(orders)[0]

    @property
    def moduli(self) -> tuple[int, ...]:
        """Order of each canonical generator, 0 for free ones."""
        return self.torsion + (0,) * self.free_rank

    @property
    def ngens(self) -> int:
        return len(self.torsion) + self.free_rank

    @property
    def order(self) -> int | None:
        """Number of elements, or ``None`` if infinite."""
        if self.free_rank:
            return None
        n = 1
        for t in self.torsion:
            n *= t
        return n

    def is_trivial(self) -> bool:
        return self.ngens == 0

    def is_torsion(self) -> bool:
        return self.free_rank == 0

    def torsion_subgroup(self) -> FgAbGroup:
        return FgAbGroup(0, self.torsion)

    def reduce(self, vec: Sequence[int]) -> tuple[int, ...]:
        """Reduce a coordinate vector to its canonical representative."""
        if len(vec) != self.ngens:
            raise ValueError(f"expected {self.ngens} coordinates, got {len(vec)}")
        return tuple(x % m if m else int(x) for x, m in zip(vec, self.moduli))

    def elements(self):
        """Iterate all elements of a finite group as coordinate tuples."""
        if self.free_rank:
            raise ValueError("cannot enumerate an infinite group")
        return itertools.product(*(range(t) for t in self.torsion))

    def __add__(self, other: FgAbGroup) -> FgAbGroup:
        return FgAbGroup.from_orders(self.moduli + other.moduli)

    def __str__(self) -> str:
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts += [f"Z/{t}" for t in self.torsion]
        return " + ".join(parts) if parts else "0"

    @staticmethod
    def parse(text: str) -> FgAbGroup:
        """Inverse of ``str``: accepts ``0``, ``Z``, ``Z^2 + Z/2`` and the like."""
        text = text.strip()
        if text == "0":
            return FgAbGroup()
        orders: list[int] = []
        for part in text.replace("⊕", "+").split("+"):
            part = part.strip().replace("ℤ", "Z")
            if part.startswith("Z/"):
                orders.append(int(part[2:]))
            elif part.startswith("Z^"):
                orders += [0] * int(part[2:])
            elif part == "Z":
                orders.append(0)
            else:
                raise ValueError(f"cannot parse group summand {part!r}")
        return FgAbGroup.from_orders(orders)


def presentation(orders: Sequence[int]) -> tuple[FgAbGroup, Matrix, Matrix]:
    """Canonicalize ``Z/o1 + ... + Z/ok`` (0 meaning ``Z``).

    Returns ``(G, to_g, from_g)``: ``to_g`` (``G.ngens x k``) maps old
    coordinates to canonical ones, and column ``j`` of ``from_g``
    (``k x G.ngens``) expresses canonical generator ``j`` in old coordinates.
    """
    k = len(orders)
    rel = [[int(orders[i]) if i == j else 0 for j in range(k)] for i in range(k)]
    return quotient(rel, k)


def quotient(relations: Matrix, rank: int) -> tuple[FgAbGroup, Matrix, Matrix]:
    """``Z^rank`` modulo the column span of ``relations`` (``rank`` rows).

    Returns ``(G, proj, lifts)`` like :func:`presentation`.
    """
    if rank == 0:
        return FgAbGroup(), [], []
    ncols = len(relations[0]) if relations else 0
    if ncols == 0:
        relations = [[0] for _ in range(rank)]
    u, uinv, d, _ = _snf(relations)
    diag = (_diagonal(d) + [0] * rank)[:rank]
    keep = [i for i in range(rank) if diag[i] != 1]
    torsion = [diag[i] for i in keep if diag[i] != 0]
    free = sum(1 for i in keep if diag[i] == 0)
    group = FgAbGroup(free, tuple(torsion))
    # SNF already lists nonzero factors before zeros, in divisibility order
    mods = group.moduli
    proj = []
    for row_i, i in enumerate(keep):
        m = mods[row_i]
        proj.append([x % m if m else x for x in u[i]])
    lifts = [[uinv[r][i] for i in keep] for r in range(rank)]
    return group, proj, lifts


# ---------------------------------------------------------------------------
# homomorphisms


@dataclass(frozen=True)
class GroupHom:
    """A homomorphism given by an integer matrix in canonical bases.

    Columns correspond to source generators, rows to target generators.
    Entries in rows of torsion target generators are reduced on
    construction; a column that does not respect the order of its source
    generator is rejected.
    """

    source: FgAbGroup
    target: FgAbGroup
    matrix: tuple[tuple[int, ...], ...]

    def __init__(self, source: FgAbGroup, target: FgAbGroup, matrix: Sequence[Sequence[int]]):
        rows = [list(map(int, r)) for r in matrix]
        if len(rows) != target.ngens or any(len(r) != source.ngens for r in rows):
            raise ValueError(
                f"matrix shape does not match {target.ngens}x{source.ngens}"
            )
        tmods = target.moduli
        rows = [[x % m if m else x for x in r] for r, m in zip(rows, tmods)]
        for j, s in enumerate(source.moduli):
            for i, m in enumerate(tmods):
                x = rows[i][j] * s
                if (x % m if m else x) != 0:
                    raise ValueError(
                        f"generator {j} of order {s or 'inf'} cannot map to a "
                        "non-annihilated element"
                    )
        object.__setattr__(self, "source", source)
        object.__setattr__(self, "target", target)
        object.__setattr__(self, "matrix", tuple(tuple(r) for r in rows))

    @staticmethod
    def zero(source: FgAbGroup, target: FgAbGroup) -> GroupHom:
        return GroupHom(source, target, zeros(target.ngens, source.ngens))

    @staticmethod
    def identity(group: FgAbGroup) -> GroupHom:
        return GroupHom(group, group, identity(group.ngens))

    def __call__(self, vec: Sequence[int]) -> tuple[int, ...]:
        vec = list(vec)
        out = [sum(a * b for a, b in zip(row, vec)) for row in self.matrix]
        return self.target.reduce(out)

    def compose(self, inner: GroupHom) -> GroupHom:
        """``self o inner``."""
        if inner.target != self.source:
            raise ValueError("composition of mismatched homomorphisms")
        mid = self.source.ngens
        m = [
            [sum(self.matrix[i][t] * inner.matrix[t][j] for t in range(mid))
             for j in range(inner.source.ngens)]
            for i in range(self.target.ngens)
        ]
        return GroupHom(inner.source, self.target, m)

    def __matmul__(self, inner: GroupHom) -> GroupHom:
        return self.compose(inner)

    def __add__(self, other: GroupHom) -> GroupHom:
        if (self.source, self.target) != (other.source, other.target):
            raise ValueError("sum of homomorphisms with different domains")
        return GroupHom(
            self.source,
            self.target,
            [[a + b for a, b in zip(r, s)] for r, s in zip(self.matrix, other.matrix)],
        )

    def is_zero(self) -> bool:
        return all(x == 0 for r in self.matrix for x in r)

    def __str__(self) -> str:
        return f"{self.source} -> {self.target} {[list(r) for r in self.matrix]}"


def cokernel_data(f: GroupHom) -> tuple[FgAbGroup, Matrix, Matrix]:
    """``(C, proj, lifts)`` for ``C = target / f(source)``."""
    m = f.target.ngens
    rel = [list(row) + [f.target.moduli[i] if i == j else 0 for j in range(m)]
           for i, row in enumerate(f.matrix)]
    return quotient(rel, m)


def cokernel(f: GroupHom) -> FgAbGroup:
    return cokernel_data(f)[0]


def integer_nullspace(a: Matrix, ncols: int) -> Matrix:
    """Basis of ``{x in Z^ncols : a x = 0}`` as columns of an ``ncols x k`` matrix."""
    if not a:
        return identity(ncols)
    _, d, v = smith_normal_form(a)
    rank = sum(1 for x in _diagonal(d) if x)
    return [row[rank:] for row in v]


def kernel_inclusion(f: GroupHom) -> GroupHom:
    """The inclusion ``ker f -> source`` with ``ker f`` in canonical form."""
    src, tgt = f.source, f.target
    n, m = src.ngens, tgt.ngens
    if n == 0:
        return GroupHom(FgAbGroup(), src, [])
    # x in Z^n maps into the target relations: [M | diag(t)] (x, y) = 0
    aug = [list(row) + [tgt.moduli[i] if i == j else 0 for j in range(m)]
           for i, row in enumerate(f.matrix)]
    null = integer_nullspace(aug, n + m)
    gens = [row for row in null[:n]]  # n x k, spans the preimage lattice
    smods = src.moduli
    for j in range(n):
        for i in range(n):
            gens[i].append(smods[j] if i == j else 0)
    # basis of the lattice spanned by gens
    u, uinv, d, _ = _snf(gens)
    diag = _diagonal(d)
    rank = sum(1 for x in diag if x)
    basis = [[uinv[r][i] * diag[i] for i in range(rank)] for r in range(n)]
    # coordinates of the source relations in that basis
    coords = zeros(rank, n)
    for j in range(n):
        if smods[j] == 0:
            continue
        col = [u[i][j] * smods[j] for i in range(rank)]
        for i in range(rank):
            q, r = divmod(col[i], diag[i])
            assert r == 0
            coords[i][j] = q
    group, _, lifts = quotient(coords, rank)
    incl = matmul(basis, lifts, rank) if rank else zeros(n, group.ngens)
    return GroupHom(group, src, incl)


def kernel(f: GroupHom) -> FgAbGroup:
    return kernel_inclusion(f).source


def image(f: GroupHom) -> FgAbGroup:
    """Image of ``f`` in canonical form (``source / ker f``)."""
    return cokernel(kernel_inclusion(f))


def is_injective(f: GroupHom) -> bool:
    return kernel(f).is_trivial()


def is_surjective(f: GroupHom) -> bool:
    return cokernel(f).is_trivial()


def is_isomorphism(f: GroupHom) -> bool:
    return is_injective(f) and is_surjective(f)


# ---------------------------------------------------------------------------
# extensions


@dataclass(frozen=True)
class Ambiguous:
    """Several non-isomorphic middle groups are possible."""

    candidates: tuple[FgAbGroup, ...]

    def __str__(self) -> str:
        return "Ambiguous{" + ", ".join(str(c) for c in self.candidates) + "}"


ExtensionResult = Union[FgAbGroup, Ambiguous]

# cap on the number of extension classes enumerated before giving up
_EXT_ENUM_LIMIT = 200_000


def extension_candidates(sub: FgAbGroup, quot: FgAbGroup) -> tuple[FgAbGroup, ...]:
    """All middle groups ``E`` in ``0 -> sub -> E -> quot -> 0`` up to isomorphism.

    The free part of ``quot`` always splits off.  For each torsion generator
    of ``quot`` of order ``b`` the extension class is an element of
    ``sub / b sub``; every choice is enumerated.
    """
    a_mods = sub.moduli
    na = len(a_mods)
    choices = []
    for b in quot.torsion:
        # representatives of sub / b sub
        ranges = [range(gcd(b, m) if m else b) for m in a_mods]
        choices.append(list(itertools.product(*ranges)))
    total = 1
    for c in choices:
        total *= len(c)
    if total > _EXT_ENUM_LIMIT:
        raise ValueError("extension enumeration too large")
    found = set()
    k = len(quot.torsion)
    for pick in itertools.product(*choices):
        rank = na + k
        rels = []
        for i, m in enumerate(a_mods):
            col = [0] * rank
            col[i] = m
            rels.append(col)
        for j, b in enumerate(quot.torsion):
            col = [0] * rank
            col[na + j] = b
            for i, x in enumerate(pick[j]):
                col[i] -= x
            rels.append(col)
        g = quotient(transpose(rels), rank)[0] if rels else FgAbGroup()
        found.add(FgAbGroup(g.free_rank + quot.free_rank, g.torsion))
    return tuple(sorted(found, key=lambda g: (g.free_rank, len(g.torsion), g.torsion)))


def classify_extension(sub: FgAbGroup, quot: FgAbGroup) -> ExtensionResult:
    """The middle group of ``0 -> sub -> E -> quot -> 0`` if it is determined.

    >>> str(classify_extension(FgAbGroup.cyclic(2), FgAbGroup.free(1)))
    'Z + Z/2'
    >>> str(classify_extension(FgAbGroup.cyclic(2), FgAbGroup.cyclic(2)))
    'Ambiguous{Z/4, Z/2 + Z/2}'
    """
    if sub.is_trivial():
        return quot
    if quot.is_trivial():
        return sub
    if not quot.torsion:
        # a free quotient always splits
        return sub + quot
    cands = extension_candidates(sub, quot)
    if len(cands) == 1:
        return cands[0]
    return Ambiguous(cands)


def ext_vanishes(sub: FgAbGroup, quot: FgAbGroup) -> bool:
    """True when every extension of ``quot`` by ``sub`` splits."""
    return all(
        all((gcd(b, m) if m else b) == 1 for m in sub.moduli) for b in quot.torsion
    )
