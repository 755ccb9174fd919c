"""Shared helpers for the test suites: random manifolds and knowledge bases,
and a naive reference inference loop."""

from __future__ import annotations

import random
from fractions import Fraction

from bfcalc import engine as E
from bfcalc.catalog import HYPERBOLIC, NEG_E8, cp2, k3, k3_sum, s2xs2
from bfcalc.errors import Inconsistent
from bfcalc.fourman import ManifoldDescriptor, block_sum, blowup_times, glue
from bfcalc.lattice import solve_rational


def diagonal(name: str, pos: int, neg: int, b1: int = 0) -> ManifoldDescriptor:
    n = pos + neg
    form = [[(1 if i < pos else -1) if i == j else 0 for j in range(n)] for i in range(n)]
    return ManifoldDescriptor(name, b1, pos, neg, form)


def random_characteristic(X: ManifoldDescriptor, rng: random.Random, spread: int = 1) -> tuple[int, ...]:
    """A characteristic vector c: Qc = w with w_i = Q_ii mod 2 (Q unimodular)."""
    Q = X.form
    if not Q:
        return ()
    w = [Q[i][i] % 2 + 2 * rng.randint(-spread, spread) for i in range(len(Q))]
    c = solve_rational(Q, w)
    assert all(Fraction(x).denominator == 1 for x in c)
    return tuple(int(x) for x in c)


def random_manifold(rng: random.Random, name: str) -> ManifoldDescriptor:
    kind = rng.choice(["diag", "diag", "blowup", "sum", "k3like", "catalog"])
    if kind == "diag":
        return diagonal(name, rng.randint(1, 5), rng.randint(0, 3))
    if kind == "blowup":
        base = rng.choice([diagonal(name + "b", rng.randint(2, 4), rng.randint(0, 2)), k3()])
        return blowup_times(base, rng.randint(1, 2))
    if kind == "sum":
        a = diagonal(name + "x", rng.randint(1, 3), rng.randint(0, 2))
        b = diagonal(name + "y", rng.randint(1, 3), rng.randint(0, 2))
        Y = glue(a, b)
        return ManifoldDescriptor(name, Y.b1, Y.b2_plus, Y.b2_minus, Y.form, pieces=Y.pieces, glue_kind=Y.glue_kind)
    if kind == "k3like":
        h = rng.choice([3, 7])
        e = 2 if h == 3 else 4
        form = block_sum(*([HYPERBOLIC] * h), *([NEG_E8] * e))
        return ManifoldDescriptor(name, 0, h, h + 8 * e, form)
    return rng.choice([k3(), k3_sum(2), k3_sum(3), cp2(), s2xs2()])


def interesting_class(kb: E.KnowledgeBase, X: ManifoldDescriptor, rng: random.Random) -> tuple[int, ...]:
    """A characteristic class, preferring non-negative virtual dimension."""
    best = None
    for _ in range(30):
        c = random_characteristic(X, rng, spread=rng.choice([0, 1]))
        d = kb.dim((X.name, c))
        if d >= 0:
            return c
        if best is None or d > best[0]:
            best = (d, c)
    return best[1]


def random_kb(rng: random.Random, max_manifolds: int = 5) -> E.KnowledgeBase:
    kb = E.KnowledgeBase()
    if rng.random() < 0.3:
        kb = E.load_catalog_axioms(kb)
    count = rng.randint(1, max_manifolds)
    for i in range(count):
        kb = E.add_manifold(kb, random_manifold(rng, f"M{i}"))
    names = sorted(kb.manifolds)
    keys = []
    for _ in range(rng.randint(1, 6)):
        X = kb.manifold(rng.choice(names))
        c = interesting_class(kb, X, rng)
        if (X.name, c) in keys or (X.name, c) in kb.bf or (X.name, c) in kb.sw:
            continue
        keys.append((X.name, c))
        roll = rng.random()
        if roll < 0.4:
            kb = E.assert_fact(kb, X.name, c, bf=rng.choice(["Zero", "Nonzero"]))
        elif roll < 0.7:
            kb = E.assert_fact(kb, X.name, c, sw=E.SWFact(rng.choice([0, 1, 2, 3, -1])))
        else:
            kb = _watch(kb, X.name, c)
    if rng.random() < 0.5:
        X = kb.manifold(rng.choice(names))
        kb = E.assert_flag(kb, X.name, rng.choice([E.BLOWUP_SIMPLE, E.SYMPLECTIC, E.homogeneous(0)]))
    # a trusted common-complement declaration between keys with matching b1, b2+
    for a in keys:
        for b in keys:
            if a < b and rng.random() < 0.3:
                Xa, Xb = kb.manifold(a[0]), kb.manifold(b[0])
                if (Xa.b1, Xa.b2_plus) == (Xb.b1, Xb.b2_plus):
                    kb = E.declare_common_complement(kb, a, b)
    return kb


def _watch(kb: E.KnowledgeBase, name: str, c) -> E.KnowledgeBase:
    kb = kb.copy()
    kb.watch.add((name, tuple(c)))
    return kb


def naive_infer(kb: E.KnowledgeBase, rng: random.Random, max_steps: int = 100_000) -> E.KnowledgeBase:
    """Apply one randomly chosen effective update at a time until none is left.

    Every rule is re-run from scratch on every step.  Raises Inconsistent
    as soon as a conflicting update is chosen or none but conflicting ones remain.
    """
    kb = kb.copy()
    for _ in range(max_steps):
        effective = []
        for rule in E.RULES:
            for u in rule(kb):
                trial = kb.copy()
                try:
                    if E._apply(trial, u):
                        effective.append(u)
                except Inconsistent:
                    effective.append(u)
        if not effective:
            return kb
        E._apply(kb, rng.choice(effective))
    raise RuntimeError("reference inference did not converge")


def snapshot(kb: E.KnowledgeBase) -> tuple:
    return (
        {k: st for k, (st, _) in kb.bf.items()},
        {k: f for k, (f, _) in kb.sw.items()},
        {k: v for k, (v, _) in kb.flags.items()},
    )


def outcome(fn, kb, *args):
    try:
        return snapshot(fn(kb, *args))
    except Inconsistent:
        return "Inconsistent"


# ---------------------------------------------------------------------------
# finite abelian group oracles


def torsion_count(orders, k: int) -> int:
    """Number of elements x with kx = 0 in the direct sum of Z/o (o > 0)."""
    from math import gcd

    n = 1
    for o in orders:
        n *= gcd(k, o)
    return n


def random_finite_group(rng: random.Random, max_order: int = 200):
    from bfcalc.abelian import FgAbGroup

    while True:
        orders = [rng.randint(1, 12) for _ in range(rng.randint(0, 3))]
        total = 1
        for o in orders:
            total *= o
        if total <= max_order:
            return FgAbGroup.from_orders(orders)


def random_hom(rng: random.Random, A, B):
    """A random homomorphism A -> B between finite groups in canonical form."""
    from math import gcd

    from bfcalc.abelian import GroupHom

    rows = []
    for t in B.moduli:
        row = []
        for s in A.moduli:
            step = t // gcd(s, t)
            row.append(step * rng.randint(0, t))
        rows.append(row)
    return GroupHom(A, B, rows)


def enumerate_kernel_cokernel(f) -> tuple[list, set]:
    """Brute-force kernel elements and image set of a map of finite groups."""
    zero = tuple(0 for _ in f.target.moduli)
    kernel, image = [], set()
    for x in f.source.elements():
        y = f(x)
        image.add(y)
        if y == zero:
            kernel.append(x)
    return kernel, image


def scale(G, x, k):
    return G.reduce([k * a for a in x])


def check_against_enumeration(f) -> None:
    """Kernel and cokernel of ``f`` agree with brute force on every k-torsion count."""
    from bfcalc.abelian import cokernel, kernel

    K, C = kernel(f), cokernel(f)
    ker_elems, image = enumerate_kernel_cokernel(f)
    B = f.target
    zero_a = tuple(0 for _ in f.source.moduli)
    assert K.order == len(ker_elems)
    assert C.order * len(image) == B.order
    bound = max(B.order or 1, f.source.order or 1)
    for k in range(1, bound + 1):
        assert torsion_count(K.torsion, k) == sum(1 for x in ker_elems if scale(f.source, x, k) == zero_a)
        lifted = sum(1 for b in B.elements() if scale(B, b, k) in image)
        assert torsion_count(C.torsion, k) * len(image) == lifted


def random_unimodular(rng: random.Random, n: int, steps: int = 6) -> list[list[int]]:
    P = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps if n > 1 else 0):
        i, j = rng.sample(range(n), 2)
        k = rng.choice([-1, 1])
        for r in range(n):
            P[r][i] += k * P[r][j]
    return P


def random_form_manifold(rng: random.Random, name: str, max_rank: int = 8) -> ManifoldDescriptor:
    """A closed simply connected descriptor with a random unimodular form in a
    random basis (diagonal, hyperbolic and E8 blocks)."""
    from bfcalc.lattice import inertia

    while True:
        blocks, rank = [], 0
        target = rng.randint(1, max_rank)
        while rank < target:
            choice = rng.choice(["+", "-", "H"] + (["E8"] if target - rank >= 8 else []))
            if choice == "+":
                blocks.append([[1]]); rank += 1
            elif choice == "-":
                blocks.append([[-1]]); rank += 1
            elif choice == "H" and target - rank >= 2:
                blocks.append(HYPERBOLIC); rank += 2
            elif choice == "E8":
                blocks.append(NEG_E8); rank += 8
        D = block_sum(*blocks)
        if len(D) <= max_rank:
            break
    n = len(D)
    P = random_unimodular(rng, n)
    Q = [[sum(P[k][i] * D[k][l] * P[l][j] for k in range(n) for l in range(n)) for j in range(n)] for i in range(n)]
    pos, neg, _ = inertia(Q)
    return ManifoldDescriptor(name, 0, pos, neg, Q)
