"""Exact helpers for integral symmetric bilinear forms."""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Iterator, Sequence

Form = Sequence[Sequence[int]]


def pair(form: Form, x: Sequence, y: Sequence):
    """x^T Q y."""
    total = 0
    for i, xi in enumerate(x):
        if xi:
            row = form[i]
            total += xi * sum(row[j] * yj for j, yj in enumerate(y) if yj)
    return total


def is_symmetric(form: Form) -> bool:
    n = len(form)
    return all(len(r) == n for r in form) and all(
        form[i][j] == form[j][i] for i in range(n) for j in range(i)
    )


def inertia(form: Form) -> tuple[int, int, int]:
    """(positive, negative, zero) counts of a symmetric form, exactly."""
    n = len(form)
    a = [[Fraction(x) for x in r] for r in form]
    pos = neg = 0
    idx = list(range(n))
    while idx:
        piv = next((i for i in idx if a[i][i] != 0), None)
        if piv is None:
            # all remaining diagonal entries vanish; use an off-diagonal pair
            pair_ij = next(
                ((i, j) for i in idx for j in idx if i != j and a[i][j] != 0), None
            )
            if pair_ij is None:
                break
            i, j = pair_ij
            # replace e_i by e_i + e_j, whose square is 2 a_ij != 0
            for k in range(n):
                a[i][k] += a[j][k]
            for k in range(n):
                a[k][i] += a[k][j]
            piv = i
        p = a[piv][piv]
        if p > 0:
            pos += 1
        else:
            neg += 1
        idx.remove(piv)
        for i in idx:
            f = a[i][piv] / p
            if f:
                for k in idx:
                    a[i][k] -= f * a[piv][k]
        for i in idx:
            a[i][piv] = a[piv][i] = Fraction(0)
    return pos, neg, n - pos - neg


def solve_rational(a: Sequence[Sequence], b: Sequence) -> list[Fraction]:
    """Solve a square nonsingular system exactly."""
    n = len(a)
    m = [[Fraction(x) for x in row] + [Fraction(bi)] for row, bi in zip(a, b)]
    for c in range(n):
        r = next(i for i in range(c, n) if m[i][c] != 0)
        m[c], m[r] = m[r], m[c]
        inv = 1 / m[c][c]
        m[c] = [x * inv for x in m[c]]
        for i in range(n):
            if i != c and m[i][c]:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [m[i][n] for i in range(n)]


def inverse_rational(a: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(a)
    cols = [solve_rational(a, [int(i == j) for i in range(n)]) for j in range(n)]
    return [[cols[j][i] for j in range(n)] for i in range(n)]


def short_vectors(a: Sequence[Sequence], bound) -> Iterator[tuple[int, ...]]:
    """All integer x with x^T A x <= bound for positive definite rational A.

    Fincke-Pohst enumeration with exact arithmetic for every comparison.
    """
    n = len(a)
    q = [[Fraction(x) for x in r] for r in a]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    bound = Fraction(bound)
    x = [0] * n

    def rec(i: int, remaining: Fraction):
        if i < 0:
            yield tuple(x)
            return
        c = -sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        s = math.sqrt(max(float(remaining / q[i][i]), 0.0))
        lo = math.floor(float(c) - s) - 1
        hi = math.ceil(float(c) + s) + 1
        for v in range(lo, hi + 1):
            t = q[i][i] * (v - c) ** 2
            if t <= remaining:
                x[i] = v
                yield from rec(i - 1, remaining - t)
        x[i] = 0

    yield from rec(n - 1, bound)
