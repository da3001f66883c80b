"""Exact linear algebra over the rationals.

Vectors are tuples of :class:`fractions.Fraction`; matrices are tuples of
row tuples.  Nothing here ever rounds.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Sequence

Vec = tuple[Fraction, ...]
Mat = tuple[Vec, ...]


def rat(x) -> Fraction:
    """Coerce ints, Fractions and ``"p/q"`` strings to a Fraction.

    Floats are rejected: a float silently carries binary rounding error.
    """
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise TypeError("booleans are not rationals")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x.strip())
    raise TypeError(f"cannot build an exact rational from {type(x).__name__}")


def vec(xs: Iterable) -> Vec:
    return tuple(rat(x) for x in xs)


def mat(rows: Iterable[Iterable]) -> Mat:
    return tuple(vec(r) for r in rows)


def zeros(n: int) -> Vec:
    return (Fraction(0),) * n


def unit(n: int, i: int) -> Vec:
    return tuple(Fraction(1 if k == i else 0) for k in range(n))


def identity(n: int) -> Mat:
    return tuple(unit(n, i) for i in range(n))


def dot(a: Sequence, b: Sequence) -> Fraction:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return sum((x * y for x, y in zip(a, b)), Fraction(0))


def add(a: Sequence, b: Sequence) -> Vec:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return tuple(x + y for x, y in zip(a, b))


def sub(a: Sequence, b: Sequence) -> Vec:
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    return tuple(x - y for x, y in zip(a, b))


def scale(c, a: Sequence) -> Vec:
    c = rat(c)
    return tuple(c * x for x in a)


def neg(a: Sequence) -> Vec:
    return tuple(-x for x in a)


def lincomb(coeffs: Sequence, vectors: Sequence[Sequence]) -> Vec:
    if not vectors:
        raise ValueError("empty combination")
    out = [Fraction(0)] * len(vectors[0])
    for c, v in zip(coeffs, vectors, strict=True):
        if c:
            for k, x in enumerate(v):
                out[k] += c * x
    return tuple(out)


def is_zero(a: Sequence) -> bool:
    return all(x == 0 for x in a)


def transpose(m: Sequence[Sequence]) -> Mat:
    return tuple(zip(*m)) if m else ()


def matvec(m: Sequence[Sequence], v: Sequence) -> Vec:
    return tuple(dot(row, v) for row in m)


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Mat:
    bt = transpose(b)
    return tuple(tuple(dot(row, col) for col in bt) for row in a)


def outer(a: Sequence, b: Sequence) -> Mat:
    return tuple(tuple(x * y for y in b) for x in a)


def flatten(m: Sequence[Sequence]) -> Vec:
    return tuple(x for row in m for x in row)


def row_reduce(rows: Sequence[Sequence]) -> tuple[list[list[Fraction]], list[int]]:
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(map(rat, r)) for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if p is None:
            continue
        m[r], m[p] = m[p], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def rank(rows: Sequence[Sequence]) -> int:
    return len(row_reduce(rows)[1])


def nullspace(rows: Sequence[Sequence], ncols: int | None = None) -> list[Vec]:
    """Basis of {x : rows @ x = 0}."""
    if ncols is None:
        ncols = len(rows[0])
    red, pivots = row_reduce(rows) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        x = [Fraction(0)] * ncols
        x[f] = Fraction(1)
        for row, p in zip(red, pivots):
            x[p] = -row[f]
        basis.append(tuple(x))
    return basis


def solve(a: Sequence[Sequence], b: Sequence) -> Vec:
    """Solve the square system a @ x = b; raises on singular a."""
    n = len(a)
    aug = [list(map(rat, row)) + [rat(bi)] for row, bi in zip(a, b, strict=True)]
    red, pivots = row_reduce(aug)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular system")
    return tuple(row[n] for row in red)


def inverse(a: Sequence[Sequence]) -> Mat:
    n = len(a)
    aug = [list(map(rat, row)) + list(unit(n, i)) for i, row in enumerate(a)]
    red, pivots = row_reduce(aug)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(row[n:]) for row in red)


def independent_subset(vectors: Sequence[Sequence]) -> list[int]:
    """Indices of a greedy maximal linearly independent subset, in order."""
    chosen: list[int] = []
    basis: list[list[Fraction]] = []
    for i, v in enumerate(vectors):
        trial = basis + [list(v)]
        red, piv = row_reduce(trial)
        if len(piv) > len(basis):
            basis = red
            chosen.append(i)
    return chosen


def primitive(v: Sequence) -> tuple[int, ...]:
    """Positive rescaling of ``v`` to a primitive integer vector.

    Rays are directed, so only positive factors are applied; the sign of
    every coordinate is preserved.
    """
    fr = [rat(x) for x in v]
    den = lcm(*(x.denominator for x in fr)) if fr else 1
    ints = [int(x * den) for x in fr]
    g = 0
    for k in ints:
        g = gcd(g, k)
    if g == 0:
        return tuple(ints)
    return tuple(k // g for k in ints)


def canonical_ray(v: Sequence) -> Vec:
    return tuple(Fraction(k) for k in primitive(v))


def canonical_set(vectors: Iterable[Sequence]) -> frozenset[tuple[int, ...]]:
    return frozenset(primitive(v) for v in vectors)
