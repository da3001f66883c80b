"""Reference computations that share no code with the package."""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations
from math import gcd

import numpy as np
from scipy.optimize import linprog


def primitive_int(v) -> tuple[int, ...]:
    """Scale a rational vector to coprime integers, keeping its direction."""
    fr = [Fraction(x) for x in v]
    den = 1
    for x in fr:
        den = den * x.denominator // gcd(den, x.denominator)
    ints = [int(x * den) for x in fr]
    g = 0
    for k in ints:
        g = gcd(g, k)
    return tuple(k // g for k in ints)


def brute_force_rays(facets, dim: int) -> set[tuple[int, ...]]:
    """Extreme rays of {x : f.x >= 0} by trying every (dim-1)-subset of
    facets whose kernel is one-dimensional.

    Kernels come from a float SVD, are rounded to nearby rationals and then
    checked exactly; any failure of the exact check raises.
    """
    rows = [tuple(int(x) for x in primitive_int(f)) for f in facets]
    arr = np.array(rows, dtype=float)
    found: set[tuple[int, ...]] = set()
    for sub in combinations(range(len(rows)), dim - 1):
        m = arr[list(sub)]
        if np.linalg.matrix_rank(m) != dim - 1:
            continue
        _, _, vt = np.linalg.svd(m)
        k = vt[-1]
        k = k / np.max(np.abs(k))
        cand = [Fraction(float(x)).limit_denominator(10**6) for x in k]
        for i in sub:
            if sum(Fraction(a) * b for a, b in zip(rows[i], cand)) != 0:
                raise AssertionError("kernel rounding failed")
        for sign in (1, -1):
            v = [sign * x for x in cand]
            if all(sum(Fraction(a) * b for a, b in zip(r, v)) >= 0 for r in rows):
                found.add(primitive_int(v))
    return found


def scipy_in_cone(generators, x) -> bool:
    """Float LP: is x a nonnegative combination of the generators?"""
    g = np.array([[float(c) for c in v] for v in generators]).T
    b = np.array([float(c) for c in x])
    res = linprog(np.zeros(g.shape[1]), A_eq=g, b_eq=b, bounds=(0, None), method="highs")
    return res.status == 0


def scipy_lp_value(c, a_ub, b_ub, a_eq=None, b_eq=None, free=()):
    bounds = [(None, None) if j in set(free) else (0, None) for j in range(len(c))]
    f = lambda m: None if m is None or len(m) == 0 else np.array([[float(x) for x in r] for r in m])  # noqa: E731
    v = lambda m: None if m is None or len(m) == 0 else np.array([float(x) for x in m])  # noqa: E731
    res = linprog(
        [float(x) for x in c],
        A_ub=f(a_ub),
        b_ub=v(b_ub),
        A_eq=f(a_eq),
        b_eq=v(b_eq),
        bounds=bounds,
        method="highs",
    )
    return {0: "optimal", 2: "infeasible", 3: "unbounded"}.get(res.status, "other"), res.fun


def segment_intersection(p0, p1, q0, q1):
    """Parameters (t, s) with (1-t) p0 + t p1 = (1-s) q0 + s q1 (Cramer)."""
    ax, ay = p1[0] - p0[0], p1[1] - p0[1]
    bx, by = q1[0] - q0[0], q1[1] - q0[1]
    cx, cy = q0[0] - p0[0], q0[1] - p0[1]
    det = ax * (-by) - (-bx) * ay
    t = Fraction(cx * (-by) - (-bx) * cy) / det
    s = Fraction(ax * cy - ay * cx) / det
    return t, s


def random_polytope_points(rng: random.Random, dim: int, extra: int, span: int = 5):
    """Random integer points in R^(dim-1) that affinely span it."""
    k = dim - 1
    while True:
        pts = {tuple(rng.randint(-span, span) for _ in range(k)) for _ in range(k + 1 + extra)}
        pts = sorted(pts)
        base = np.array(pts[0], dtype=float)
        diffs = np.array([np.array(p, dtype=float) - base for p in pts[1:]])
        if len(pts) > k and np.linalg.matrix_rank(diffs) == k:
            return pts


def random_rational(rng: random.Random, lo: int = -1, hi: int = 1, den: int = 97) -> Fraction:
    """Uniform-ish rational strictly inside (lo, hi)."""
    n = rng.randint(lo * den + 1, hi * den - 1)
    return Fraction(n, den)
