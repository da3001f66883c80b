"""Proper cones, exactly.

Three representations share one interface:

* :class:`PolyV` -- the cone generated by finitely many vectors,
* :class:`PolyH` -- the solution set of finitely many ``f . x >= 0``,
* :class:`Lorentz` -- ``x_d >= 0`` and ``x_d**2 >= x_1**2 + ... + x_{d-1}**2``.

Functionals are stored in the same coordinates as vectors and applied with
the standard dot product, so ``dual(PolyV(g)) == PolyH(g)`` literally.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence, Union

from . import dd
from .errors import DimensionMismatch, NotProperError, UnsupportedRepresentation
from .linalg import (
    Vec,
    add,
    canonical_ray,
    dot,
    is_zero,
    lincomb,
    rank,
    sub,
    transpose,
    vec,
    zeros,
)
from .lorentz import (
    in_lorentz,
    in_lorentz_interior,
    line_interval,
    on_lorentz_boundary,
    rational_point,
)
from .lp import feasible_nonneg, linprog


def _vectors(vs: Iterable, dim: int, what: str) -> tuple[Vec, ...]:
    out = tuple(vec(v) for v in vs)
    for v in out:
        if len(v) != dim:
            raise DimensionMismatch(f"{what} of length {len(v)} in dimension {dim}")
        if is_zero(v):
            raise ValueError(f"zero {what}")
    return out


@dataclass(frozen=True)
class PolyV:
    dim: int
    generators: tuple[Vec, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "generators", _vectors(self.generators, self.dim, "generator"))

    @cached_property
    def _facets(self) -> tuple[Vec, ...]:
        _require_proper(self)
        raw = dd.as_fraction_rays(dd.extreme_rays(self.generators, self.dim))
        return _irredundant(raw, self.generators, self.dim)

    @cached_property
    def _rays(self) -> tuple[Vec, ...]:
        return _irredundant(self.generators, self._facets, self.dim)


@dataclass(frozen=True)
class PolyH:
    dim: int
    facets: tuple[Vec, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "facets", _vectors(self.facets, self.dim, "facet"))

    @cached_property
    def _rays(self) -> tuple[Vec, ...]:
        _require_proper(self)
        return tuple(sorted(dd.as_fraction_rays(dd.extreme_rays(self.facets, self.dim))))

    @cached_property
    def _facets(self) -> tuple[Vec, ...]:
        return _irredundant(self.facets, self._rays, self.dim)


@dataclass(frozen=True)
class Lorentz:
    dim: int

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("Lorentz cone needs dim >= 2")


ConeRep = Union[PolyV, PolyH, Lorentz]


def _irredundant(cands: Sequence[Vec], others: Sequence[Vec], dim: int) -> tuple[Vec, ...]:
    """Keep candidates whose tight set among ``others`` has rank dim - 1.

    Works in both directions: rays vs facets and facets vs rays.
    """
    seen = set()
    out = []
    for c in cands:
        key = canonical_ray(c)
        if key in seen:
            continue
        tight = [o for o in others if dot(o, c) == 0]
        if len(tight) >= dim - 1 and rank(tight) == dim - 1:
            seen.add(key)
            out.append(key)
    return tuple(sorted(out))


def _check_dim(c: ConeRep, x: Sequence) -> None:
    if len(x) != c.dim:
        raise DimensionMismatch(f"vector of length {len(x)} against cone of dim {c.dim}")


def _require_polyhedral(c: ConeRep, op: str) -> None:
    if isinstance(c, Lorentz):
        raise UnsupportedRepresentation(f"{op} is not available for Lorentz cones")


def _require_proper(c: ConeRep) -> None:
    if not is_proper(c):
        raise NotProperError("cone is not proper")


# --- membership and duality ------------------------------------------------


def membership(c: ConeRep, x: Sequence) -> bool:
    x = vec(x)
    _check_dim(c, x)
    if isinstance(c, Lorentz):
        return in_lorentz(x)
    if isinstance(c, PolyH):
        return all(dot(f, x) >= 0 for f in c.facets)
    if is_zero(x):
        return True
    if not c.generators:
        return False
    return feasible_nonneg(transpose(c.generators), x).feasible


def dual_membership(c: ConeRep, f: Sequence) -> bool:
    """Is ``f`` in the dual cone ``C*``?"""
    return membership(dual(c), f)


def dual(c: ConeRep) -> ConeRep:
    if isinstance(c, PolyV):
        return PolyH(c.dim, c.generators)
    if isinstance(c, PolyH):
        return PolyV(c.dim, c.facets)
    return Lorentz(c.dim)


def to_vrep(c: ConeRep) -> PolyV:
    """Minimal V-representation with canonically scaled rays."""
    _require_polyhedral(c, "to_vrep")
    return PolyV(c.dim, c._rays)


def to_hrep(c: ConeRep) -> PolyH:
    """Minimal H-representation with canonically scaled facets."""
    _require_polyhedral(c, "to_hrep")
    return PolyH(c.dim, c._facets)


def enumerate_extreme_rays(c: ConeRep) -> list[Vec]:
    _require_polyhedral(c, "extreme-ray enumeration")
    return list(c._rays)


def facets(c: ConeRep) -> list[Vec]:
    """Extreme rays of the dual cone (the irredundant facet normals)."""
    _require_polyhedral(c, "facet enumeration")
    return list(c._facets)


# --- structural predicates -------------------------------------------------


def is_proper(c: ConeRep) -> bool:
    if isinstance(c, Lorentz):
        return True
    d = c.dim
    if isinstance(c, PolyV):
        gens = c.generators
        if not gens or rank(gens) < d:
            return False
        # salient iff 0 is not a nontrivial nonnegative combination
        rows = [list(r) for r in transpose(gens)] + [[Fraction(1)] * len(gens)]
        return not feasible_nonneg(rows, list(zeros(d)) + [Fraction(1)]).feasible
    fs = c.facets
    if not fs or rank(fs) < d:
        return False
    # generating iff some x has f.x >= 1 for every facet
    res = linprog(
        [0] * d,
        a_ub=[[-x for x in f] for f in fs],
        b_ub=[-1] * len(fs),
        free=range(d),
    )
    return res.status == "optimal"


def is_classical(c: ConeRep) -> bool:
    """Simplicial cone, i.e. the state space is a simplex."""
    _require_proper(c)
    if isinstance(c, Lorentz):
        return c.dim <= 2
    return len(c._rays) == c.dim


def is_strictly_positive(f: Sequence, c: ConeRep) -> bool:
    f = vec(f)
    _check_dim(c, f)
    if isinstance(c, Lorentz):
        return in_lorentz_interior(f)
    return all(dot(f, g) > 0 for g in c._rays)


def cone_over(points: Sequence[Sequence], dim: int | None = None) -> PolyV:
    """Cone over the convex hull of ``points``: generators ``(p; 1)``."""
    if not points:
        raise ValueError("cone_over needs at least one point")
    pts = [vec(p) for p in points]
    if dim is None:
        dim = len(pts[0])
    for p in pts:
        if len(p) != dim:
            raise DimensionMismatch(f"point of length {len(p)}, expected {dim}")
    return PolyV(dim + 1, [p + (Fraction(1),) for p in pts])


# --- compatibility ---------------------------------------------------------


@dataclass(frozen=True)
class CompatibilityDecomposition:
    """``z[i][j]`` in C with row sums ``xs[i]`` and column sums ``ys[j]``."""

    z: tuple[tuple[Vec, ...], ...]

    def row_sums(self) -> list[Vec]:
        return [_vsum(row) for row in self.z]

    def column_sums(self) -> list[Vec]:
        return [_vsum(col) for col in zip(*self.z)]


class _Unknown:
    def __repr__(self) -> str:
        return "UNKNOWN"

    def __bool__(self) -> bool:
        raise TypeError("UNKNOWN has no truth value; compare with `is UNKNOWN`")


UNKNOWN = _Unknown()
"""Returned by :func:`check_compatibility` when the Lorentz case analysis
cannot decide exactly."""


def _vsum(vs: Sequence[Vec]) -> Vec:
    out = vs[0]
    for v in vs[1:]:
        out = add(out, v)
    return out


def check_compatibility(xs: Sequence[Sequence], ys: Sequence[Sequence], c: ConeRep):
    """Find ``z_ij`` in C with ``sum_j z_ij = x_i`` and ``sum_i z_ij = y_j``.

    Returns a :class:`CompatibilityDecomposition`, ``None`` when the families
    are incompatible, or :data:`UNKNOWN` (Lorentz cones only).
    """
    xs = [vec(x) for x in xs]
    ys = [vec(y) for y in ys]
    if not xs or not ys:
        raise ValueError("empty family")
    for v in xs + ys:
        _check_dim(c, v)
        if not membership(c, v):
            raise ValueError(f"{v} is not in the cone")
    if _vsum(xs) != _vsum(ys):
        return None
    if isinstance(c, Lorentz):
        return _compat_lorentz(xs, ys, c)
    return _compat_poly(xs, ys, c)


def _compat_poly(xs: list[Vec], ys: list[Vec], c: ConeRep):
    rays = enumerate_extreme_rays(c)
    d, nx, ny, nr = c.dim, len(xs), len(ys), len(rays)

    def col(i: int, j: int, k: int) -> int:
        return (i * ny + j) * nr + k

    ncols = nx * ny * nr
    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i in range(nx):
        for t in range(d):
            row = [Fraction(0)] * ncols
            for j in range(ny):
                for k in range(nr):
                    row[col(i, j, k)] = rays[k][t]
            rows.append(row)
            rhs.append(xs[i][t])
    for j in range(ny):
        for t in range(d):
            row = [Fraction(0)] * ncols
            for i in range(nx):
                for k in range(nr):
                    row[col(i, j, k)] = rays[k][t]
            rows.append(row)
            rhs.append(ys[j][t])
    res = feasible_nonneg(rows, rhs)
    if not res.feasible:
        return None
    z = tuple(
        tuple(lincomb([res.x[col(i, j, k)] for k in range(nr)], rays) for j in range(ny))
        for i in range(nx)
    )
    return CompatibilityDecomposition(z)


def _compat_lorentz(xs: list[Vec], ys: list[Vec], c: Lorentz):
    if len(xs) > 2 or len(ys) > 2:
        raise UnsupportedRepresentation("Lorentz compatibility supports families of at most 2 + 2")
    if len(xs) == 1:
        return CompatibilityDecomposition((tuple(ys),))
    if len(ys) == 1:
        return CompatibilityDecomposition(tuple((x,) for x in xs))
    x0, x1 = xs
    y0, y1 = ys
    w = sub(y0, x1)

    def decomposition(t: Vec) -> CompatibilityDecomposition | None:
        z = ((t, sub(x0, t)), (sub(y0, t), sub(t, w)))
        if all(in_lorentz(v) for row in z for v in row):
            return CompatibilityDecomposition(z)
        return None

    # A total on the boundary pins its row/column to multiples of itself, so
    # the free block z_00 = t moves on a line p + s q.
    lines = []
    for total, p, q in (
        (x0, zeros(c.dim), x0),
        (y0, zeros(c.dim), y0),
        (x1, y0, tuple(-v for v in x1)),
        (y1, x0, tuple(-v for v in y1)),
    ):
        if is_zero(total) or on_lorentz_boundary(total):
            lines.append((p, q))
    if lines:
        p, q = lines[0]
        lo, hi = None, None
        # t, x0 - t, y0 - t, t - w must all lie in L
        for a, b in ((p, q), (sub(x0, p), _neg(q)), (sub(y0, p), _neg(q)), (sub(p, w), q)):
            if is_zero(b):
                if not in_lorentz(a):
                    return None
                continue
            iv = line_interval(a, b)
            if iv is None:
                return None
            lo = iv[0] if lo is None or lo < iv[0] else lo
            hi = iv[1] if hi is None or iv[1] < hi else hi
        if lo is None:
            s = Fraction(0)
        else:
            if hi < lo:
                return None
            s = rational_point(lo, hi)
            if s is None:
                return UNKNOWN
        found = decomposition(add(p, tuple(s * v for v in q)))
        assert found is not None
        return found

    # Interior totals: look for a rational interior point numerically, then
    # confirm it exactly.  Failure to find one proves nothing.
    for t in _candidate_points(x0, y0, w):
        found = decomposition(t)
        if found is not None:
            return found
    return UNKNOWN


def _neg(v: Vec) -> Vec:
    return tuple(-x for x in v)


def _candidate_points(x0: Vec, y0: Vec, w: Vec):
    from scipy.optimize import minimize
    import numpy as np

    fx0 = np.array([float(v) for v in x0])
    fy0 = np.array([float(v) for v in y0])
    fw = np.array([float(v) for v in w])

    def slack(v):
        return v[-1] - np.linalg.norm(v[:-1])

    def neg_min_slack(t):
        return -min(slack(t), slack(fx0 - t), slack(fy0 - t), slack(t - fw))

    # cheap exact guesses first: averages of the lower bounds {0, w} and
    # upper bounds {x0, y0} on t
    third = Fraction(1, 3)
    yield tuple(third * v for v in add(add(x0, y0), w))
    for t in (add(x0, w), add(y0, w), x0, y0):
        yield tuple(v / 2 for v in t)
    starts = [(fx0 + fy0 + fw) / 3, fx0 / 2, fy0 / 2, (fx0 + fw) / 2]
    for st in starts:
        res = minimize(neg_min_slack, st, method="Nelder-Mead",
                       options={"xatol": 1e-12, "fatol": 1e-14, "maxiter": 20000})
        if res.fun < 0:
            for den in (10**3, 10**6, 10**9):
                yield tuple(Fraction(float(v)).limit_denominator(den) for v in res.x)


# --- GPT systems -----------------------------------------------------------


@dataclass(frozen=True)
class GptSystem:
    """A cone together with its order unit ``u`` (strictly positive on C)."""

    cone: ConeRep
    unit: Vec

    def __post_init__(self):
        object.__setattr__(self, "unit", vec(self.unit))
        _check_dim(self.cone, self.unit)
        if not is_proper(self.cone):
            raise NotProperError("GPT cone must be proper")
        if not is_strictly_positive(self.unit, self.cone):
            raise ValueError("order unit is not strictly positive on the cone")

    @property
    def dim(self) -> int:
        return self.cone.dim
