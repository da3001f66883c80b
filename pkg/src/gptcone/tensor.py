"""Minimal and maximal tensor products of cones.

An element of ``V1 (x) V2`` is stored as a ``d1 x d2`` matrix in the
row-major product basis: entry ``(i, j)`` multiplies ``e_i (x) e_j``.  A
functional is stored the same way and pairs by the entrywise sum.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .cones import (
    ConeRep,
    GptSystem,
    Lorentz,
    PolyH,
    enumerate_extreme_rays,
    facets,
    membership,
)
from .errors import BudgetExceeded, DimensionMismatch, UnsupportedRepresentation
from .linalg import Mat, Vec, dot, flatten, outer, vec
from .lorentz import in_lorentz
from .lp import feasible_nonneg

DEFAULT_DIM_CAP = 16
DEFAULT_SAMPLES = 10_000


@dataclass(frozen=True)
class TensorElement:
    """Coordinates of a tensor (or bilinear functional) in ``V1 (x) V2``."""

    matrix: Mat

    def __post_init__(self):
        m = tuple(vec(r) for r in self.matrix)
        if not m or any(len(r) != len(m[0]) for r in m):
            raise ValueError("tensor entries must form a nonempty rectangle")
        object.__setattr__(self, "matrix", m)

    @classmethod
    def product(cls, x: Sequence, y: Sequence) -> "TensorElement":
        return cls(outer(vec(x), vec(y)))

    @classmethod
    def from_flat(cls, flat: Sequence, dims: tuple[int, int]) -> "TensorElement":
        d1, d2 = dims
        flat = vec(flat)
        return cls(tuple(flat[i * d2:(i + 1) * d2] for i in range(d1)))

    @property
    def dims(self) -> tuple[int, int]:
        return len(self.matrix), len(self.matrix[0])

    @property
    def flat(self) -> Vec:
        return flatten(self.matrix)

    def pair(self, other: "TensorElement") -> Fraction:
        """Entrywise pairing of a functional with a tensor."""
        if self.dims != other.dims:
            raise DimensionMismatch(f"{self.dims} vs {other.dims}")
        return dot(self.flat, other.flat)

    def apply(self, f: Sequence, g: Sequence) -> Fraction:
        """``(f (x) g)(self)``."""
        return sum((fi * dot(row, g) for fi, row in zip(vec(f), self.matrix)), Fraction(0))

    def left(self, f: Sequence) -> Vec:
        """Contract the first factor with ``f``: the vector ``(f (x) id)(self)``."""
        f = vec(f)
        d2 = self.dims[1]
        return tuple(sum((fi * row[j] for fi, row in zip(f, self.matrix)), Fraction(0)) for j in range(d2))

    def right(self, g: Sequence) -> Vec:
        g = vec(g)
        return tuple(dot(row, g) for row in self.matrix)

    def __add__(self, other: "TensorElement") -> "TensorElement":
        return TensorElement(tuple(tuple(a + b for a, b in zip(r, s)) for r, s in zip(self.matrix, other.matrix)))

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return TensorElement(tuple(tuple(a - b for a, b in zip(r, s)) for r, s in zip(self.matrix, other.matrix)))

    def __neg__(self) -> "TensorElement":
        return TensorElement(tuple(tuple(-a for a in r) for r in self.matrix))

    def __rmul__(self, c) -> "TensorElement":
        c = Fraction(c)
        return TensorElement(tuple(tuple(c * a for a in r) for r in self.matrix))

    def is_zero(self) -> bool:
        return all(a == 0 for r in self.matrix for a in r)


Factor = Union[GptSystem, ConeRep]


def _cone(a: Factor) -> ConeRep:
    return a.cone if isinstance(a, GptSystem) else a


def _check_shape(a: ConeRep, b: ConeRep, w: TensorElement) -> None:
    if w.dims != (a.dim, b.dim):
        raise DimensionMismatch(f"tensor of shape {w.dims} for factors ({a.dim}, {b.dim})")


def product_generators(a: Factor, b: Factor) -> list[Vec]:
    """Flattened ``g (x) h`` over extreme rays ``g`` of A and ``h`` of B."""
    ca, cb = _cone(a), _cone(b)
    for c in (ca, cb):
        if isinstance(c, Lorentz):
            raise UnsupportedRepresentation("explicit min tensor needs polyhedral factors")
    return [flatten(outer(g, h)) for g in enumerate_extreme_rays(ca) for h in enumerate_extreme_rays(cb)]


def min_tensor(a: Factor, b: Factor):
    from .cones import PolyV

    ca, cb = _cone(a), _cone(b)
    return PolyV(ca.dim * cb.dim, product_generators(ca, cb))


@dataclass(frozen=True)
class MinMembershipCertificate:
    """Either nonnegative weights on the product generators (inside) or a
    functional that is >= 0 on every product generator and < 0 on the
    queried tensor (outside)."""

    inside: bool
    generators: tuple[Vec, ...]
    coefficients: tuple[Fraction, ...] | None = None
    functional: TensorElement | None = None
    value: Fraction | None = None

    def check(self, w: TensorElement) -> bool:
        if self.inside:
            n = len(w.flat)
            acc = [Fraction(0)] * n
            for c, g in zip(self.coefficients, self.generators):
                if c < 0:
                    return False
                for k in range(n):
                    acc[k] += c * g[k]
            return tuple(acc) == w.flat
        f = self.functional.flat
        return all(dot(f, g) >= 0 for g in self.generators) and dot(f, w.flat) < 0


def min_membership(a: Factor, b: Factor, w: TensorElement) -> tuple[bool, MinMembershipCertificate]:
    ca, cb = _cone(a), _cone(b)
    _check_shape(ca, cb, w)
    gens = tuple(product_generators(ca, cb))
    res = feasible_nonneg([list(col) for col in zip(*gens)], w.flat)
    if res.feasible:
        return True, MinMembershipCertificate(True, gens, coefficients=res.x)
    phi = TensorElement.from_flat(res.farkas, w.dims)
    return False, MinMembershipCertificate(False, gens, functional=phi, value=phi.pair(w))


def _dual_generators(c: ConeRep) -> list[Vec]:
    if isinstance(c, PolyH):
        return list(c.facets)
    return facets(c)


def max_membership(
    a: Factor,
    b: Factor,
    w: TensorElement,
    samples: int = DEFAULT_SAMPLES,
    seed: int = 0,
) -> bool | None:
    """Is ``w`` in the maximal tensor product?

    Exact when at least one factor is polyhedral.  For two Lorentz factors a
    seeded sample of dual boundary points acts as a falsifier only: a
    violation returns False, otherwise None (inconclusive).
    """
    ca, cb = _cone(a), _cone(b)
    _check_shape(ca, cb, w)
    la, lb = isinstance(ca, Lorentz), isinstance(cb, Lorentz)
    if not la and not lb:
        gb = _dual_generators(cb)
        return all(dot(w.left(f), g) >= 0 for f in _dual_generators(ca) for g in gb)
    if not la:
        # (f (x) id)(w) must lie in C2** = C2 for each dual generator f
        return all(membership(cb, w.left(f)) for f in _dual_generators(ca))
    if not lb:
        return all(membership(ca, w.right(g)) for g in _dual_generators(cb))
    rng = random.Random(seed)
    for _ in range(samples):
        f = lorentz_boundary_sample(ca.dim, rng)
        if not in_lorentz(w.left(f)):
            return False
    return None


def lorentz_boundary_sample(dim: int, rng: random.Random) -> Vec:
    """Rational point ``(s; 1)`` with ``|s| = 1`` exactly.

    A Gaussian direction is pushed through stereographic coordinates rounded
    to rationals; the inverse map lands exactly on the sphere.
    """
    k = dim - 1
    if k == 1:
        return (Fraction(rng.choice((-1, 1))), Fraction(1))
    g = [rng.gauss(0.0, 1.0) for _ in range(k)]
    norm = sum(x * x for x in g) ** 0.5
    s = [x / norm for x in g]
    denom = 1.0 - s[-1]
    if denom < 1e-9:
        return tuple([Fraction(0)] * (k - 1) + [Fraction(1), Fraction(1)])
    t = [Fraction(x / denom).limit_denominator(10**6) for x in s[:-1]]
    t2 = sum(x * x for x in t)
    point = [2 * x / (t2 + 1) for x in t] + [(t2 - 1) / (t2 + 1)]
    return tuple(point) + (Fraction(1),)


@dataclass(frozen=True)
class TensorComparison:
    max_rays: tuple[Vec, ...]
    in_min: tuple[bool, ...]

    @property
    def equal(self) -> bool:
        return all(self.in_min)


def compare_tensors(a: Factor, b: Factor, dim_cap: int = DEFAULT_DIM_CAP) -> TensorComparison:
    """Enumerate the max tensor's extreme rays and test each against min."""
    ca, cb = _cone(a), _cone(b)
    for c in (ca, cb):
        if isinstance(c, Lorentz):
            raise UnsupportedRepresentation("tensor comparison needs polyhedral factors")
    if ca.dim * cb.dim > dim_cap:
        raise BudgetExceeded(f"product dimension {ca.dim * cb.dim} exceeds cap {dim_cap}")
    rays = max_tensor_rays(ca, cb)
    flags = tuple(min_membership(ca, cb, TensorElement.from_flat(r, (ca.dim, cb.dim)))[0] for r in rays)
    return TensorComparison(tuple(rays), flags)


def max_tensor_rays(a: Factor, b: Factor) -> list[Vec]:
    """Extreme rays of ``(A* min B*)*`` by double description."""
    ca, cb = _cone(a), _cone(b)
    fa, fb = facets(ca), facets(cb)
    cone = PolyH(ca.dim * cb.dim, [flatten(outer(f, g)) for f in fa for g in fb])
    return enumerate_extreme_rays(cone)


def tensor_equal(a: Factor, b: Factor, dim_cap: int = DEFAULT_DIM_CAP) -> bool:
    """min tensor == max tensor; stops at the first max ray outside min."""
    ca, cb = _cone(a), _cone(b)
    for c in (ca, cb):
        if isinstance(c, Lorentz):
            raise UnsupportedRepresentation("tensor equality needs polyhedral factors")
    if ca.dim * cb.dim > dim_cap:
        raise BudgetExceeded(f"product dimension {ca.dim * cb.dim} exceeds cap {dim_cap}")
    for r in max_tensor_rays(ca, cb):
        if not min_membership(ca, cb, TensorElement.from_flat(r, (ca.dim, cb.dim)))[0]:
            return False
    return True
