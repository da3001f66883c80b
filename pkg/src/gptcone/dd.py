"""Double description: extreme rays of a pointed cone ``{x : A x >= 0}``.

Works on primitive integer vectors throughout; every new ray is an integer
combination of two old ones followed by a gcd reduction.  Adjacency is the
combinatorial test on zero sets, with zero sets kept as int bitmasks.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd
from typing import Sequence

from .linalg import independent_subset, inverse, primitive


class NotPointedError(ValueError):
    """The constraint system has a nontrivial lineality space."""


def _idot(a: Sequence[int], b: Sequence[int]) -> int:
    return sum(x * y for x, y in zip(a, b))


def _reduce(v: list[int]) -> tuple[int, ...]:
    g = 0
    for k in v:
        g = gcd(g, k)
    if g > 1:
        return tuple(k // g for k in v)
    return tuple(v)


def extreme_rays(constraints: Sequence[Sequence], dim: int) -> list[tuple[int, ...]]:
    """Primitive integer generators of the extreme rays of ``{x : a.x >= 0}``.

    Constraints are processed in order of decreasing absolute coordinate sum
    (ties keep input order).  Raises :class:`NotPointedError` when the
    constraints do not have full rank.
    """
    rows = [primitive(a) for a in constraints]
    rows = [r for r in rows if any(r)]
    if len(rows) == 0 or len(rows[0]) != dim:
        if rows:
            raise ValueError("constraint dimension mismatch")
        raise NotPointedError("no constraints")
    order = sorted(range(len(rows)), key=lambda i: -sum(abs(x) for x in rows[i]))
    rows = [rows[i] for i in order]

    basis_idx = independent_subset(rows)
    if len(basis_idx) < dim:
        raise NotPointedError(f"constraints have rank {len(basis_idx)} < {dim}")
    binv = inverse([rows[i] for i in basis_idx])
    rays: list[tuple[int, ...]] = []
    zsets: list[int] = []
    full = 0
    for i in basis_idx:
        full |= 1 << i
    for j in range(dim):
        col = [binv[k][j] for k in range(dim)]
        rays.append(primitive(col))
        zsets.append(full & ~(1 << basis_idx[j]))

    in_basis = set(basis_idx)
    for k, a in enumerate(rows):
        if k in in_basis:
            continue
        vals = [_idot(a, r) for r in rays]
        plus = [i for i, v in enumerate(vals) if v > 0]
        minus = [i for i, v in enumerate(vals) if v < 0]
        bit = 1 << k
        if not minus:
            for i, v in enumerate(vals):
                if v == 0:
                    zsets[i] |= bit
            continue
        new_rays: list[tuple[int, ...]] = []
        new_z: list[int] = []
        need = dim - 2
        nrays = len(rays)
        for p in plus:
            zp = zsets[p]
            for n in minus:
                common = zp & zsets[n]
                if common.bit_count() < need:
                    continue
                adjacent = True
                for r in range(nrays):
                    if r != p and r != n and zsets[r] & common == common:
                        adjacent = False
                        break
                if not adjacent:
                    continue
                vp, vn = vals[p], vals[n]
                comb = [vp * y - vn * x for x, y in zip(rays[p], rays[n])]
                new_rays.append(_reduce(comb))
                new_z.append(common | bit)
        kept_rays = []
        kept_z = []
        for i, v in enumerate(vals):
            if v > 0:
                kept_rays.append(rays[i])
                kept_z.append(zsets[i])
            elif v == 0:
                kept_rays.append(rays[i])
                kept_z.append(zsets[i] | bit)
        rays = kept_rays + new_rays
        zsets = kept_z + new_z
    return rays


def as_fraction_rays(rays: Sequence[Sequence[int]]) -> list[tuple[Fraction, ...]]:
    return [tuple(Fraction(x) for x in r) for r in rays]
