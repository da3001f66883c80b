"""Exact two-phase simplex over the rationals.

Small dense tableau, Dantzig pricing with a permanent switch to Bland's rule
once degenerate pivots pile up (so it always terminates).  Phase I keeps the
artificial columns around long enough to read off a Farkas certificate when
the equality system is infeasible.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .linalg import Vec, dot, rat

_BLAND_AFTER = 50


@dataclass(frozen=True)
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: Vec | None = None
    objective: Fraction | None = None


@dataclass(frozen=True)
class FeasibilityResult:
    """Outcome of ``A x = b, x >= 0``.

    Exactly one of ``x`` and ``farkas`` is set.  A Farkas vector ``y``
    satisfies ``y . A[:, j] >= 0`` for every column and ``y . b < 0``.
    """

    x: Vec | None
    farkas: Vec | None

    @property
    def feasible(self) -> bool:
        return self.x is not None


class _Tableau:
    def __init__(self, rows: list[list[Fraction]], rhs: list[Fraction], basis: list[int]):
        self.rows = rows
        self.rhs = rhs
        self.basis = basis
        self.obj: list[Fraction] = []
        self.obj_val = Fraction(0)
        self.degenerate = 0
        self.bland = False

    def set_objective(self, cost: Sequence[Fraction]) -> None:
        # reduced costs r = c - c_B B^-1 A; current rows already hold B^-1 A
        r = list(cost)
        val = Fraction(0)
        for i, b in enumerate(self.basis):
            cb = cost[b]
            if cb:
                row = self.rows[i]
                for j, a in enumerate(row):
                    if a:
                        r[j] -= cb * a
                val += cb * self.rhs[i]
        self.obj = r
        self.obj_val = val

    def pivot(self, r: int, c: int) -> None:
        prow = self.rows[r]
        inv = 1 / prow[c]
        prow = [a * inv for a in prow]
        self.rows[r] = prow
        self.rhs[r] *= inv
        nz = [j for j, a in enumerate(prow) if a]
        for i, row in enumerate(self.rows):
            if i == r:
                continue
            f = row[c]
            if f:
                for j in nz:
                    row[j] -= f * prow[j]
                self.rhs[i] -= f * self.rhs[r]
        f = self.obj[c]
        if f:
            for j in nz:
                self.obj[j] -= f * prow[j]
            self.obj_val += f * self.rhs[r]
        self.basis[r] = c

    def run(self, allowed: int) -> str:
        """Minimise the current objective over columns ``< allowed``."""
        while True:
            cands = [j for j in range(allowed) if self.obj[j] < 0]
            if not cands:
                return "optimal"
            if self.bland:
                c = cands[0]
            else:
                c = min(cands, key=lambda j: (self.obj[j], j))
            best = None
            for i, row in enumerate(self.rows):
                a = row[c]
                if a > 0:
                    key = (self.rhs[i] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return "unbounded"
            if best[0][0] == 0:
                self.degenerate += 1
                if self.degenerate > _BLAND_AFTER:
                    self.bland = True
            self.pivot(best[1], c)


def _phase_one(a: list[list[Fraction]], b: list[Fraction]) -> tuple[_Tableau, list[int]]:
    m = len(a)
    n = len(a[0]) if m else 0
    signs = []
    rows = []
    rhs = []
    for i in range(m):
        s = -1 if b[i] < 0 else 1
        signs.append(s)
        rows.append([s * x for x in a[i]] + [Fraction(1 if k == i else 0) for k in range(m)])
        rhs.append(s * b[i])
    t = _Tableau(rows, rhs, [n + i for i in range(m)])
    t.set_objective([Fraction(0)] * n + [Fraction(1)] * m)
    t.run(n + m)
    return t, signs


def _drop_artificials(t: _Tableau, n: int) -> None:
    """Pivot zero-level artificials out of the basis; delete redundant rows."""
    i = 0
    while i < len(t.rows):
        if t.basis[i] >= n:
            j = next((j for j in range(n) if t.rows[i][j] != 0), None)
            if j is None:
                del t.rows[i], t.rhs[i], t.basis[i]
                continue
            t.pivot(i, j)
        i += 1
    for row in t.rows:
        del row[n:]
    del t.obj[n:]


def feasible_nonneg(a: Sequence[Sequence], b: Sequence) -> FeasibilityResult:
    """Decide ``a @ x = b, x >= 0`` exactly."""
    am = [[rat(x) for x in row] for row in a]
    bm = [rat(x) for x in b]
    m = len(am)
    if m == 0:
        return FeasibilityResult(x=(), farkas=None)
    n = len(am[0])
    t, signs = _phase_one(am, bm)
    if t.obj_val > 0:
        # r_a = 1 - y_a on artificial columns, so y = 1 - r
        y = [Fraction(1) - t.obj[n + i] for i in range(m)]
        farkas = tuple(-signs[i] * y[i] for i in range(m))
        assert dot(farkas, bm) < 0
        assert all(dot(farkas, [row[j] for row in am]) >= 0 for j in range(n))
        return FeasibilityResult(x=None, farkas=farkas)
    x = [Fraction(0)] * (n + m)
    for i, bi in enumerate(t.basis):
        x[bi] = t.rhs[i]
    sol = tuple(x[:n])
    assert all(dot(row, sol) == bi for row, bi in zip(am, bm))
    return FeasibilityResult(x=sol, farkas=None)


def linprog(
    c: Sequence,
    a_ub: Sequence[Sequence] = (),
    b_ub: Sequence = (),
    a_eq: Sequence[Sequence] = (),
    b_eq: Sequence = (),
    free: Sequence[int] = (),
) -> LPResult:
    """Minimise ``c . x`` subject to ``a_ub x <= b_ub``, ``a_eq x = b_eq``.

    Variables are nonnegative unless listed in ``free``.
    """
    cost = [rat(x) for x in c]
    nv = len(cost)
    free_set = set(free)
    # column map: each free variable splits into (+, -)
    cols: list[tuple[int, int]] = []
    for j in range(nv):
        cols.append((j, 1))
        if j in free_set:
            cols.append((j, -1))
    n_ub = len(a_ub)

    def expand(row: Sequence) -> list[Fraction]:
        r = [rat(x) for x in row]
        return [s * r[j] for j, s in cols]

    rows: list[list[Fraction]] = []
    rhs: list[Fraction] = []
    for i, row in enumerate(a_ub):
        rows.append(expand(row) + [Fraction(1 if k == i else 0) for k in range(n_ub)])
        rhs.append(rat(b_ub[i]))
    for row, bi in zip(a_eq, b_eq, strict=True):
        rows.append(expand(row) + [Fraction(0)] * n_ub)
        rhs.append(rat(bi))
    n = len(cols) + n_ub
    full_cost = [s * cost[j] for j, s in cols] + [Fraction(0)] * n_ub
    if not rows:
        if any(x < 0 for x in full_cost):
            return LPResult("unbounded")
        return LPResult("optimal", x=(Fraction(0),) * nv, objective=Fraction(0))

    t, _ = _phase_one(rows, rhs)
    if t.obj_val > 0:
        return LPResult("infeasible")
    _drop_artificials(t, n)
    t.degenerate = 0
    t.bland = False
    t.set_objective(full_cost)
    status = t.run(n)
    if status == "unbounded":
        return LPResult("unbounded")
    xs = [Fraction(0)] * n
    for i, bi in enumerate(t.basis):
        xs[bi] = t.rhs[i]
    x = [Fraction(0)] * nv
    for k, (j, s) in enumerate(cols):
        x[j] += s * xs[k]
    return LPResult("optimal", x=tuple(x), objective=dot(cost, x))
