"""Kite/blunt-square sandwiches and the incompatibility witnesses they yield.

A sandwich of a cone C is a kite ``Q_alpha`` with linear maps
``Psi: R^3 -> V`` and ``Phi: V -> R^3`` such that ``Phi Psi = Id``,
``Psi`` sends the cone over the kite into C, and ``Phi`` sends C into the
cone over the blunt square ``[-1, 1]^2`` minus its corners.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from fractions import Fraction
from itertools import combinations
from typing import Sequence

from .cones import (
    ConeRep,
    GptSystem,
    cone_over,
    Lorentz,
    enumerate_extreme_rays,
    is_classical,
    membership,
)
from .errors import DimensionMismatch, GptError, UnsupportedRepresentation
from .linalg import (
    Mat,
    Vec,
    dot,
    identity,
    independent_subset,
    inverse,
    mat,
    matmul,
    matvec,
    nullspace,
    rank,
    scale,
    solve,
    transpose,
    vec,
)
from .lp import linprog


class SandwichError(GptError):
    pass


@dataclass(frozen=True)
class Kite:
    """Quadrilateral with vertices (-1, a0), (1, a1), (am, -1), (ap, 1)."""

    alpha: tuple[Fraction, Fraction, Fraction, Fraction]

    def __post_init__(self):
        a = vec(self.alpha)
        if len(a) != 4:
            raise ValueError("kite needs four parameters")
        if any(abs(x) >= 1 for x in a):
            raise ValueError(f"kite parameters must lie in (-1, 1): {a}")
        object.__setattr__(self, "alpha", a)

    def vertices(self) -> tuple[Vec, Vec, Vec, Vec]:
        a0, a1, am, ap = self.alpha
        one = Fraction(1)
        return (-one, a0), (one, a1), (am, -one), (ap, one)

    def lifted(self) -> tuple[Vec, Vec, Vec, Vec]:
        """Generators of the cone over the kite, in the order 0, 1, -, +."""
        return tuple(v + (Fraction(1),) for v in self.vertices())


@dataclass(frozen=True)
class KiteSandwich:
    psi: Mat  # dim x 3
    phi: Mat  # 3 x dim
    kite: Kite

    def __post_init__(self):
        psi, phi = mat(self.psi), mat(self.phi)
        if any(len(r) != 3 for r in psi) or len(phi) != 3:
            raise DimensionMismatch("psi must be dim x 3 and phi 3 x dim")
        if any(len(r) != len(psi) for r in phi):
            raise DimensionMismatch("phi columns must match psi rows")
        object.__setattr__(self, "psi", psi)
        object.__setattr__(self, "phi", phi)
        if not isinstance(self.kite, Kite):
            object.__setattr__(self, "kite", Kite(self.kite))

    @property
    def dim(self) -> int:
        return len(self.psi)

    def apply_psi(self, v: Sequence) -> Vec:
        return matvec(self.psi, vec(v))

    def apply_phi(self, x: Sequence) -> Vec:
        return matvec(self.phi, vec(x))


@dataclass(frozen=True)
class IncompatibilityWitness:
    """Four vectors of C and four functionals of C* (order 0, 1, +, -)."""

    x0: Vec
    x1: Vec
    xp: Vec
    xm: Vec
    f0: Vec
    f1: Vec
    fp: Vec
    fm: Vec

    def __post_init__(self):
        for name in ("x0", "x1", "xp", "xm", "f0", "f1", "fp", "fm"):
            object.__setattr__(self, name, vec(getattr(self, name)))
        if len({len(getattr(self, n)) for n in ("x0", "x1", "xp", "xm", "f0", "f1", "fp", "fm")}) != 1:
            raise DimensionMismatch("witness vectors must share one dimension")

    @property
    def dim(self) -> int:
        return len(self.x0)

    @property
    def xs(self) -> tuple[Vec, Vec, Vec, Vec]:
        return self.x0, self.x1, self.xp, self.xm

    @property
    def fs(self) -> tuple[Vec, Vec, Vec, Vec]:
        return self.f0, self.f1, self.fp, self.fm

    def swapped(self) -> "IncompatibilityWitness":
        """Exchange the roles of (x0, x1, f0, f1) and (x+, x-, f+, f-)."""
        return IncompatibilityWitness(self.xp, self.xm, self.x0, self.x1, self.fp, self.fm, self.f0, self.f1)

    def rescaled(self, cx=1, cf=1) -> "IncompatibilityWitness":
        return IncompatibilityWitness(*(scale(cx, x) for x in self.xs), *(scale(cf, f) for f in self.fs))


# --- blunt square ----------------------------------------------------------


def blunt_cone_member(v: Sequence) -> bool:
    """Membership in the cone over the unit square minus its corners."""
    x, y, z = vec(v)
    if x == 0 and y == 0 and z == 0:
        return True
    if z <= 0 or abs(x) > z or abs(y) > z:
        return False
    return not (abs(x) == z and abs(y) == z)


@dataclass(frozen=True)
class SandwichReport:
    identity: bool
    kite_inside: bool
    image_in_blunt_cone: bool
    failures: tuple[str, ...] = field(default=())

    @property
    def ok(self) -> bool:
        return self.identity and self.kite_inside and self.image_in_blunt_cone

    def __bool__(self) -> bool:
        return self.ok


def verify_sandwich(s: KiteSandwich, c: ConeRep) -> SandwichReport:
    if isinstance(c, Lorentz):
        raise UnsupportedRepresentation("sandwich verification needs a polyhedral cone")
    if s.dim != c.dim:
        raise DimensionMismatch(f"sandwich of dim {s.dim} against cone of dim {c.dim}")
    failures = []
    ident = matmul(s.phi, s.psi) == identity(3)
    if not ident:
        failures.append("phi o psi != id")
    inside = True
    for name, u in zip(("0", "1", "-", "+"), s.kite.lifted()):
        if not membership(c, s.apply_psi(u)):
            inside = False
            failures.append(f"psi(u_{name}) not in C")
    blunt = True
    for g in enumerate_extreme_rays(c):
        img = s.apply_phi(g)
        if all(v == 0 for v in img) or not blunt_cone_member(img):
            blunt = False
            failures.append(f"phi{tuple(str(v) for v in g)} = {tuple(str(v) for v in img)} outside blunt cone")
    return SandwichReport(ident, inside, blunt, tuple(failures))


# --- witnesses from sandwiches ---------------------------------------------


def solve_lambda(k: Kite) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Positive weights with l0 u0 + l1 u1 = lm um + lp up and l0 + l1 = 1."""
    u0, u1, um, up = k.lifted()
    # unknowns (l0, lm, lp) after substituting l1 = 1 - l0:
    # l0 (u0 - u1) - lm um - lp up = -u1
    a = [[u0[r] - u1[r], -um[r], -up[r]] for r in range(3)]
    b = [-u1[r] for r in range(3)]
    try:
        l0, lm, lp = solve(a, b)
    except ZeroDivisionError as exc:  # pragma: no cover - excluded by |alpha| < 1
        raise SandwichError("degenerate kite") from exc
    lam = (l0, 1 - l0, lm, lp)
    if any(x <= 0 for x in lam):  # pragma: no cover
        raise SandwichError(f"non-positive diagonal weights {lam}")
    return lam


# T_i on R^3 as coefficient vectors, order 0, 1, +, -
_T = {
    "0": (Fraction(-1), Fraction(0), Fraction(1)),
    "1": (Fraction(1), Fraction(0), Fraction(1)),
    "+": (Fraction(0), Fraction(1), Fraction(1)),
    "-": (Fraction(0), Fraction(-1), Fraction(1)),
}


def derive_witness(s: KiteSandwich, c: ConeRep) -> IncompatibilityWitness:
    report = verify_sandwich(s, c)
    if not report.ok:
        raise SandwichError("; ".join(report.failures))
    l0, l1, lm, lp = solve_lambda(s.kite)
    u0, u1, um, up = s.kite.lifted()
    xs = {
        "0": scale(l0, s.apply_psi(u0)),
        "1": scale(l1, s.apply_psi(u1)),
        "+": scale(lp, s.apply_psi(up)),
        "-": scale(lm, s.apply_psi(um)),
    }
    # f_i = T_i o Phi, i.e. the row combination T_i^T Phi
    phit = transpose(s.phi)
    fs = {k: matvec(phit, t) for k, t in _T.items()}
    return IncompatibilityWitness(
        xs["0"], xs["1"], xs["+"], xs["-"], fs["0"], fs["1"], fs["+"], fs["-"]
    )


# --- explicit constructions ------------------------------------------------

SQUARE_CORNERS = ((-1, 1), (1, -1), (-1, -1), (1, 1))  # images of u0, u1, u-, u+


def square_family_sandwich(alpha: Sequence) -> KiteSandwich:
    """Sandwich of the square cone whose Phi maps the square onto the kite.

    Psi sends the lifted kite vertex u_i to c_i / (2 lambda_i), c_i the
    square corner opposite-paired like the kite diagonals, so the derived
    vectors x_i are the same four half-corners for every alpha.
    """
    k = Kite(tuple(alpha))
    lam = solve_lambda(k)
    lifted = k.lifted()
    targets = [
        scale(Fraction(1, 2) / l, tuple(Fraction(v) for v in corner) + (Fraction(1),))
        for l, corner in zip(lam, SQUARE_CORNERS)
    ]
    # Psi U = T on the basis (u0, u1, u+); the fourth follows by linearity
    cols = [0, 1, 3]
    u_mat = transpose([lifted[i] for i in cols])
    t_mat = transpose([targets[i] for i in cols])
    psi = matmul(t_mat, inverse(u_mat))
    return KiteSandwich(psi, inverse(psi), k)


# --- heuristic search ------------------------------------------------------


@dataclass(frozen=True)
class SearchResult:
    status: str  # "found" | "classical" | "exhausted"
    sandwich: KiteSandwich | None = None
    tried: int = 0


def _positive_relation(a0: Vec, a1: Vec, am: Vec, ap: Vec):
    """Weights l > 0 with l0 a0 + l1 a1 = lm am + lp ap spanning rank 3."""
    vs = [a0, a1, am, ap]
    if rank(vs) != 3:
        return None
    cols = transpose([a0, a1, tuple(-x for x in am), tuple(-x for x in ap)])
    ns = nullspace(cols, 4)
    if len(ns) != 1:
        return None
    w = ns[0]
    if all(x < 0 for x in w):
        w = tuple(-x for x in w)
    if all(x > 0 for x in w):
        return w
    return None


def sandwich_candidates(rays: Sequence[Vec]) -> list[tuple[int, int, int, int]]:
    """Index tuples (i0, i1, i-, i+) whose two 'diagonals' cross."""
    out = []
    n = len(rays)
    for quad in combinations(range(n), 4):
        a, b, c, d = quad
        for (i0, i1), (im, ip) in (((a, b), (c, d)), ((a, c), (b, d)), ((a, d), (b, c))):
            if _positive_relation(rays[i0], rays[i1], rays[im], rays[ip]) is not None:
                out.append((i0, i1, im, ip))
    return out


def _phi_lp(rays: Sequence[Vec], quad: tuple[int, int, int, int]):
    """Maximise the least blunt-square slack over Phi with the kite pinned."""
    d = len(rays[0])
    nv = 3 * d + 1
    s_col = 3 * d

    def form(cp: int, cq: int, cr: int, g: Vec) -> list[Fraction]:
        # cp P(g) + cq Q(g) + cr R(g) as a row over [P | Q | R | s]
        row = [Fraction(0)] * nv
        for k in range(d):
            row[k] = cp * g[k]
            row[d + k] = cq * g[k]
            row[2 * d + k] = cr * g[k]
        return row

    a_ub, b_ub = [], []

    def geq(row: list[Fraction], s_coef: int = 0) -> None:
        # row . x - s_coef * s >= 0  ->  -row . x + s_coef * s <= 0
        r = [-x for x in row]
        r[s_col] += s_coef
        a_ub.append(r)
        b_ub.append(Fraction(0))

    for g in rays:
        geq(form(-1, 0, 1, g))
        geq(form(1, 0, 1, g))
        geq(form(0, -1, 1, g))
        geq(form(0, 1, 1, g))
        for sp in (-1, 1):
            for sq in (-1, 1):
                geq(form(sp, sq, 2, g), 1)
    i0, i1, im, ip = (rays[i] for i in quad)
    a_eq = [form(1, 0, 1, i0), form(1, 0, -1, i1), form(0, 1, 1, im), form(0, 1, -1, ip)]
    b_eq = [Fraction(0)] * 4
    for g, (cp, cq) in ((i0, (0, 1)), (i1, (0, 1)), (im, (1, 0)), (ip, (1, 0))):
        geq(form(-cp, -cq, 1, g), 1)
        geq(form(cp, cq, 1, g), 1)
    cap = [Fraction(0)] * nv
    cap[s_col] = Fraction(1)
    a_ub.append(cap)
    b_ub.append(Fraction(1))
    cost = [Fraction(0)] * nv
    cost[s_col] = Fraction(-1)
    res = linprog(cost, a_ub, b_ub, a_eq, b_eq, free=range(3 * d))
    if res.status != "optimal" or res.x[s_col] <= 0:
        return None
    x = res.x
    return (x[:d], x[d:2 * d], x[2 * d:3 * d])


def _assemble(rays: Sequence[Vec], quad, rows) -> KiteSandwich:
    p, q, r = rows
    phi = (p, q, r)
    a0, a1, am, ap = (rays[i] for i in quad)
    alpha = (
        dot(q, a0) / dot(r, a0),
        dot(q, a1) / dot(r, a1),
        dot(p, am) / dot(r, am),
        dot(p, ap) / dot(r, ap),
    )
    quad_vecs = [a0, a1, am, ap]
    basis = [quad_vecs[i] for i in independent_subset(quad_vecs)]
    b = transpose(basis)  # dim x 3
    psi = matmul(b, inverse(matmul(phi, b)))
    return KiteSandwich(psi, phi, Kite(alpha))


def search_sandwich(c: ConeRep, budget: int = 1000, seed: int = 0) -> SearchResult:
    """Heuristic sandwich search over 4-tuples of extreme rays.

    The candidate list is fixed up front and shuffled by ``seed``; each
    candidate costs one exact LP.  An ``"exhausted"`` result says nothing
    about classicality.
    """
    if isinstance(c, Lorentz):
        raise UnsupportedRepresentation("sandwich search needs a polyhedral cone")
    if is_classical(c):
        return SearchResult("classical")
    rays = enumerate_extreme_rays(c)
    cands = sandwich_candidates(rays)
    random.Random(seed).shuffle(cands)
    tried = 0
    for quad in cands[:budget]:
        tried += 1
        rows = _phi_lp(rays, quad)
        if rows is None:
            continue
        s = _assemble(rays, quad, rows)
        if verify_sandwich(s, c).ok:
            return SearchResult("found", s, tried)
    return SearchResult("exhausted", None, tried)


# --- catalog ---------------------------------------------------------------

CATALOG_NAMES = ("triangle", "square", "diamond", "hexagon", "pentagon-rational", "qubit-lorentz")

_POLYGONS = {
    "triangle": ((0, 0), (1, 0), (0, 1)),
    "square": ((-1, -1), (1, -1), (1, 1), (-1, 1)),
    "diamond": ((1, 0), (0, 1), (-1, 0), (0, -1)),
    "hexagon": ((1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)),
    "pentagon-rational": ((-1, -1), (1, -1), (2, 1), (0, 2), (-2, 1)),
}


@dataclass(frozen=True)
class CatalogEntry:
    name: str
    system: GptSystem
    sandwich: KiteSandwich | None
    witness: IncompatibilityWitness | None


def _qubit_witness() -> IncompatibilityWitness:
    h = Fraction(1, 2)
    x0, x1 = (0, 0, h, h), (0, 0, -h, h)
    xp, xm = (h, 0, 0, h), (-h, 0, 0, h)
    return IncompatibilityWitness(x0, x1, xp, xm, x0, x1, xp, xm)


@lru_cache(maxsize=None)
def catalog(name: str) -> CatalogEntry:
    if name == "qubit-lorentz":
        system = GptSystem(Lorentz(4), (0, 0, 0, 1))
        return CatalogEntry(name, system, None, _qubit_witness())
    if name not in _POLYGONS:
        raise KeyError(f"unknown catalog entry {name!r}; choose from {', '.join(CATALOG_NAMES)}")
    cone = cone_over(_POLYGONS[name])
    system = GptSystem(cone, (0, 0, 1))
    if name == "triangle":
        return CatalogEntry(name, system, None, None)
    if name == "square":
        s = square_family_sandwich((0, 0, 0, 0))
    elif name == "diamond":
        s = KiteSandwich(identity(3), identity(3), Kite((0, 0, 0, 0)))
    else:
        res = search_sandwich(cone, budget=1000, seed=0)
        if res.sandwich is None:  # pragma: no cover
            raise SandwichError(f"no sandwich found for {name}")
        s = res.sandwich
    return CatalogEntry(name, system, s, derive_witness(s, cone))
