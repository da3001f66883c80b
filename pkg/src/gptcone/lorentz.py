"""Exact helpers for the Lorentz cone ``x_d >= sqrt(x_1^2 + ... + x_{d-1}^2)``.

Along a line ``p + s q`` the Lorentz constraint cuts out an interval whose
endpoints are roots of a rational quadratic.  Those endpoints are kept as
exact surds ``a + b*sqrt(D)`` and compared without any floating point.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import isqrt
from typing import Sequence

from .linalg import Vec


def minkowski(a: Sequence[Fraction], b: Sequence[Fraction]) -> Fraction:
    """Lorentz bilinear form: a_d b_d - sum_{i<d} a_i b_i."""
    return a[-1] * b[-1] - sum((x * y for x, y in zip(a[:-1], b[:-1])), Fraction(0))


def in_lorentz(x: Sequence[Fraction]) -> bool:
    return x[-1] >= 0 and minkowski(x, x) >= 0


def in_lorentz_interior(x: Sequence[Fraction]) -> bool:
    return x[-1] > 0 and minkowski(x, x) > 0


def on_lorentz_boundary(x: Sequence[Fraction]) -> bool:
    """Nonzero point generating an extreme ray."""
    return x[-1] > 0 and minkowski(x, x) == 0


def _sign(x) -> int:
    return (x > 0) - (x < 0)


def _sign_surd(a: Fraction, b: Fraction, d: Fraction) -> int:
    """sign(a + b*sqrt(d)) for d >= 0."""
    sa, sb = _sign(a), _sign(b) if d else 0
    if sb == 0:
        return sa
    if sa == 0 or sa == sb:
        return sb
    # opposite signs: compare a^2 with b^2 d
    return sa * _sign(a * a - b * b * d)


def _sign_two_surds(a, b, d, c, e) -> int:
    """sign(a + b*sqrt(d) + c*sqrt(e))."""
    su = _sign_surd(a, b, d)
    sc = _sign(c) if e else 0
    if sc == 0:
        return su
    if su == 0 or su == sc:
        return sc
    # u^2 - c^2 e = (a^2 + b^2 d - c^2 e) + 2ab sqrt(d)
    return su * _sign_surd(a * a + b * b * d - c * c * e, 2 * a * b, d)


@dataclass(frozen=True)
class Surd:
    """Exact real ``a + b*sqrt(d)``; ``inf`` marks +/- infinity."""

    a: Fraction
    b: Fraction = Fraction(0)
    d: Fraction = Fraction(0)
    inf: int = 0

    def cmp(self, other: "Surd") -> int:
        if self.inf or other.inf:
            return _sign(self.inf - other.inf) if self.inf != other.inf else 0
        return _sign_two_surds(self.a - other.a, self.b, self.d, -other.b, other.d)

    def __lt__(self, other: "Surd") -> bool:
        return self.cmp(other) < 0

    def __le__(self, other: "Surd") -> bool:
        return self.cmp(other) <= 0

    @property
    def rational(self) -> Fraction | None:
        if self.inf:
            return None
        if self.b == 0 or self.d == 0:
            return self.a
        r = _rational_sqrt(self.d)
        return None if r is None else self.a + self.b * r

    def bounds(self, bits: int) -> tuple[Fraction, Fraction]:
        """Rational enclosure with width about 2**-bits."""
        if self.b == 0 or self.d == 0:
            return self.a, self.a
        lo, hi = _sqrt_bounds(self.d, bits)
        x, y = self.a + self.b * lo, self.a + self.b * hi
        return (x, y) if x <= y else (y, x)


NEG_INF = Surd(Fraction(0), inf=-1)
POS_INF = Surd(Fraction(0), inf=1)


def _rational_sqrt(d: Fraction) -> Fraction | None:
    n, m = d.numerator, d.denominator
    rn, rm = isqrt(n), isqrt(m)
    if rn * rn == n and rm * rm == m:
        return Fraction(rn, rm)
    return None


def _sqrt_bounds(d: Fraction, bits: int) -> tuple[Fraction, Fraction]:
    scale = 1 << bits
    # floor(sqrt(d) * scale) via integer sqrt of d * scale^2
    n = d.numerator * scale * scale
    q = isqrt(n // d.denominator)
    return Fraction(q, scale), Fraction(q + 2, scale)


def line_interval(p: Vec, q: Vec) -> tuple[Surd, Surd] | None:
    """The set ``{s : p + s q in L}`` as a closed interval, or None if empty."""
    # linear part: p_d + s q_d >= 0
    lo, hi = NEG_INF, POS_INF
    if q[-1] > 0:
        lo = Surd(-p[-1] / q[-1])
    elif q[-1] < 0:
        hi = Surd(-p[-1] / q[-1])
    elif p[-1] < 0:
        return None
    # quadratic part: A s^2 + B s + C >= 0
    qa, qb, qc = minkowski(q, q), 2 * minkowski(p, q), minkowski(p, p)
    pieces: list[tuple[Surd, Surd]]
    if qa == 0:
        if qb == 0:
            pieces = [(NEG_INF, POS_INF)] if qc >= 0 else []
        elif qb > 0:
            pieces = [(Surd(-qc / qb), POS_INF)]
        else:
            pieces = [(NEG_INF, Surd(-qc / qb))]
    else:
        disc = qb * qb - 4 * qa * qc
        if disc < 0:
            pieces = [(NEG_INF, POS_INF)] if qa > 0 else []
        else:
            r1 = Surd(-qb / (2 * qa), -1 / (2 * qa), disc)
            r2 = Surd(-qb / (2 * qa), 1 / (2 * qa), disc)
            if r2 < r1:
                r1, r2 = r2, r1
            pieces = [(NEG_INF, r1), (r2, POS_INF)] if qa > 0 else [(r1, r2)]
    hits = []
    for a, b in pieces:
        x = a if lo < a else lo
        y = b if b < hi else hi
        if x <= y:
            hits.append((x, y))
    if not hits:
        return None
    # membership in a convex cone along a line is convex, so one piece remains
    # (two touching pieces can only meet at a shared endpoint)
    x = min((h[0] for h in hits), key=_Key)
    y = max((h[1] for h in hits), key=_Key)
    return x, y


class _Key:
    def __init__(self, s: Surd):
        self.s = s

    def __lt__(self, other: "_Key") -> bool:
        return self.s < other.s


def rational_point(lo: Surd, hi: Surd) -> Fraction | None:
    """A rational number in ``[lo, hi]``, or None if the interval is an
    irrational point."""
    c = lo.cmp(hi)
    if c > 0:
        return None
    if c == 0:
        return lo.rational
    if lo.inf and hi.inf:
        return Fraction(0)
    if lo.inf:
        return hi.bounds(8)[0] - 1
    if hi.inf:
        return lo.bounds(8)[1] + 1
    for lo_r in (lo.rational, hi.rational):
        if lo_r is not None:
            return lo_r
    bits = 8
    while True:
        _, a = lo.bounds(bits)
        b, _ = hi.bounds(bits)
        if a <= b:
            return (a + b) / 2
        bits *= 2
