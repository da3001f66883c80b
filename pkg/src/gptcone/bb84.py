"""BB84-style key distribution built from an incompatibility witness.

Alice prepares ``rho_0, rho_1`` (coin 0) or ``sigma_+, sigma_-`` (coin 1);
Bob measures ``(f0, f1, u - l)`` or ``(f+, f-, u - l)``.  Rounds with
different coins or the inconclusive outcome ``u - l`` are dropped.  The
zero pairings of the witness make the kept bits agree exactly.

Randomness comes from numpy's counter-based Philox generator keyed by the
seed.  Round ``k`` consumes the four 64-bit words at counter ``k``, so any
chunk of rounds can be generated independently and reproduces the serial
stream.  Every probability comparison is exact: a word ``w`` falls below
probability ``P`` iff ``w < ceil(P * 2**64)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .certify import verify_witness
from .cones import GptSystem, Lorentz, dual_membership, enumerate_extreme_rays
from .errors import GptError, WitnessInvalid
from .linalg import Vec, add, dot, lincomb, scale, sub
from .lorentz import in_lorentz, line_interval
from .sandwich import IncompatibilityWitness

TWO64 = 1 << 64
WORDS_PER_ROUND = 4
DISCARD = 2


@dataclass(frozen=True)
class PreparedEnsembles:
    p0: Fraction
    p1: Fraction
    qp: Fraction
    qm: Fraction
    rho0: Vec
    rho1: Vec
    sigp: Vec
    sigm: Vec
    ell: Vec
    unit: Vec
    eta: Fraction
    f0: Vec
    f1: Vec
    fp: Vec
    fm: Vec
    effect_scale: Fraction = field(compare=False)  # relative to the input f's

    @property
    def measurement_z(self) -> tuple[Vec, Vec, Vec]:
        return self.f0, self.f1, sub(self.unit, self.ell)

    @property
    def measurement_x(self) -> tuple[Vec, Vec, Vec]:
        return self.fp, self.fm, sub(self.unit, self.ell)

    @property
    def mean_state(self) -> Vec:
        return lincomb((self.p0, self.p1), (self.rho0, self.rho1))

    @property
    def kept_probability(self) -> Fraction:
        return self.eta / 2


def _max_effect_scale(f: Vec, sys: GptSystem) -> Fraction:
    """Largest s (or a verified rational just below it) with u - s f in C*."""
    u = sys.unit
    c = sys.cone
    if isinstance(c, Lorentz):
        iv = line_interval(u, tuple(-x for x in f))
        if iv is None:  # pragma: no cover - u is interior
            raise GptError("order unit outside the dual cone")
        hi = iv[1]
        s = hi.rational
        bits = 32
        while s is None or s <= 0 or not in_lorentz(sub(u, scale(s, f))):
            s = hi.bounds(bits)[0]
            bits *= 2
        return s
    best = max(dot(f, g) / dot(u, g) for g in enumerate_extreme_rays(c))
    return 1 / best


def normalize_witness(w: IncompatibilityWitness, sys: GptSystem) -> PreparedEnsembles:
    rep = verify_witness(w, sys.cone, sys.unit)
    if not rep.ok:
        raise WitnessInvalid(", ".join(rep.failed))
    u = sys.unit
    total = dot(u, add(w.x0, w.x1))
    if total <= 0:
        raise WitnessInvalid("u(x0 + x1) must be positive")
    x0, x1, xp, xm = (scale(1 / total, x) for x in w.xs)
    p0, p1, qp, qm = (dot(u, x) for x in (x0, x1, xp, xm))
    s = _max_effect_scale(add(w.f0, w.f1), sys)
    f0, f1, fp, fm = (scale(s, f) for f in w.fs)
    ell = add(f0, f1)
    ens = PreparedEnsembles(
        p0=p0,
        p1=p1,
        qp=qp,
        qm=qm,
        rho0=scale(1 / p0, x0),
        rho1=scale(1 / p1, x1),
        sigp=scale(1 / qp, xp),
        sigm=scale(1 / qm, xm),
        ell=ell,
        unit=u,
        eta=dot(ell, add(x0, x1)),
        f0=f0,
        f1=f1,
        fp=fp,
        fm=fm,
        effect_scale=s,
    )
    _check_ensembles(ens, sys)
    return ens


def _check_ensembles(e: PreparedEnsembles, sys: GptSystem) -> None:
    u = e.unit
    problems = []
    if e.p0 + e.p1 != 1 or e.qp + e.qm != 1:
        problems.append("probabilities")
    if any(dot(u, r) != 1 for r in (e.rho0, e.rho1, e.sigp, e.sigm)):
        problems.append("normalisation")
    if e.mean_state != lincomb((e.qp, e.qm), (e.sigp, e.sigm)):
        problems.append("eve view")
    if not dual_membership(sys.cone, sub(u, e.ell)):
        problems.append("u - l not an effect")
    if e.eta <= 0:
        problems.append("eta")
    if add(e.fp, e.fm) != e.ell:
        problems.append("f+ + f- != l")
    if problems:
        raise WitnessInvalid("ensemble invariants: " + ", ".join(problems))


def eve_probabilities(e: PreparedEnsembles) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """Distribution of Alice's bit given a kept round, per basis."""
    out = (
        e.p0 * dot(e.ell, e.rho0) / e.eta,
        e.p1 * dot(e.ell, e.rho1) / e.eta,
        e.qp * dot(e.ell, e.sigp) / e.eta,
        e.qm * dot(e.ell, e.sigm) / e.eta,
    )
    assert out[0] + out[1] == 1 and out[2] + out[3] == 1
    return out


def h2(p) -> float:
    p = float(p)
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def key_rate(e: PreparedEnsembles) -> float:
    p0, _, qp, _ = eve_probabilities(e)
    return 0.5 * (h2(p0) + h2(qp))


# --- simulation ------------------------------------------------------------


def threshold(p: Fraction) -> int:
    """``ceil(p * 2**64)``: a 64-bit word ``w`` satisfies ``w < t`` iff
    ``w / 2**64 < p``."""
    return -((-p.numerator * TWO64) // p.denominator)


def _below(words: np.ndarray, t: int) -> np.ndarray:
    if t >= TWO64:
        return np.ones(words.shape, dtype=bool)
    return words < np.uint64(t)


def round_words(seed: int, start: int, count: int) -> np.ndarray:
    """Words for rounds ``start .. start+count-1``, shape ``(count, 4)``."""
    if count == 0:
        return np.zeros((0, WORDS_PER_ROUND), dtype=np.uint64)
    gen = np.random.Philox(key=seed, counter=start)
    return gen.random_raw(WORDS_PER_ROUND * count).reshape(count, WORDS_PER_ROUND)


@dataclass(frozen=True)
class ProtocolTranscript:
    """Per-round records as parallel arrays.

    ``bob_outcome`` is 0 or 1 for the two conclusive outcomes and 2 for
    the inconclusive one.
    """

    seed: int
    n: int
    alice_coin: np.ndarray
    alice_bit: np.ndarray
    bob_coin: np.ndarray
    bob_outcome: np.ndarray
    kept: np.ndarray
    tested: np.ndarray  # kept rounds sacrificed for the interference test
    test_fraction: Fraction = Fraction(0)

    @property
    def sifted_alice(self) -> np.ndarray:
        return self.alice_bit[self.kept]

    @property
    def sifted_bob(self) -> np.ndarray:
        return self.bob_outcome[self.kept]

    @property
    def key_alice(self) -> np.ndarray:
        return self.alice_bit[self.kept & ~self.tested]

    @property
    def key_bob(self) -> np.ndarray:
        return self.bob_outcome[self.kept & ~self.tested]

    def rounds(self) -> list[dict]:
        return [
            {
                "alice_coin": int(self.alice_coin[k]),
                "alice_bit": int(self.alice_bit[k]),
                "bob_coin": int(self.bob_coin[k]),
                "bob_outcome": ("first", "second", "discard")[int(self.bob_outcome[k])],
                "kept": bool(self.kept[k]),
            }
            for k in range(self.n)
        ]


def _outcome_table(e: PreparedEnsembles) -> dict[tuple[int, int, int], tuple[int, int]]:
    """Thresholds for (coin_a, bit, coin_b) -> (first, first + second)."""
    states = {(0, 0): e.rho0, (0, 1): e.rho1, (1, 0): e.sigp, (1, 1): e.sigm}
    meas = {0: e.measurement_z, 1: e.measurement_x}
    table = {}
    for (za, bit), st in states.items():
        for zb, effects in meas.items():
            probs = [dot(f, st) for f in effects]
            if sum(probs) != 1 or any(p < 0 for p in probs):
                raise GptError(f"outcome distribution {probs} is not a probability vector")
            table[(za, bit, zb)] = (threshold(probs[0]), threshold(probs[0] + probs[1]))
    return table


def simulate(
    e: PreparedEnsembles,
    sys: GptSystem | None,
    n: int,
    seed: int,
    test_fraction: Fraction | float | int = 0,
    start: int = 0,
) -> ProtocolTranscript:
    """Run rounds ``start .. start+n-1`` of the protocol.

    ``test_fraction`` marks that share of kept rounds (decided by the spare
    low bits of Bob's coin word) as sacrificed for the interference check;
    they stay in the sifted strings but leave the key strings.
    """
    if n < 0:
        raise ValueError("number of rounds must be nonnegative")
    if seed < 0:
        raise ValueError("seed must be nonnegative")
    if sys is not None and len(sys.unit) != len(e.unit):
        raise GptError("ensembles do not belong to this system")
    frac = Fraction(test_fraction)
    if not 0 <= frac <= 1:
        raise ValueError("test fraction must lie in [0, 1]")
    w = round_words(seed, start, n)
    coin_a = (w[:, 0] >> np.uint64(63)).astype(np.uint8)
    coin_b = (w[:, 2] >> np.uint64(63)).astype(np.uint8)
    bit = np.where(
        coin_a == 0,
        ~_below(w[:, 1], threshold(e.p0)),
        ~_below(w[:, 1], threshold(e.qp)),
    ).astype(np.uint8)
    outcome = np.full(n, DISCARD, dtype=np.uint8)
    for (za, b, zb), (t1, t12) in _outcome_table(e).items():
        mask = (coin_a == za) & (bit == b) & (coin_b == zb)
        if not mask.any():
            continue
        w3 = w[mask, 3]
        out = np.full(w3.shape, DISCARD, dtype=np.uint8)
        out[_below(w3, t12)] = 1
        out[_below(w3, t1)] = 0
        outcome[mask] = out
    kept = (coin_a == coin_b) & (outcome != DISCARD)
    low = w[:, 2] & np.uint64((1 << 63) - 1)
    tested = kept & _below(low, threshold(frac / 2)) if frac else np.zeros(n, dtype=bool)
    return ProtocolTranscript(seed, n, coin_a, bit, coin_b, outcome, kept, tested, frac)


# --- statistics ------------------------------------------------------------


@dataclass(frozen=True)
class KeyStats:
    rounds: int
    kept: int
    retained_fraction: float
    expected_retained: Fraction
    retained_sigma: float
    error_count: int
    p0_prime: Fraction
    qp_prime: Fraction
    freq_p0: float
    freq_qp: float
    empirical_H: float
    formula_rate: float
    tested: int
    test_errors: int
    insufficient_data: bool

    @property
    def retained_z(self) -> float:
        """Deviation of the retained count in binomial standard deviations."""
        if self.retained_sigma == 0:
            return 0.0
        return (self.kept - self.rounds * float(self.expected_retained)) / self.retained_sigma


def validate_stats(t: ProtocolTranscript, e: PreparedEnsembles) -> KeyStats:
    p0p, _, qpp, _ = eve_probabilities(e)
    sa, sb = t.sifted_alice, t.sifted_bob
    kept = int(t.kept.sum())
    zs = t.alice_coin[t.kept]
    freqs, weights = [], []
    for z in (0, 1):
        bits = sa[zs == z]
        freqs.append(float(np.mean(bits == 0)) if bits.size else float("nan"))
        weights.append(bits.size / kept if kept else 0.0)
    insufficient = kept == 0 or any(np.isnan(freqs))
    emp_h = float("nan") if insufficient else sum(wt * h2(fr) for wt, fr in zip(weights, freqs))
    pk = e.kept_probability
    sel = t.tested & t.kept
    return KeyStats(
        rounds=t.n,
        kept=kept,
        retained_fraction=kept / t.n if t.n else float("nan"),
        expected_retained=pk,
        retained_sigma=math.sqrt(t.n * float(pk) * (1 - float(pk))),
        error_count=int((sa != sb).sum()),
        p0_prime=p0p,
        qp_prime=qpp,
        freq_p0=freqs[0],
        freq_qp=freqs[1],
        empirical_H=emp_h,
        formula_rate=key_rate(e),
        tested=int(sel.sum()),
        test_errors=int((t.alice_bit[sel] != t.bob_outcome[sel]).sum()),
        insufficient_data=insufficient,
    )
