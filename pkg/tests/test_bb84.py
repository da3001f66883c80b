from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gptcone.bb84 import (
    TWO64,
    _max_effect_scale,
    eve_probabilities,
    h2,
    key_rate,
    normalize_witness,
    round_words,
    simulate,
    threshold,
    validate_stats,
)
from gptcone.cones import GptSystem, Lorentz, dual_membership
from gptcone.errors import WitnessInvalid
from gptcone.linalg import dot, lincomb, sub
from gptcone.lorentz import in_lorentz
from gptcone.sandwich import IncompatibilityWitness, catalog, derive_witness, square_family_sandwich

h = Fraction(1, 2)
CATALOG = ("square", "diamond", "hexagon", "pentagon-rational", "qubit-lorentz")
alphas = st.tuples(*[st.fractions(min_value=-1, max_value=1, max_denominator=40).filter(lambda x: abs(x) < 1)] * 4)


def ensembles(name):
    e = catalog(name)
    return normalize_witness(e.witness, e.system), e.system


def test_square_ensembles():
    e, _ = ensembles("square")
    assert (e.p0, e.p1, e.qp, e.qm) == (h, h, h, h)
    assert e.ell == (0, 0, 1) and e.eta == 1
    assert eve_probabilities(e) == (h, h, h, h)
    assert key_rate(e) == 1.0


def test_qubit_ensembles():
    e, _ = ensembles("qubit-lorentz")
    assert (e.p0, e.p1, e.qp, e.qm) == (h, h, h, h)
    assert e.ell == (0, 0, 0, 1) and e.eta == 1
    assert eve_probabilities(e) == (h, h, h, h)
    assert key_rate(e) == 1.0


@pytest.mark.parametrize("name", CATALOG)
def test_ensemble_invariants(name):
    e, sys = ensembles(name)
    assert e.p0 + e.p1 == 1 and e.qp + e.qm == 1
    assert all(dot(sys.unit, r) == 1 for r in (e.rho0, e.rho1, e.sigp, e.sigm))
    assert lincomb((e.p0, e.p1), (e.rho0, e.rho1)) == lincomb((e.qp, e.qm), (e.sigp, e.sigm))
    assert dual_membership(sys.cone, sub(sys.unit, e.ell))
    assert e.eta > 0
    p = eve_probabilities(e)
    assert all(x > 0 for x in p) and p[0] + p[1] == 1 and p[2] + p[3] == 1


def test_scale_invariance():
    w = catalog("hexagon").witness
    sys = catalog("hexagon").system
    assert normalize_witness(w.rescaled(7), sys) == normalize_witness(w, sys)
    assert normalize_witness(w.rescaled(Fraction(2, 9), 5), sys) == normalize_witness(w, sys)


def test_effect_scale_is_maximal():
    e, sys = ensembles("pentagon-rational")
    # a slightly larger effect would leave the dual cone
    bigger = tuple(Fraction(101, 100) * x for x in e.ell)
    assert not dual_membership(sys.cone, sub(sys.unit, bigger))


def test_invalid_witness_rejected():
    w = catalog("square").witness
    bad = IncompatibilityWitness(w.x0, w.x1, w.xp, w.xm, w.f1, w.f0, w.fp, w.fm)
    with pytest.raises(WitnessInvalid):
        normalize_witness(bad, catalog("square").system)


def test_asymmetric_kite_probabilities():
    sq = catalog("square")
    w = derive_witness(square_family_sandwich((0, 0, 0, h)), sq.system.cone)
    e = normalize_witness(w, sq.system)
    p = eve_probabilities(e)
    assert p[0] != h and p[0] + p[1] == 1 and p[2] + p[3] == 1
    assert 0 < key_rate(e) < 1


@given(alphas)
def test_probabilities_strictly_positive(alpha):
    sq = catalog("square")
    w = derive_witness(square_family_sandwich(alpha), sq.system.cone)
    p = eve_probabilities(normalize_witness(w, sq.system))
    assert all(x > 0 for x in p)
    assert p[0] + p[1] == 1 and p[2] + p[3] == 1


def test_h2():
    assert h2(h) == 1.0
    assert h2(0) == h2(1) == 0.0
    assert math.isclose(h2(Fraction(1, 4)), 0.8112781244591328)
    assert math.isclose(0.5 * (h2(0.25) + h2(0.25)), 0.8113, abs_tol=1e-4)


def test_threshold_is_exact():
    assert threshold(Fraction(0)) == 0
    assert threshold(Fraction(1)) == TWO64
    assert threshold(h) == 1 << 63
    t = threshold(Fraction(1, 3))
    # the smallest word not below 1/3
    assert Fraction(t - 1, TWO64) < Fraction(1, 3) <= Fraction(t, TWO64)


def test_chunks_reproduce_serial_stream():
    serial = round_words(5, 0, 100)
    parts = np.vstack([round_words(5, k, 10) for k in range(0, 100, 10)])
    assert np.array_equal(serial, parts)
    e, sys = ensembles("hexagon")
    whole = simulate(e, sys, 1000, 9)
    a, b = simulate(e, sys, 400, 9), simulate(e, sys, 600, 9, start=400)
    assert np.array_equal(whole.bob_outcome, np.concatenate([a.bob_outcome, b.bob_outcome]))
    assert np.array_equal(whole.kept, np.concatenate([a.kept, b.kept]))


def test_square_run_has_no_errors():
    e, sys = ensembles("square")
    t = simulate(e, sys, 100_000, 42)
    s = validate_stats(t, e)
    assert s.error_count == 0
    assert abs(s.retained_z) < 3
    assert abs(s.empirical_H - 1.0) < 0.02
    assert s.formula_rate == 1.0


def test_determinism():
    e, sys = ensembles("pentagon-rational")
    a, b = simulate(e, sys, 5000, 3), simulate(e, sys, 5000, 3)
    assert all(np.array_equal(getattr(a, k), getattr(b, k)) for k in ("alice_coin", "alice_bit", "bob_coin", "bob_outcome"))
    c = simulate(e, sys, 5000, 4)
    assert not np.array_equal(a.alice_bit, c.alice_bit)


def test_single_round():
    e, sys = ensembles("square")
    t = simulate(e, sys, 1, 0)
    assert t.n == 1 and len(t.rounds()) == 1
    assert len(t.sifted_alice) in (0, 1)
    assert len(t.sifted_alice) == len(t.sifted_bob) == int(t.kept.sum())


def test_empty_run_is_flagged():
    e, sys = ensembles("square")
    s = validate_stats(simulate(e, sys, 0, 0), e)
    assert s.insufficient_data and s.kept == 0


def test_kept_rule():
    e, sys = ensembles("hexagon")
    t = simulate(e, sys, 20_000, 1)
    assert np.array_equal(t.kept, (t.alice_coin == t.bob_coin) & (t.bob_outcome != 2))
    assert (t.bob_outcome == 2).any()


@pytest.mark.parametrize("name", CATALOG)
def test_zero_errors_across_seeds(name):
    e, sys = ensembles(name)
    for seed in range(100):
        t = simulate(e, sys, 10_000, seed)
        assert int((t.sifted_alice != t.sifted_bob).sum()) == 0


@pytest.mark.parametrize("name", CATALOG)
def test_statistics_match_formulas(name):
    e, sys = ensembles(name)
    s = validate_stats(simulate(e, sys, 100_000, 17), e)
    assert abs(s.retained_z) < 3
    assert abs(s.empirical_H - s.formula_rate) < 0.02
    assert abs(s.freq_p0 - float(s.p0_prime)) < 0.02
    assert abs(s.freq_qp - float(s.qp_prime)) < 0.02


def test_interference_test_fraction():
    e, sys = ensembles("square")
    t = simulate(e, sys, 20_000, 2, test_fraction=Fraction(1, 4))
    s = validate_stats(t, e)
    assert 0 < s.tested < s.kept and s.test_errors == 0
    assert abs(s.tested / s.kept - 0.25) < 0.03
    assert len(t.key_alice) == s.kept - s.tested
    none = simulate(e, sys, 20_000, 2)
    assert not none.tested.any()
    with pytest.raises(ValueError):
        simulate(e, sys, 10, 2, test_fraction=2)


def test_lorentz_scale_with_irrational_bound():
    sys = GptSystem(Lorentz(4), (0, 1, 0, 2))
    f = (Fraction(1), Fraction(0), Fraction(0), Fraction(3))
    s = _max_effect_scale(f, sys)
    # the exact bound is (12 - sqrt(48)) / 16
    bound = (12 - math.sqrt(48)) / 16
    assert isinstance(s, Fraction)
    assert in_lorentz(sub(sys.unit, tuple(s * x for x in f)))
    assert 0 < bound - float(s) < 1e-8
