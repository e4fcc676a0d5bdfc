import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_score_set
from zebra_eval.calibration import pav_calibrate
from zebra_eval.metrics import (
    Prior,
    categorical_tag,
    cllr,
    d_ece_closed_form,
    d_ece_numeric,
    ece,
    ece_at_log_odds,
    eer,
    perfect_privacy_at_log_odds,
    perfect_privacy_ece,
    worst_case_llr,
    z_kernel,
    zebra,
)
from zebra_eval.types import (
    MAX_D_ECE,
    CalibratedLLRs,
    MiscalibratedInput,
    NegativeMagnitude,
    ScoreSet,
    ZebraError,
)

mp.mp.dps = 40


# ---- independent oracles -------------------------------------------------

def ece_oracle(lr_a, lr_b, pi):
    """ECE straight from the likelihood-ratio definition, in 40-digit arithmetic."""
    pi = mp.mpf(pi)
    ta = sum(mp.log(1 + (1 - pi) / (mp.mpf(a) * pi), 2) for a in lr_a) / len(lr_a)
    tb = sum(mp.log(1 + mp.mpf(b) * pi / (1 - pi), 2) for b in lr_b) / len(lr_b)
    return pi * ta + (1 - pi) * tb


def d_ece_oracle(lr_a, lr_b):
    """Adaptive mpmath quadrature of the ECE gap over the prior."""
    def gap(pi):
        if pi <= 0 or pi >= 1:
            return mp.mpf(0)
        h = -pi * mp.log(pi, 2) - (1 - pi) * mp.log(1 - pi, 2)
        return h - ece_oracle(lr_a, lr_b, pi)
    return mp.quad(gap, [0, mp.mpf("1e-6"), mp.mpf("0.01"), 0.5, 0.99, 1 - mp.mpf("1e-6"), 1])


def z_oracle(x):
    x = mp.mpf(x)
    return ((x - 3) * (x - 1) + 2 * mp.log(x)) / (4 * (x - 1) ** 2)


def eer_oracle(mated, nonmated):
    """Sweep every threshold, take the lower convex hull of (p_fa, p_miss), cross the diagonal."""
    mated = np.asarray(mated, float)
    nonmated = np.asarray(nonmated, float)
    thresholds = np.concatenate([np.unique(np.concatenate([mated, nonmated])), [np.inf]])
    pts = sorted({(float(np.mean(nonmated >= t)), float(np.mean(mated < t))) for t in thresholds})
    hull = []
    for p in pts:
        while len(hull) >= 2:
            (x1, y1), (x2, y2) = hull[-2], hull[-1]
            if (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1) <= 0:
                hull.pop()
            else:
                break
        hull.append(p)
    for (x1, y1), (x2, y2) in zip(hull, hull[1:]):
        d1, d2 = y1 - x1, y2 - x2
        if d1 >= 0 >= d2:
            if d1 == d2:
                return x1
            w = d1 / (d1 - d2)
            return x1 + w * (x2 - x1)
    raise AssertionError("hull does not cross the diagonal")


# ---- ECE -----------------------------------------------------------------

def test_ece_flat_lrs(backend):
    cal = CalibratedLLRs([0.0, 0.0], [0.0])
    assert ece(cal, 0.5) == 1.0


def test_ece_example(backend):
    cal = CalibratedLLRs.from_lrs([10.0], [0.1])
    expected = float(ece_oracle([10], [mp.mpf("0.1")], 0.5))
    assert expected == pytest.approx(math.log2(1.1), abs=1e-15)
    assert ece(cal, 0.5) == pytest.approx(expected, abs=1e-15)
    assert ece(cal, 0.5) == pytest.approx(0.13750, abs=5e-6)


def test_ece_separated(backend):
    cal = CalibratedLLRs.from_lrs([1e9], [1e-9])
    assert ece(cal, 0.5) < 1e-8


def test_ece_against_oracle(backend, rng):
    for _ in range(20):
        a = rng.normal(1, 2, 7)
        b = rng.normal(-1, 2, 5)
        pi = rng.uniform(0.01, 0.99)
        cal = CalibratedLLRs(a, b)
        want = ece_oracle([mp.e ** mp.mpf(v) for v in a], [mp.e ** mp.mpf(v) for v in b], pi)
        assert ece(cal, Prior(pi)) == pytest.approx(float(want), rel=1e-13)


def test_ece_huge_llrs_stay_finite(backend):
    cal = CalibratedLLRs([800.0, -800.0], [800.0])
    v = ece(cal, 0.5)
    assert math.isfinite(v) and v > 0


def test_ece_proposition_symmetry(rng):
    for _ in range(50):
        a = rng.normal(1, 2, 9)
        b = rng.normal(-1, 2, 4)
        pi = rng.uniform(0.001, 0.999)
        lhs = ece(CalibratedLLRs(a, b), pi)
        rhs = ece(CalibratedLLRs(-b, -a), 1.0 - pi)
        assert lhs == pytest.approx(rhs, rel=1e-12, abs=1e-15)


def test_prior_validation():
    for bad in (0.0, 1.0, -0.1, 1.5):
        with pytest.raises(ZebraError):
            Prior(bad)


# ---- perfect privacy -----------------------------------------------------

def test_perfect_privacy_half():
    assert perfect_privacy_ece(0.5) == 1.0


def test_perfect_privacy_point_nine():
    want = float(-(mp.mpf("0.9") * mp.log(mp.mpf("0.9"), 2) + mp.mpf("0.1") * mp.log(mp.mpf("0.1"), 2)))
    assert perfect_privacy_ece(0.9) == pytest.approx(want, abs=1e-15)
    assert perfect_privacy_ece(0.9) == pytest.approx(0.4690, abs=5e-5)


def test_perfect_privacy_limits():
    assert perfect_privacy_ece(1e-12) < 1e-10
    assert perfect_privacy_ece(1 - 1e-12) < 1e-10


def test_perfect_privacy_vector_matches_scalar():
    t = np.linspace(-10, 10, 41)
    vec = perfect_privacy_at_log_odds(t)
    for ti, v in zip(t, vec):
        assert v == pytest.approx(perfect_privacy_ece(1 / (1 + math.exp(-ti))), abs=1e-14)


def test_zero_evidence_ece_equals_perfect_privacy(backend):
    t = np.linspace(-9, 9, 37)
    cal = CalibratedLLRs(np.zeros(3), np.zeros(2))
    np.testing.assert_allclose(ece_at_log_odds(cal, t), perfect_privacy_at_log_odds(t), rtol=0, atol=1e-15)


# ---- Z kernel and D_ECE --------------------------------------------------

def test_z_at_one_is_exactly_zero(backend):
    assert z_kernel(0.0) == 0.0


@pytest.mark.parametrize("x", [10.0, 1e3, 1e6, 1e9])
def test_z_approaches_quarter(backend, x):
    assert z_kernel(math.log(x)) == pytest.approx(float(z_oracle(x)), abs=1e-15)


def test_z_monotone_towards_quarter(backend):
    zs = [z_kernel(math.log(x)) for x in (10.0, 1e3, 1e6, 1e9)]
    assert all(a < b < 0.25 for a, b in zip(zs, zs[1:]))
    assert 0.25 - zs[-1] < 1e-8
    assert z_kernel(1e6) == 0.25


@pytest.mark.parametrize("e", [1e-3, -1e-3, 9.99e-4, -9.99e-4, 1e-7, 0.5, -0.5, 5.0])
def test_z_series_and_formula(backend, e):
    x = mp.mpf(1) + mp.mpf(e)
    assert z_kernel(float(mp.log(x))) == pytest.approx(float(z_oracle(x)), abs=1e-12)


def test_z_series_switchover_error():
    # the cubic series alone, at the switch point, against exact Z
    for e in (1e-3, -1e-3):
        series = e / 6 - e**2 / 8 + e**3 / 10
        assert abs(series - float(z_oracle(1 + mp.mpf(e)))) < 1e-12


def test_z_small_lr(backend):
    for x in (1e-3, 1e-30, 1e-300):
        assert z_kernel(math.log(x)) == pytest.approx(float(z_oracle(x)), rel=1e-13)
    assert math.isfinite(z_kernel(-1000.0))


def test_d_ece_zero_evidence(backend):
    cal = CalibratedLLRs(np.zeros(4), np.zeros(3))
    assert d_ece_closed_form(cal) == 0.0
    assert d_ece_numeric(cal, 64) == 0.0
    assert d_ece_numeric(cal) == 0.0


def test_d_ece_example(backend):
    cal = CalibratedLLRs.from_lrs([10.0], [0.1])
    want = float(2 * z_oracle(10) / mp.log(2))
    assert d_ece_closed_form(cal) == pytest.approx(want, abs=1e-14)
    assert d_ece_closed_form(cal) == pytest.approx(0.60206, abs=5e-6)
    assert abs(d_ece_numeric(cal, 10_000) - d_ece_closed_form(cal)) < 1e-6
    assert float(d_ece_oracle([10], [mp.mpf("0.1")])) == pytest.approx(want, abs=1e-12)


def test_d_ece_full_separation(backend):
    cal = CalibratedLLRs.from_lrs([1e9], [1e-9])
    assert abs(d_ece_closed_form(cal) - 1 / (2 * math.log(2))) < 1e-6
    assert abs(d_ece_numeric(cal) - d_ece_closed_form(cal)) < 1e-6


def test_d_ece_against_mp_quadrature(backend, rng):
    for _ in range(3):
        a = rng.normal(1.5, 1.5, 6)
        b = rng.normal(-1.5, 1.5, 4)
        want = d_ece_oracle([mp.e ** mp.mpf(v) for v in a], [mp.e ** mp.mpf(v) for v in b])
        assert d_ece_closed_form(CalibratedLLRs(a, b)) == pytest.approx(float(want), abs=1e-10)


def test_d_ece_numeric_needs_points():
    with pytest.raises(ZebraError):
        d_ece_numeric(CalibratedLLRs([0.0], [0.0]), 10)


def test_d_ece_flags_miscalibration():
    cal = CalibratedLLRs([-3.0], [3.0])  # evidence pointing the wrong way
    with pytest.warns(MiscalibratedInput):
        d = d_ece_closed_form(cal)
    assert d < 0


def test_d_ece_no_warning_for_pav(rng):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        for _ in range(30):
            d_ece_closed_form(pav_calibrate(random_score_set(rng)))


def test_d_ece_bounds_and_ece_bound_on_pav(backend, rng):
    t = np.linspace(-4, 4, 201) * math.log(10)
    ref = perfect_privacy_at_log_odds(t)
    for _ in range(100):
        cal = pav_calibrate(random_score_set(rng))
        d = d_ece_closed_form(cal)
        assert 0.0 <= d <= MAX_D_ECE + 1e-12
        assert np.all(ece_at_log_odds(cal, t) <= ref + 1e-12)


# ---- worst case and tags -------------------------------------------------

def test_worst_case_zero():
    assert worst_case_llr(CalibratedLLRs([0.0], [0.0])) == 0.0


def test_worst_case_example():
    cal = CalibratedLLRs([-2.302585], [1.151293])
    assert worst_case_llr(cal) == pytest.approx(1.0, abs=1e-6)


def test_worst_case_reported_value():
    cal = CalibratedLLRs([3.98 * math.log(10)], [-1.0])
    assert worst_case_llr(cal) == pytest.approx(3.98, abs=1e-12)
    assert categorical_tag(worst_case_llr(cal)) == "C"


@settings(max_examples=100, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=1, max_size=20),
       st.lists(st.floats(-50, 50), min_size=1, max_size=20))
def test_worst_case_permutation_and_zero(a, b):
    cal = CalibratedLLRs(a, b)
    v = worst_case_llr(cal)
    assert v == worst_case_llr(CalibratedLLRs(a[::-1], b[::-1]))
    assert (v == 0.0) == all(x == 0.0 for x in a + b)


@pytest.mark.parametrize(
    "value, tag",
    [(0.0, "0"), (1e-300, "A"), (0.5, "A"), (1.0, "B"), (2.0, "C"), (3.98, "C"), (3.58, "C"),
     (2.27, "C"), (4.0, "D"), (5.0, "E"), (5.5, "E"), (6.0, "F"), (42.0, "F")],
)
def test_tags(value, tag):
    assert categorical_tag(value) == tag


@pytest.mark.parametrize("edge, below, at", [(1.0, "A", "B"), (2.0, "B", "C"), (4.0, "C", "D"),
                                             (5.0, "D", "E"), (6.0, "E", "F")])
def test_tag_edges(edge, below, at):
    assert categorical_tag(np.nextafter(edge, 0.0)) == below
    assert categorical_tag(edge) == at


def test_negative_magnitude():
    with pytest.raises(NegativeMagnitude):
        categorical_tag(-0.1)


# ---- zebra pipeline ------------------------------------------------------

def test_zebra_zero_evidence(backend):
    r = zebra(ScoreSet([1.0] * 5, [1.0] * 5, "flat"))
    assert r.as_tuple() == (0.0, 0.0, "0")


def test_zebra_unequal_counts_all_tied(backend):
    # one block; the prior correction removes the class proportion exactly
    r = zebra(ScoreSet([1.0] * 3, [1.0] * 7))
    assert r.as_tuple() == (0.0, 0.0, "0")


def test_zebra_separated(backend):
    n = 2000
    s = ScoreSet(np.arange(n) + 10.0 * n, np.arange(n, dtype=float))
    cal = pav_calibrate(s)
    r = zebra(s)
    assert abs(r.d_ece - d_ece_numeric(cal)) < 1e-6
    assert MAX_D_ECE - r.d_ece < 1e-3
    # Laplace-capped: mated block posterior n/(n+1), non-mated 1/(n+1)
    assert r.log10_l == pytest.approx(math.log10(n), abs=1e-12)
    assert r.tag == "C"


def test_zebra_baselines():
    s = ScoreSet([2.0, 3.0], [1.0, 2.5], "x")
    r = zebra(s, baselines=True)
    assert r.cllr == cllr(pav_calibrate(s))
    assert r.eer == eer(s)
    assert zebra(s).cllr is None


# ---- baselines -----------------------------------------------------------

def test_cllr_flat():
    assert cllr(CalibratedLLRs([0.0], [0.0])) == 1.0


def test_cllr_example():
    cal = CalibratedLLRs.from_lrs([10.0], [0.1])
    assert cllr(cal) == pytest.approx(math.log2(1.1), abs=1e-15)


def test_cllr_identity(backend, rng):
    for _ in range(50):
        cal = pav_calibrate(random_score_set(rng))
        assert cllr(cal) == ece(cal, 0.5)


def test_eer_separated():
    assert eer(ScoreSet([5.0, 6.0], [1.0, 2.0])) == 0.0


def test_eer_identical():
    assert eer(ScoreSet([1.0, 2.0, 3.0], [1.0, 2.0, 3.0])) == 0.5
    assert eer(ScoreSet([1.0], [1.0])) == 0.5


def test_eer_example():
    want = eer_oracle([2, 3], [1, 2.5])
    assert want == 0.25
    assert eer(ScoreSet([2.0, 3.0], [1.0, 2.5])) == pytest.approx(want, abs=1e-15)


def test_eer_against_oracle(backend, rng):
    for _ in range(200):
        s = random_score_set(rng, 1, 30)
        got = eer(s)
        assert 0.0 <= got <= 0.5
        assert got == pytest.approx(eer_oracle(s.mated, s.nonmated), abs=1e-12)
