import math

import numpy as np
import pytest

from dirichlet_lab import (
    NumericalError,
    PreconditionError,
    Rectangle,
    builtin_series,
    default_evaluator,
    density_table,
    identity_coefficients,
    inverse_coefficients,
    mollifier_tail_decay,
    recurrence_scan,
    rouche_verify,
    winding_count,
    winding_on_circle,
    zero_scan,
    zeta_values,
)
from dirichlet_lab.series import PolynomialEvaluator

from _oracles import (
    MOLLIFY_TAILS,
    PERIOD2,
    PERIOD3,
    RH_ZERO_1,
    RVM_100,
    RVM_50,
)

ETA = default_evaluator(builtin_series("eta-factor"))
ZETA_SPEC = builtin_series("zeta")

# second ladder fixture: 1 - 3^{0.8} 3^{-s}, zeros at 0.8 + i k (2 pi / log 3)
LADDER3 = PolynomialEvaluator([1.0, 3.0], [1.0, -(3.0**0.8)])


def _linear(root):
    def f(s):
        return np.asarray(s, dtype=np.complex128) - root

    return f


def test_winding_simple_zero():
    assert winding_count(_linear(1.0 + 1.0j), Rectangle(0.0, 2.0, 0.0, 2.0)) == 1
    assert winding_count(_linear(5.0 + 1.0j), Rectangle(0.0, 2.0, 0.0, 2.0)) == 0


def test_winding_double_zero():
    f = lambda s: (np.asarray(s, dtype=np.complex128) - (1.0 + 1.0j)) ** 2
    assert winding_count(f, Rectangle(0.0, 2.0, 0.0, 2.0)) == 2


def test_winding_is_additive_across_a_cut():
    total = winding_count(ETA, Rectangle(0.5, 1.5, 0.5, 31.5))
    low = winding_count(ETA, Rectangle(0.5, 1.5, 0.5, 15.5))
    high = winding_count(ETA, Rectangle(0.5, 1.5, 15.5, 31.5))
    assert total == 3  # ladder spacing 2 pi / log 2 = 9.06...
    assert low + high == total


def test_winding_zero_on_edge_is_detected():
    # right edge sigma = 1 runs through the ladder zero at t = 9.06...
    with pytest.raises(NumericalError, match="zero near boundary"):
        winding_count(ETA, Rectangle(0.5, 1.0, 8.0, 10.0))


def test_winding_on_circle():
    assert winding_on_circle(_linear(0.5j), 0.0j, 1.0) == 1
    assert winding_on_circle(_linear(3.0), 0.0j, 1.0) == 0
    with pytest.raises(PreconditionError, match="radius"):
        winding_on_circle(_linear(0.0), 0.0j, -1.0)


def test_winding_validation():
    with pytest.raises(PreconditionError, match="boundary step"):
        winding_count(ETA, Rectangle(0.5, 1.5, 1.0, 2.0), boundary_step=0.0)
    with pytest.raises(PreconditionError, match="sigma_lo < sigma_hi"):
        Rectangle(1.0, 0.5, 0.0, 1.0)


def test_zero_scan_ladder_location():
    records = zero_scan(ETA, Rectangle(0.5, 1.5, 8.5, 9.5))
    assert len(records) == 1
    rec = records[0]
    assert abs(rec.location - (1.0 + 1j * PERIOD2)) < 1e-9
    assert rec.winding_confirmed
    assert rec.refinement_residual <= 1e-10


@pytest.mark.filterwarnings("ignore:accuracy not guaranteed")
def test_zero_scan_first_critical_zero():
    records = zero_scan(zeta_values, Rectangle(0.4, 0.6, 14.0, 15.0))
    assert len(records) == 1
    rec = records[0]
    assert abs(rec.location.imag - RH_ZERO_1) < 1e-8
    assert abs(rec.location.real - 0.5) < 1e-9
    assert rec.winding_confirmed


def test_zero_scan_empty_region():
    assert zero_scan(ETA, Rectangle(0.5, 1.5, 2.0, 8.0)) == []


def test_zero_scan_reports_multiplicity():
    f = lambda s: (np.asarray(s, dtype=np.complex128) - (1.0 + 1.0j)) ** 2
    records = zero_scan(f, Rectangle(0.0, 2.0, 0.0, 2.0))
    assert len(records) == 2
    for rec in records:
        assert abs(rec.location - (1.0 + 1.0j)) < 1e-5


def test_zero_scan_adopts_boundary_zero():
    # t = 0 ladder zero sits exactly on the requested edge; the outward
    # nudge must include it rather than fail
    records = zero_scan(ETA, Rectangle(0.5, 1.5, 0.0, 10.0))
    assert len(records) == 2
    assert abs(records[0].location - (1.0 + 0.0j)) < 1e-9
    assert abs(records[1].location - (1.0 + 1j * PERIOD2)) < 1e-9


def test_zero_scan_rejects_poles():
    f = lambda s: 1.0 / (np.asarray(s, dtype=np.complex128) - (1.0 + 5.0j))
    with pytest.raises(NumericalError, match="negative winding"):
        zero_scan(f, Rectangle(0.0, 2.0, 4.0, 6.0))


def test_zero_scan_validation():
    with pytest.raises(PreconditionError, match="tolerance"):
        zero_scan(ETA, Rectangle(0.5, 1.5, 8.5, 9.5), tol=0.0)


def test_density_ladder_counts():
    rows = density_table(ETA, [0.9], 50.0)
    assert rows == [(0.9, 50.0, 6)]  # t = 0, 9.06, ..., 45.32


@pytest.mark.filterwarnings("ignore:accuracy not guaranteed")
def test_density_critical_strip_counts():
    rows = density_table(
        zeta_values, [0.4], 50.0, exclude_origin=True
    ) + density_table(zeta_values, [0.4], 100.0, exclude_origin=True)
    counts = {T: n for _, T, n in rows}
    assert counts[50.0] == 10
    assert counts[100.0] == 29
    # the zero-counting main term tracks the winding counts within one zero
    assert abs(counts[50.0] - RVM_50) < 1.0
    assert abs(counts[100.0] - RVM_100) < 1.0


def test_density_validation():
    with pytest.raises(PreconditionError, match="T must be positive"):
        density_table(ETA, [0.9], 0.0)
    with pytest.raises(PreconditionError, match="below sigma_hi"):
        density_table(ETA, [1.3], 10.0)


def test_recurrence_requires_seed_zero():
    with pytest.raises(PreconditionError, match=r"seed is not a zero"):
        recurrence_scan(ETA, 1.5 + 0.0j, 0.05, 10.0, 0.01)


def test_recurrence_requires_isolation():
    def two_zeros(s):
        arr = np.asarray(s, dtype=np.complex128)
        return (arr - 1.0) * (arr - 1.05)

    with pytest.raises(PreconditionError, match="not isolating: winding 2"):
        recurrence_scan(two_zeros, 1.0 + 0.0j, 0.05, 10.0, 0.01)


def test_recurrence_argument_validation():
    with pytest.raises(PreconditionError, match="positive"):
        recurrence_scan(ETA, 1.0 + 0.0j, -0.05, 10.0, 0.01)
    with pytest.raises(PreconditionError, match="positive"):
        recurrence_scan(ETA, 1.0 + 0.0j, 0.05, 10.0, 0.0)


def test_recurrence_finds_ladder_periods():
    report = recurrence_scan(ETA, 1.0 + 0.0j, 0.05, 20.0, 0.01)
    assert len(report.hits) == 4
    assert report.lower_bound_rate == 4 / 40.0
    for t in report.hits:
        k = round(t / PERIOD2)
        assert k != 0
        assert abs(t - k * PERIOD2) <= 0.006  # within one grid step
    # hits are pairwise separated by at least one unit
    gaps = np.diff(report.hits)
    assert np.all(gaps >= 1.0)
    assert report.threshold == pytest.approx(
        0.2 * math.pi * 0.05**2 * report.m0, rel=1e-12
    )
    # every reported integral sits under the acceptance threshold
    assert all(v <= report.threshold for v in report.hit_integrals)


def test_recurrence_hits_verify_and_rescan():
    report = recurrence_scan(ETA, 1.0 + 0.0j, 0.05, 20.0, 0.01)
    for t in report.hits:
        assert rouche_verify(ETA, 1.0 + 0.0j, t, 0.05, report.m0)
        nearby = zero_scan(
            ETA, Rectangle(0.95, 1.05, t - 0.05, t + 0.05)
        )
        assert len(nearby) >= 1


def test_recurrence_second_ladder():
    report = recurrence_scan(LADDER3, 0.8 + 0.0j, 0.05, 20.0, 0.01)
    assert len(report.hits) == 6
    for t in report.hits:
        k = round(t / PERIOD3)
        assert k != 0
        assert abs(t - k * PERIOD3) <= 0.006


def test_rouche_accepts_true_period_rejects_half():
    m0 = 0.03  # advisory; recomputed internally
    assert rouche_verify(ETA, 1.0 + 0.0j, 0.0, 0.05, m0)
    assert rouche_verify(ETA, 1.0 + 0.0j, PERIOD2, 0.05, m0)
    assert not rouche_verify(ETA, 1.0 + 0.0j, PERIOD2 / 2.0, 0.05, m0)
    with pytest.raises(PreconditionError, match="radius"):
        rouche_verify(ETA, 1.0 + 0.0j, 0.0, 0.0, m0)


def test_mollifier_tail_decay_pins():
    N = 100_000
    ones = ZETA_SPEC.coeffs.dense(N)
    mu = inverse_coefficients(ZETA_SPEC, N)
    tails = dict(mollifier_tail_decay(ones, mu, 0.75, [10, 100, 1000], N))
    for X, want in MOLLIFY_TAILS.items():
        assert abs(tails[X] - want) <= 1e-9 * want
    # longer mollifiers kill more of the tail
    assert tails[1000] < tails[100] < tails[10]
    assert tails[1000] < 0.5 * tails[10]


def test_mollifier_tail_decay_degenerate_cases():
    e = identity_coefficients(100)
    out = mollifier_tail_decay(e, e, 0.75, [10, 50], 100)
    assert out == [(10, 0.0), (50, 0.0)]
    ones = ZETA_SPEC.coeffs.dense(1000)
    mu = inverse_coefficients(ZETA_SPEC, 1000)
    out = mollifier_tail_decay(ones, mu, 0.75, [2000], 1000)
    assert out == [(2000, 0.0)]


def test_mollifier_tail_decay_guards():
    ones = ZETA_SPEC.coeffs.dense(200)
    mu = inverse_coefficients(ZETA_SPEC, 200)
    with pytest.raises(NumericalError, match="increase N"):
        mollifier_tail_decay(ones, mu, 0.75, [10], 200)
    with pytest.raises(PreconditionError, match="sigma > 1/2"):
        mollifier_tail_decay(ones, mu, 0.5, [10], 200)
    with pytest.raises(PreconditionError, match="N >= 2"):
        mollifier_tail_decay(ones, mu, 0.75, [10], 1)
