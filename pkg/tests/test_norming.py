import numpy as np
import pytest

import qrecon as qr
from qrecon.errors import (ConsistencyError, DegenerateSpectrumError,
                           InfeasibleScheduleError, InvalidInputError,
                           SignConsistencyError)
from qrecon.norming import _filled_b, asymptotic_shift

PI2 = np.pi**2


def _free_lams(N):
    return PI2 * np.arange(1, N + 1, dtype=float) ** 2


# ---------------- trace_ratios ----------------

def test_ratios_free(free_extraction):
    A = qr.trace_ratios(free_extraction)
    ks = np.arange(1, len(A) + 1)
    assert np.max(np.abs(A - (-1.0) ** ks)) < 1e-6


def test_ratios_const5(const5_extraction):
    A = qr.trace_ratios(const5_extraction)
    ks = np.arange(1, len(A) + 1)
    assert np.max(np.abs(A - (-1.0) ** ks)) < 1e-6


def test_ratios_match_forward_slopes(sin_sys_small):
    q, sys = sin_sys_small
    co = 1.0 / np.arange(1, 4, dtype=float) ** 2
    r0, r1, d0, d1 = qr.synthesize_traces(sys, co, T_obs=1.0, M=512)
    ext = qr.extract_spectrum(r0, r1, qr.ExtractOptions(use_analytic_derivative=True),
                              r0dot=d0, r1dot=d1)
    A = qr.trace_ratios(ext)
    assert np.max(np.abs(A - sys.slope1 / sys.slope0)) < 1e-4


def test_ratios_complex_rejected():
    class Fake:
        left_products = np.array([1.0 + 0j, 1.0 + 0j])
        right_products = np.array([1.0 + 0.5j, -1.0 + 0j])
    with pytest.raises(ConsistencyError):
        qr.trace_ratios(Fake())


# ---------------- truncated_b ----------------

def test_truncated_b_free_first_mode():
    B = qr.truncated_b(1, _free_lams(10_000))
    assert abs(B / (-1.0 / (2.0 * PI2)) - 1.0) < 1e-3


def test_truncated_b_free_second_mode():
    B = qr.truncated_b(2, _free_lams(10_000))
    assert abs(B / (1.0 / (8.0 * PI2)) - 1.0) < 1e-3


def test_truncated_b_minimal_list():
    # N = n: nothing beyond the prefactor and k < n factors
    assert np.isfinite(qr.truncated_b(3, _free_lams(3)))


def test_truncated_b_duplicate_rejected():
    with pytest.raises(DegenerateSpectrumError):
        qr.truncated_b(1, np.array([1.0, 1.0, 2.0]))


# ---------------- truncation_schedule ----------------

def test_schedule_fixed_epsilon():
    eps, N = qr.truncation_schedule(None, 3, eps=0.1)
    assert eps == 0.1 and N == 125


def test_schedule_from_delta():
    eps, N = qr.truncation_schedule(0.02, 1)
    assert abs(eps + np.log(0.99)) < 1e-12
    assert N == 138


def test_schedule_infeasible():
    with pytest.raises(InfeasibleScheduleError):
        qr.truncation_schedule(2.0, 1)
    with pytest.raises(InfeasibleScheduleError):
        qr.truncation_schedule(-0.1, 2)


@pytest.mark.parametrize("delta", [0.01, 0.05, 0.3])
@pytest.mark.parametrize("n", [1, 3, 8])
def test_schedule_satisfies_inequalities(delta, n):
    eps, N = qr.truncation_schedule(delta, n)
    assert n * n / N <= eps / (2.0 * np.log(2.0)) + 1e-15
    assert n * n * abs(1.0 - np.exp(-eps)) <= delta / 2.0 + 1e-12


def test_schedule_n_doubling_quadruples_N():
    for n in (2, 5):
        _, N1 = qr.truncation_schedule(None, n, eps=0.1)
        _, N2 = qr.truncation_schedule(None, 2 * n, eps=0.1)
        assert N2 >= 4 * N1 - 4
        _, M1 = qr.truncation_schedule(0.05, n)
        _, M2 = qr.truncation_schedule(0.05, 2 * n)
        assert M2 >= 4 * M1


# ---------------- norming_coefficients ----------------

def test_free_norming_oracle():
    eps, N = qr.truncation_schedule(0.05, 5)
    ks = np.arange(1, 6, dtype=float)
    alpha2 = qr.norming_coefficients((-1.0) ** ks, _free_lams(5), 5, N)
    exact = 1.0 / (2.0 * PI2 * ks**2)
    rel = np.abs(alpha2 / exact - 1.0)
    assert np.max(rel[:3]) < 1e-3


def test_const5_norming_shift_invariant():
    eps, N = qr.truncation_schedule(0.05, 5)
    ks = np.arange(1, 11, dtype=float)
    lams = PI2 * ks**2 + 5.0
    alpha2 = qr.norming_coefficients((-1.0) ** ks, lams, 5, N)
    exact = 1.0 / (2.0 * PI2 * np.arange(1, 6, dtype=float) ** 2)
    assert np.max(np.abs(alpha2 / exact - 1.0)) < 1e-3


def test_norming_sign_error():
    ks = np.arange(1, 6, dtype=float)
    with pytest.raises(SignConsistencyError):
        qr.norming_coefficients(np.ones(5), _free_lams(5), 5, 1000)


def test_norming_validates_lengths():
    with pytest.raises(InvalidInputError):
        qr.norming_coefficients(np.array([-1.0]), _free_lams(3), 2, 100)
    with pytest.raises(InvalidInputError):
        qr.norming_coefficients(np.array([-1.0, 1.0]), _free_lams(3), 2, 1)


def test_filled_product_matches_direct():
    """Closed-form model tail equals the literal product over the filled list."""
    rng = np.random.default_rng(3)
    nm, N = 6, 3000
    lams_meas = PI2 * np.arange(1, nm + 1, dtype=float) ** 2 + 5.0 \
        + rng.uniform(-0.3, 0.3, nm)
    cbar = asymptotic_shift(lams_meas)
    tail = PI2 * np.arange(nm + 1, N + 1, dtype=float) ** 2 + cbar
    filled = np.concatenate([lams_meas, tail])
    for k in (1, 3, 6, 8, 20):   # 8 and 20 exercise the padded-mode split
        direct = qr.truncated_b(k, filled)
        fast = _filled_b(k, lams_meas, cbar, N)
        assert abs(fast / direct - 1.0) < 1e-10


def test_truncation_bound_free_case():
    """|alpha - alpha_trunc| <= 4 |1 - e^-eps| with the scheduled (eps, N)."""
    for n in (1, 3, 5):
        eps, N = qr.truncation_schedule(0.05, n)
        ks = np.arange(1, n + 1, dtype=float)
        alpha2 = qr.norming_coefficients((-1.0) ** ks, _free_lams(n), n, N)
        exact = 1.0 / (np.sqrt(2.0) * np.pi * ks)
        gap = np.max(np.abs(np.sqrt(alpha2) - exact))
        assert gap <= 4.0 * abs(1.0 - np.exp(-eps))


def test_monotone_improvement_with_N():
    n = 3
    ks = np.arange(1, n + 1, dtype=float)
    exact = 1.0 / (np.sqrt(2.0) * np.pi * ks)
    gaps = []
    for N in (200, 400, 800):
        alpha2 = qr.norming_coefficients((-1.0) ** ks, _free_lams(n), n, N)
        gaps.append(np.max(np.abs(np.sqrt(alpha2) - exact)))
    assert gaps[0] >= gaps[1] >= gaps[2]


def test_positivity(free_extraction):
    sd = qr.build_spectral_data(free_extraction, delta=0.05, n_modes=12)
    assert np.all(sd.alpha2 > 0)


# ---------------- build_spectral_data ----------------

def test_build_spectral_data_padding(free_extraction):
    sd = qr.build_spectral_data(free_extraction, delta=0.05, n_modes=12)
    assert len(sd) == 12
    assert sd.measured_count == len(free_extraction)
    assert np.all(np.diff(sd.lambdas) > 0)
    ks = np.arange(sd.measured_count + 1, 13)
    assert np.array_equal(sd.A[sd.measured_count:], (-1.0) ** ks)
    eps, N = qr.truncation_schedule(0.05, 12)
    assert (sd.epsilon_used, sd.N_used) == (eps, N)


def test_build_spectral_data_truncation(free_extraction):
    sd = qr.build_spectral_data(free_extraction, delta=0.05, n_modes=3)
    assert len(sd) == 3
    assert sd.measured_count == 3
