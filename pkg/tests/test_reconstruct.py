import numpy as np
import pytest

import qrecon as qr
from qrecon.errors import IllConditionedError, InvalidInputError, SingularDivisionError
from qrecon.norming import SpectralData
from qrecon.reconstruct import GLSolution, gl_stability_report

PI2 = np.pi**2


def const5_sd(n):
    ks = np.arange(1, n + 1, dtype=float)
    return SpectralData(PI2 * ks**2 + 5.0, (-1.0) ** ks, 1.0 / (2.0 * PI2 * ks**2),
                        N_used=10**6, epsilon_used=1e-3)


def free_sd(n):
    ks = np.arange(1, n + 1, dtype=float)
    return SpectralData(PI2 * ks**2, (-1.0) ** ks, 1.0 / (2.0 * PI2 * ks**2),
                        N_used=10**6, epsilon_used=1e-3)


def _window(g, lo=0.1, hi=0.9):
    sel = (g.x >= lo) & (g.x <= hi)
    return g.values[sel]


# ---------------- Gelfand-Levitan ----------------

def test_zero_kernel_gives_zero_solution():
    kg = qr.KernelGrid(tau=1.0, m=64, values=np.zeros((65, 65)))
    sol = qr.gl_solve(kg)
    assert np.max(np.abs(sol.V)) == 0.0
    qhat = qr.gl_potential(sol)
    assert np.max(np.abs(qhat.values)) == 0.0


def test_free_data_recovers_zero_potential():
    kg = qr.restricted_kernel(free_sd(8), tau=1.0, m=64)
    sol = qr.gl_solve(kg)
    qhat = qr.gl_potential(sol)
    assert np.max(np.abs(qhat.values)) < 1e-9


def test_synthetic_diagonal_slope():
    # diag(y) = y means V(tau-y, tau-y) = tau - y, so q = 2 d/dy V(...) = -2
    m = 64
    y = np.linspace(0.0, 1.0, m + 1)
    sol = GLSolution(tau=1.0, V=np.zeros((m + 1, m + 1)), diag=y.copy(),
                     residuals=np.zeros(m + 1), cond_max=1.0, lam_max=None)
    qhat = qr.gl_potential(sol)
    assert np.max(np.abs(qhat.values + 2.0)) < 1e-10


def test_const5_gl_round_trip():
    kg = qr.restricted_kernel(const5_sd(40), tau=1.0, m=256)
    sol = qr.gl_solve(kg)
    assert np.max(sol.residuals) < 1e-10
    qhat = qr.gl_potential(sol)
    mid = _window(qhat)
    assert np.max(np.abs(mid - 5.0)) < 0.15
    assert abs(np.mean(mid) - 5.0) < 0.05


def test_gl_requires_full_interval():
    kg = qr.restricted_kernel(const5_sd(5), tau=0.5, m=64)
    sol = qr.gl_solve(kg)
    with pytest.raises(InvalidInputError):
        qr.gl_potential(sol)


def test_ill_conditioned_kernel_rejected():
    m = 64
    # rank-one kernel tuned to annihilate I + C on the full interval
    vals = np.full((m + 1, m + 1), -1.0)
    kg = qr.KernelGrid(tau=1.0, m=m, values=vals)
    with pytest.raises(IllConditionedError):
        qr.gl_solve(kg)


def test_stability_transfer_bound():
    sd_exact = const5_sd(20)
    eps, N = qr.truncation_schedule(0.05, 20)
    alpha2_apx = qr.norming_coefficients(sd_exact.A, sd_exact.lambdas, 20, N)
    sd_apx = SpectralData(sd_exact.lambdas, sd_exact.A, alpha2_apx,
                          N_used=N, epsilon_used=eps)
    kg_exact = qr.restricted_kernel(sd_exact, tau=1.0, m=128)
    kg_apx = qr.restricted_kernel(sd_apx, tau=1.0, m=128)
    report = gl_stability_report(kg_exact, kg_apx)
    assert report["kernel_gap"] > 0
    assert report["solution_gap"] <= report["bound"]


# ---------------- boundary control ----------------

def test_bcm_free_mu_is_identity():
    taus, mus, cond, resid = qr.bcm_mu(free_sd(8), tau_count=32, m=64)
    assert np.max(np.abs(mus - taus)) < 1e-12
    assert resid < 1e-10


def test_bcm_const5_mid_interval():
    sd = const5_sd(40)
    taus, mus, _, _ = qr.bcm_mu(sd, tau_count=64, m=256)
    qhat, masked = qr.bcm_potential(mus, taus, lam_max=float(sd.lambdas[-1]))
    mid = _window(qhat)
    assert np.max(np.abs(mid - 5.0)) < 0.2


def test_bcm_linear_mu_zero_potential():
    taus = np.arange(1, 65) / 64.0
    qhat, masked = qr.bcm_potential(taus.copy(), taus, lam_max=None)
    assert np.max(np.abs(qhat.values)) < 1e-10


def test_bcm_sinh_oracle():
    # mu'' = 5 mu exactly for this mu; checks the differentiation stencil
    taus = np.arange(1, 65) / 64.0
    mus = np.sinh(np.sqrt(5.0) * taus) / np.sqrt(5.0)
    qhat, masked = qr.bcm_potential(mus, taus, lam_max=None)
    sel = qhat.x >= 0.05
    assert np.max(np.abs(qhat.values[sel] - 5.0)) < 0.05


def test_bcm_interior_zero_rejected():
    taus = np.arange(1, 65) / 64.0
    mus = np.sin(2.0 * np.pi * taus)  # vanishes at tau = 0.5
    with pytest.raises(SingularDivisionError):
        qr.bcm_potential(mus, taus, lam_max=None)


def test_bcm_extrapolation_option():
    sd = const5_sd(10)
    _, mus_a, _, _ = qr.bcm_mu(sd, tau_count=16, m=64)
    _, mus_b, _, _ = qr.bcm_mu(sd, tau_count=16, m=64, extrapolate=True)
    assert np.max(np.abs(mus_a - mus_b)) < 1e-2


# ---------------- combined ----------------

def test_gl_and_bcm_agree_const5():
    results = qr.reconstruct_potential(const5_sd(40), method="both")
    gl, bcm = results
    assert gl.method == "GL" and bcm.method == "BCM"
    vb = np.interp(gl.qhat.x, bcm.qhat.x, bcm.qhat.values)
    sel = (gl.qhat.x >= 0.1) & (gl.qhat.x <= 0.9)
    assert np.max(np.abs((gl.qhat.values - vb)[sel])) < 0.3


def test_reconstruct_unknown_method():
    with pytest.raises(InvalidInputError):
        qr.reconstruct_potential(const5_sd(5), method="krein")


def test_condition_estimates_recorded():
    res = qr.reconstruct_potential(const5_sd(10), method="gl")[0]
    assert res.condition > 0
    assert "solve_residual_max" in res.diagnostics
