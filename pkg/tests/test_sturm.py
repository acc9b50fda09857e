import numpy as np
import pytest
from scipy.linalg import eigh_tridiagonal

import qrecon as qr
from qrecon.errors import ConvergenceError, InvalidInputError, UnsupportedSpectrumError

PI2 = np.pi**2


def test_cauchy_free_at_pi_squared():
    q = qr.GridFunction.zero(2048)
    tr = qr.cauchy_solve(q, PI2)
    x = q.x
    assert np.max(np.abs(tr.y - np.sin(np.pi * x) / np.pi)) < 1e-9
    assert abs(tr.y[-1]) < 1e-9
    assert abs(tr.yprime[-1] + 1.0) < 1e-8
    assert tr.y[0] == 0.0 and tr.yprime[0] == 1.0


def test_cauchy_free_lambda_zero_is_linear():
    tr = qr.cauchy_solve(qr.GridFunction.zero(256), 0.0)
    assert np.max(np.abs(tr.y - np.linspace(0, 1, 257))) < 1e-13
    assert abs(tr.y[-1] - 1.0) < 1e-13


def test_cauchy_free_negative_lambda_sinh():
    tr = qr.cauchy_solve(qr.GridFunction.zero(2048), -1.0)
    assert abs(tr.y[-1] - np.sinh(1.0)) < 1e-8


def test_cauchy_rejects_bad_lambda():
    with pytest.raises(InvalidInputError):
        qr.cauchy_solve(qr.GridFunction.zero(256), np.nan)


def test_grid_function_rejects_nonfinite():
    vals = np.zeros(257)
    vals[3] = np.inf
    with pytest.raises(InvalidInputError):
        qr.GridFunction(vals)


def test_free_eigenvalues_and_slopes(free_sys):
    ks = np.arange(1, 9, dtype=float)
    assert np.max(np.abs(free_sys.lambdas / (PI2 * ks**2) - 1)) < 1e-8
    assert np.max(np.abs(free_sys.slope0 - np.sqrt(2) * np.pi * ks)) < 1e-6
    assert np.max(np.abs(free_sys.slope1 - np.sqrt(2) * np.pi * ks * (-1.0) ** ks)) < 1e-6


def test_constant_shift_eigenvalues(const5_sys, free_sys):
    assert np.max(np.abs(const5_sys.lambdas - free_sys.lambdas - 5.0)) < 1e-8
    assert np.max(np.abs(const5_sys.slope0 - free_sys.slope0)) < 1e-8
    assert np.max(np.abs(const5_sys.slope1 - free_sys.slope1)) < 1e-8


def _fd_oracle(qfn, count, m):
    """Dirichlet eigenvalues by a dense finite-difference operator with one
    Richardson refinement step."""
    def fd(mm):
        h = 1.0 / mm
        x = np.linspace(0, 1, mm + 1)[1:-1]
        d = 2.0 / h**2 + qfn(x)
        e = np.full(mm - 2, -1.0 / h**2)
        vals = eigh_tridiagonal(d, e, select="i", select_range=(0, count - 1))[0]
        return vals
    lam_h = fd(m)
    lam_h2 = fd(2 * m)
    return (4.0 * lam_h2 - lam_h) / 3.0


def test_sine_potential_against_fd_oracle():
    qfn = lambda x: 10.0 * np.sin(np.pi * x)
    sys = qr.dirichlet_eigens(qr.GridFunction.from_callable(qfn, 2048), 5)
    oracle = _fd_oracle(qfn, 5, 2000)
    assert np.max(np.abs(sys.lambdas / oracle - 1)) < 1e-6


def test_eigenvalues_strictly_increasing(free_sys, const5_sys):
    assert np.all(np.diff(free_sys.lambdas) > 0)
    assert np.all(np.diff(const5_sys.lambdas) > 0)


def test_eigenvalue_asymptotics_sine_potential():
    q = qr.GridFunction.from_callable(lambda x: 10 * np.sin(np.pi * x), 2048)
    sys = qr.dirichlet_eigens(q, 10)
    ks = np.arange(1, 11, dtype=float)
    dev = np.abs(sys.lambdas - PI2 * ks**2 - q.mean())
    assert np.all(np.diff(dev) < 0)
    norm_dev = np.abs(sys.norms**2 * 2.0 * PI2 * ks**2 - 1.0)
    assert np.all(np.diff(norm_dev) < 0)


def test_eigenfunctions_normalized(free_sys):
    for phi in free_sys.eigenfunctions:
        nrm = np.trapezoid(phi.values**2, dx=phi.h)
        assert abs(nrm - 1.0) < 1e-10


@pytest.mark.parametrize("qfn,k,tol", [
    (lambda x: np.zeros_like(x), 1, 1e-6),
    (lambda x: np.full_like(x, 5.0), 2, 1e-6),
    (lambda x: 10 * np.sin(np.pi * x), 1, 1e-5),
])
def test_norm_identity_examples(qfn, k, tol):
    q = qr.GridFunction.from_callable(qfn, 2048)
    sys = qr.dirichlet_eigens(q, k)
    assert qr.norm_identity_residual(q, sys, k) < tol


def test_norm_identity_all_modes_three_potentials():
    for qfn in (lambda x: np.zeros_like(x),
                lambda x: np.full_like(x, 5.0),
                lambda x: 10 * np.sin(np.pi * x)):
        q = qr.GridFunction.from_callable(qfn, 2048)
        sys = qr.dirichlet_eigens(q, 10)
        for k in range(1, 11):
            assert qr.norm_identity_residual(q, sys, k) < 1e-5


def test_y1_product_free_values():
    lams = PI2 * np.arange(1, 10_001, dtype=float) ** 2
    assert abs(qr.y1_product(0.0, lams) - 1.0) < 1e-3
    assert abs(qr.y1_product(PI2 / 4.0, lams) - 2.0 / np.pi) < 1e-3
    assert qr.y1_product(lams[1], lams) == 0.0


def test_y1_product_rejects_unsorted():
    with pytest.raises(InvalidInputError):
        qr.y1_product(1.0, np.array([4.0, 2.0, 9.0]))


def test_zero_eigenvalue_rejected():
    # q = -pi^2 puts the first eigenvalue exactly at zero
    with pytest.raises(UnsupportedSpectrumError):
        qr.dirichlet_eigens(qr.GridFunction.constant(-PI2, 1024), 1)


def test_count_validation():
    with pytest.raises(InvalidInputError):
        qr.dirichlet_eigens(qr.GridFunction.zero(256), 0)
