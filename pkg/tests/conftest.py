import numpy as np
import pytest

import qrecon as qr


@pytest.fixture(scope="session")
def free_sys():
    """First 8 Dirichlet modes of the free operator on a 2048 grid."""
    return qr.dirichlet_eigens(qr.GridFunction.zero(2048), 8)


@pytest.fixture(scope="session")
def free_coeffs():
    return 1.0 / np.arange(1, 9, dtype=float) ** 2


@pytest.fixture(scope="session")
def free_traces(free_sys, free_coeffs):
    return qr.synthesize_traces(free_sys, free_coeffs, T_obs=1.0, M=2048)


@pytest.fixture(scope="session")
def free_extraction(free_traces):
    r0, r1, _, _ = free_traces
    return qr.extract_spectrum(r0, r1)


@pytest.fixture(scope="session")
def const5_sys():
    return qr.dirichlet_eigens(qr.GridFunction.constant(5.0, 2048), 8)


@pytest.fixture(scope="session")
def const5_extraction(const5_sys, free_coeffs):
    r0, r1, _, _ = qr.synthesize_traces(const5_sys, free_coeffs, T_obs=1.0, M=2048)
    return qr.extract_spectrum(r0, r1)


@pytest.fixture(scope="session")
def sin_sys_small():
    """q = 10 sin(pi x) on a coarser grid, 3 modes, for cheap cross checks."""
    q = qr.GridFunction.from_callable(lambda x: 10 * np.sin(np.pi * x), 1024)
    return q, qr.dirichlet_eigens(q, 3)
