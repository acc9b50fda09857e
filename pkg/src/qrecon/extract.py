"""Recover eigenvalues and endpoint products from boundary traces.

The convolution operator built from a trace r on [0, 2T],

    (K f)(t) = integral_0^T r(2T - t - tau) f(tau) dtau,

and its time-derivative companion form a generalized eigenproblem whose
eigenvalues are i * lambda_k; the same machinery applied to conj(r) yields
the conjugate family.  After biorthonormalization the endpoint products
a_k phi_k'(0) (resp. a_k phi_k'(1)) drop out of two quadratures against the
half-window samples of r.
"""

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DomainError, EmptyDataError, InvalidInputError, PairingError
from .grids import trapezoid_weights
from .simulate import ComplexTrace


@dataclass
class ExtractOptions:
    svd_cut: float = 1e-8
    residual_tol: float = 1e-4
    spurious_tol: float = 1e-3     # |Re mu| <= spurious_tol * |mu|
    match_rel_tol: float = 1e-3    # lambda pairing tolerance, scaled by max(1, |lambda|)
    gram_warn_tol: float = 1e-3    # off-diagonal level that raises a conditioning warning
    use_analytic_derivative: bool = False


@dataclass
class DiscreteOperator:
    """Nystrom discretization of the trace convolution operator on [0, T].

    entries[i, j] is the raw trace sample at argument 2T - t_i - tau_j; the
    trapezoid weights are kept separate so entries stay quadrature-free.
    """

    entries: np.ndarray
    weights: np.ndarray
    T: float

    @property
    def size(self):
        return len(self.weights)

    @property
    def matrix(self):
        return self.entries * self.weights[None, :]


@dataclass
class ModeEstimate:
    """One paired spectral mode recovered from a single-endpoint trace."""

    lam: float
    mu: complex
    f: np.ndarray
    g: np.ndarray
    residual: float
    product: complex = 0.0j


@dataclass
class ExtractedData:
    """Paired left/right extraction output, sorted by increasing lambda."""

    modes: list                      # ModeEstimate per mode, left endpoint
    right_products: np.ndarray       # a_k phi_k'(1), matched by lambda
    gram_offdiag: float = 0.0        # worst |Gram - I| entry over both endpoints
    warnings: list = field(default_factory=list)

    @property
    def lambdas(self):
        return np.array([m.lam for m in self.modes])

    @property
    def left_products(self):
        return np.array([m.product for m in self.modes])

    @property
    def residuals(self):
        return np.array([m.residual for m in self.modes])

    def __len__(self):
        return len(self.modes)


def numeric_time_derivative(r):
    """4th-order finite-difference time derivative of a trace.

    Centered five-point stencil in the interior, one-sided 4th-order stencils
    at the four boundary samples.
    """
    s = r.samples
    dt = r.dt
    d = np.empty_like(s)
    d[2:-2] = (s[:-4] - 8.0 * s[1:-3] + 8.0 * s[3:-1] - s[4:]) / (12.0 * dt)
    c0 = np.array([-25.0, 48.0, -36.0, 16.0, -3.0]) / 12.0
    c1 = np.array([-3.0, -10.0, 18.0, -6.0, 1.0]) / 12.0
    d[0] = (c0 @ s[:5]) / dt
    d[1] = (c1 @ s[:5]) / dt
    d[-1] = -(c0 @ s[-5:][::-1]) / dt
    d[-2] = -(c1 @ s[-5:][::-1]) / dt
    return ComplexTrace(r.T_obs, d)


def convolution_operator(r, T):
    """Discretize (K f)(t) = integral_0^T r(2T - t - tau) f(tau) dtau.

    On the uniform trace grid the argument 2T - t_i - tau_j is itself a grid
    point, so the entries are exact samples without interpolation.
    """
    dt = r.dt
    n_half = int(round(T / dt))
    if abs(n_half * dt - T) > 1e-9 * max(T, 1.0):
        raise DomainError("operator window T is not aligned with the trace grid")
    if 2 * n_half > r.M:
        raise DomainError(f"trace covers [0, {r.T_obs}] but the operator needs [0, {2 * T}]")
    n = n_half + 1
    idx = 2 * n_half - (np.arange(n)[:, None] + np.arange(n)[None, :])
    entries = r.samples[idx]
    return DiscreteOperator(entries=entries, weights=trapezoid_weights(n, dt), T=T)


def generalized_modes(Kdot, K, svd_cut=1e-8, residual_tol=1e-4, spurious_tol=1e-3):
    """Solve Kdot f = mu K f on the leading singular subspace of K.

    Both operators are projected onto the singular subspace of K with
    singular values >= svd_cut * sigma_1, the reduced dense pencil is solved,
    and eigenvectors are lifted back.  Candidates must satisfy the relative
    residual bound and have nearly purely imaginary mu.

    Returns a list of (mu, f, residual) triples.
    """
    if Kdot.size != K.size:
        raise InvalidInputError("operator sizes differ")
    if not 0.0 < svd_cut < 1.0:
        raise InvalidInputError("svd_cut must lie in (0, 1)")
    A = K.matrix
    Ad = Kdot.matrix
    U, S, Vh = np.linalg.svd(A)
    if S[0] == 0.0:
        raise EmptyDataError("convolution operator is numerically zero")
    rank = int(np.sum(S >= svd_cut * S[0]))
    if rank == 0:
        raise EmptyDataError("convolution operator has numerical rank zero")
    Ur = U[:, :rank]
    Vr = Vh[:rank, :].conj().T
    reduced = Ur.conj().T @ Ad @ Vr
    mus, Z = scipy.linalg.eig(reduced, np.diag(S[:rank]))
    fs = Vr @ Z
    out = []
    for i, mu in enumerate(mus):
        if not np.isfinite(mu):
            continue
        f = fs[:, i]
        ref = A @ f
        num = np.linalg.norm(Ad @ f - mu * ref)
        den = np.linalg.norm(mu * ref)
        if den == 0.0:
            continue
        residual = num / den
        if residual <= residual_tol and abs(mu.real) <= spurious_tol * abs(mu):
            out.append((mu, f, float(residual)))
    return out


def _match_sorted(lams_a, lams_b, rel_tol):
    """One-to-one match of two sorted frequency lists; error on any orphan."""
    if len(lams_a) != len(lams_b):
        raise PairingError(
            f"family sizes differ: {len(lams_a)} vs {len(lams_b)} modes"
        )
    tol = rel_tol * np.maximum(1.0, np.abs(lams_a))
    bad = np.abs(lams_a - lams_b) > tol
    if bad.any():
        orphans = ", ".join(f"{v:.6g}" for v in np.asarray(lams_a)[bad])
        raise PairingError(f"unmatched modes at lambda = {orphans}")


def biorthonormalize(fs, gs, K, match_rel_tol=1e-3, gram_warn_tol=1e-3):
    """Pair the two raw families by frequency and scale them so that
    (K f_n, g_n) = 1.

    The scale is split symmetrically between f and g; the residual phase
    freedom is fixed later by endpoint_products (the product gamma * beta is
    gauge invariant).  Returns (modes, gram_offdiag, warnings) where modes is
    a list of ModeEstimate without products filled in.
    """
    if not fs or not gs:
        raise EmptyDataError("no candidate modes to pair")
    lam_f = np.array([mu.imag for mu, _, _ in fs])
    lam_g = np.array([-mu.imag for mu, _, _ in gs])
    order_f = np.argsort(lam_f)
    order_g = np.argsort(lam_g)
    _match_sorted(lam_f[order_f], lam_g[order_g], match_rel_tol)

    A = K.matrix
    w = K.weights
    modes = []
    for i, j in zip(order_f, order_g):
        mu, f, res_f = fs[i]
        _, g, res_g = gs[j]
        inner = np.conj(g) @ (w * (A @ f))
        if inner == 0.0:
            raise PairingError(f"degenerate normalization at lambda = {lam_f[i]:.6g}")
        scale = np.sqrt(abs(inner))
        phase = np.exp(0.5j * np.angle(inner))
        f = f / (scale * phase)
        g = g / (scale * np.conj(phase))
        modes.append(ModeEstimate(lam=float(0.5 * (lam_f[i] + lam_g[j])), mu=mu,
                                  f=f, g=g, residual=max(res_f, res_g)))

    F = np.column_stack([m.f for m in modes])
    G = np.column_stack([m.g for m in modes])
    gram = G.conj().T @ (w[:, None] * (A @ F))
    offdiag = float(np.max(np.abs(gram - np.eye(len(modes)))))
    warnings = []
    if offdiag > gram_warn_tol:
        warnings.append(f"biorthogonal Gram matrix off-diagonal reaches {offdiag:.3e}")
    return modes, offdiag, warnings


def endpoint_products(r, modes, T):
    """Products gamma_k * beta_k = a_k phi_k'(endpoint) for normalized pairs.

    gamma_k integrates r(T - tau) against f_k, beta_k against conj(g_k); both
    use the trace's own trapezoid weights on [0, T].
    """
    dt = r.dt
    n_half = int(round(T / dt))
    idx = n_half - np.arange(n_half + 1)
    rT = r.samples[idx]
    w = trapezoid_weights(n_half + 1, dt)
    out = np.empty(len(modes), dtype=complex)
    for i, m in enumerate(modes):
        gamma = np.sum(w * rT * m.f)
        beta = np.sum(w * rT * np.conj(m.g))
        out[i] = gamma * beta
    return out


def _extract_endpoint(r, opts, rdot=None):
    """Run derivative -> operator -> pencil -> pairing for one endpoint."""
    T = r.T_obs / 2.0
    if rdot is None:
        rdot = numeric_time_derivative(r)
    K = convolution_operator(r, T)
    Kd = convolution_operator(rdot, T)
    raw_f = generalized_modes(Kd, K, opts.svd_cut, opts.residual_tol, opts.spurious_tol)
    r_conj = ComplexTrace(r.T_obs, np.conj(r.samples))
    rdot_conj = ComplexTrace(r.T_obs, np.conj(rdot.samples))
    Kc = convolution_operator(r_conj, T)
    Kdc = convolution_operator(rdot_conj, T)
    raw_g = generalized_modes(Kdc, Kc, opts.svd_cut, opts.residual_tol, opts.spurious_tol)
    modes, offdiag, warns = biorthonormalize(raw_f, raw_g, K,
                                             opts.match_rel_tol, opts.gram_warn_tol)
    prods = endpoint_products(r, modes, T)
    for m, p in zip(modes, prods):
        m.product = p
    return modes, offdiag, warns


def extract_spectrum(r0, r1, opts=None, r0dot=None, r1dot=None):
    """Full two-endpoint extraction: eigenvalues plus both endpoint products.

    The optional analytic derivative traces (simulation mode) replace the
    finite-difference derivative when opts.use_analytic_derivative is set.
    """
    opts = opts or ExtractOptions()
    if r0.M != r1.M or abs(r0.T_obs - r1.T_obs) > 1e-12 * max(r0.T_obs, r1.T_obs):
        raise InvalidInputError("traces must share one time grid")
    d0 = r0dot if opts.use_analytic_derivative else None
    d1 = r1dot if opts.use_analytic_derivative else None
    if opts.use_analytic_derivative and (d0 is None or d1 is None):
        raise InvalidInputError("analytic derivative requested but not provided")
    left, off0, warn0 = _extract_endpoint(r0, opts, d0)
    right, off1, warn1 = _extract_endpoint(r1, opts, d1)
    lam_l = np.array([m.lam for m in left])
    lam_r = np.array([m.lam for m in right])
    _match_sorted(lam_l, lam_r, opts.match_rel_tol)
    for ml, mr in zip(left, right):
        ml.lam = float(0.5 * (ml.lam + mr.lam))
    return ExtractedData(
        modes=left,
        right_products=np.array([m.product for m in right]),
        gram_offdiag=max(off0, off1),
        warnings=warn0 + warn1,
    )
