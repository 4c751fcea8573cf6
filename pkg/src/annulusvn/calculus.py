"""Holomorphic and hereditary functional calculus on the annulus.

``apply_function`` evaluates ``phi(T) = sum a_n T^n`` for a Laurent polynomial
by three independent routes (finite series, eigendecomposition, two-circle
Cauchy integral). ``apply_hereditary`` substitutes ``T`` for ``lambda`` and
``T^*`` for ``conj(mu)`` in ``h = sum c_mn lambda^m conj(mu)^n`` with all
powers of ``T`` to the left.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._linalg import PSD_TOL, DomainError, hermitize
from .annulus import Annulus, KernelKind
from .laurent import LaurentPoly, evaluate
from .operators import adjoint, as_operator, inverse, spectrum

EIGEN_COND_MAX = 1e8
CONTOUR_NODES = 512
CONTOUR_TOL = 1e-10
CONTOUR_MAX_NODES = 2 ** 16
HEREDITARY_BOX = 16
HEREDITARY_TOL = 1e-8
NOISE_FLOOR = 64.0


class NotPSDError(ValueError):
    pass


def _matrix_powers(T, lo, hi, Tinv=None):
    """``{n: T^n}`` for ``lo <= n <= hi`` (always includes 0)."""
    d = len(T)
    lo, hi = min(lo, 0), max(hi, 0)
    P = {0: np.eye(d, dtype=complex)}
    for n in range(1, hi + 1):
        P[n] = P[n - 1] @ T
    if lo < 0:
        Ti = inverse(T) if Tinv is None else Tinv
        for n in range(-1, lo - 1, -1):
            P[n] = P[n + 1] @ Ti
    return P


def _check_spectrum(T, annulus):
    spec = spectrum(T)
    if annulus is not None:
        if not np.all(annulus.contains(spec)):
            raise DomainError(f"spectrum not contained in {annulus}")
    elif np.min(np.abs(spec)) == 0:
        raise DomainError("operator is not invertible")
    return spec


def _series(phi, T):
    if phi.is_zero:
        return np.zeros_like(T)
    P = _matrix_powers(T, phi.n_min, phi.n_max)
    return sum(a * P[n] for n, a in phi.items())


def _eigen(phi, T):
    w, V = np.linalg.eig(T)
    cond = np.linalg.cond(V)
    if not np.isfinite(cond) or cond >= EIGEN_COND_MAX:
        return None, cond
    F = (V * evaluate(phi, w)[None, :]) @ np.linalg.inv(V)
    return F, cond


def _contour_radii(spec, annulus):
    mods = np.abs(spec)
    if annulus is None:
        annulus = Annulus(0.5 * mods.min(), 2.0 * mods.max())
    return math.sqrt(mods.min() * annulus.rho_in), math.sqrt(mods.max() * annulus.rho_out)


def _contour_sum(phi, T, rho, M):
    # trapezoidal rule for (1/2 pi i) \oint phi(z) (z - T)^{-1} dz on |z| = rho
    z = rho * np.exp(2j * np.pi * np.arange(M) / M)
    d = len(T)
    R = np.linalg.solve(z[:, None, None] * np.eye(d)[None] - T[None], np.broadcast_to(np.eye(d), (M, d, d)))
    wts = evaluate(phi, z) * z / M
    return np.tensordot(wts, R, axes=1)


def _contour(phi, T, spec, annulus, nodes=CONTOUR_NODES, tol=CONTOUR_TOL, max_nodes=CONTOUR_MAX_NODES):
    rin, rout = _contour_radii(spec, annulus)
    M = nodes
    prev = _contour_sum(phi, T, rout, M) - _contour_sum(phi, T, rin, M)
    while True:
        M *= 2
        cur = _contour_sum(phi, T, rout, M) - _contour_sum(phi, T, rin, M)
        diff = np.linalg.norm(cur - prev, 2)
        if diff < tol * max(1.0, np.linalg.norm(cur, 2)):
            return cur, {"nodes": M, "converged": True, "radii": (rin, rout)}
        if M >= max_nodes:
            return cur, {"nodes": M, "converged": False, "radii": (rin, rout), "last_change": diff}
        prev = cur


def apply_function(phi, T, annulus=None, method="auto", full_output=False):
    """``phi(T)`` for a Laurent polynomial ``phi``.

    Parameters
    ----------
    phi : LaurentPoly
    T : array_like
        Square matrix; its spectrum must lie strictly inside `annulus` (or
        merely avoid 0 when no annulus is given).
    annulus : Annulus, optional
    method : {"auto", "series", "eigen", "contour"}
        ``auto`` uses the eigendecomposition when the eigenvector matrix has
        condition number below 1e8 and the contour integral otherwise. An
        explicit ``eigen`` request on a (numerically) defective matrix also
        falls back to the contour route.
    full_output : bool
        Also return a dict describing which route ran.
    """
    T = as_operator(T)
    spec = _check_spectrum(T, annulus)
    info = {"method": method, "fallback": False}
    if method == "series":
        F = _series(phi, T)
    elif method in ("eigen", "auto"):
        F, cond = _eigen(phi, T)
        info["eigvec_cond"] = float(cond)
        if F is None:
            F, cinfo = _contour(phi, T, spec, annulus)
            info.update(cinfo, fallback=True, method="contour")
        else:
            info["method"] = "eigen"
    elif method == "contour":
        F, cinfo = _contour(phi, T, spec, annulus)
        info.update(cinfo)
    else:
        raise ValueError(f"unknown method {method!r}")
    return (F, info) if full_output else F


@dataclass(frozen=True, eq=False)
class HereditarySeries:
    """``h(lambda, mu) = sum c[m - m_min, n - n_min] lambda^m conj(mu)^n``."""

    m_min: int
    n_min: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 2:
            raise ValueError("coefficient array must be two-dimensional")
        object.__setattr__(self, "coeffs", c)

    @property
    def m_max(self):
        return self.m_min + self.coeffs.shape[0] - 1

    @property
    def n_max(self):
        return self.n_min + self.coeffs.shape[1] - 1

    @classmethod
    def from_dict(cls, mapping):
        if not mapping:
            return cls(0, 0, np.zeros((1, 1)))
        ms = [m for m, _ in mapping]
        ns = [n for _, n in mapping]
        c = np.zeros((max(ms) - min(ms) + 1, max(ns) - min(ns) + 1), dtype=complex)
        for (m, n), v in mapping.items():
            c[m - min(ms), n - min(ns)] += v
        return cls(min(ms), min(ns), c)

    @classmethod
    def product(cls, f, g):
        """``f(lambda) conj(g(mu))``."""
        if f.is_zero or g.is_zero:
            return cls(0, 0, np.zeros((1, 1)))
        return cls(f.n_min, g.n_min, np.outer(f.coeffs, g.coeffs.conj()))

    @classmethod
    def defect_kernel(cls, r):
        """``1 + r^2 - r^2 / (lambda conj(mu)) - lambda conj(mu)``."""
        return cls.from_dict({(0, 0): 1 + r * r, (-1, -1): -r * r, (1, 1): -1.0})

    def coeff(self, m, n):
        i, j = m - self.m_min, n - self.n_min
        if 0 <= i < self.coeffs.shape[0] and 0 <= j < self.coeffs.shape[1]:
            return complex(self.coeffs[i, j])
        return 0j

    def __call__(self, lam, mu):
        lam = np.asarray(lam, dtype=complex)
        mu = np.asarray(mu, dtype=complex)
        m = np.arange(self.m_min, self.m_max + 1)
        n = np.arange(self.n_min, self.n_max + 1)
        L = lam[..., None] ** m
        Mu = mu.conj()[..., None] ** n
        out = np.einsum("...i,ij,...j->...", L, self.coeffs, Mu)
        return complex(out) if out.ndim == 0 else out

    def __add__(self, other):
        m0, n0 = min(self.m_min, other.m_min), min(self.n_min, other.n_min)
        m1, n1 = max(self.m_max, other.m_max), max(self.n_max, other.n_max)
        c = np.zeros((m1 - m0 + 1, n1 - n0 + 1), dtype=complex)
        for s in (self, other):
            c[s.m_min - m0:s.m_max - m0 + 1, s.n_min - n0:s.n_max - n0 + 1] += s.coeffs
        return HereditarySeries(m0, n0, c)

    def __mul__(self, other):
        if isinstance(other, HereditarySeries):
            return multiply_hereditary(self, other)
        return HereditarySeries(self.m_min, self.n_min, complex(other) * self.coeffs)

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + (-1) * other


def multiply_hereditary(h, g):
    from scipy.signal import convolve2d

    return HereditarySeries(h.m_min + g.m_min, h.n_min + g.n_min, convolve2d(h.coeffs, g.coeffs))


def involution(h):
    """``h*(lambda, mu) = conj(h(mu, lambda))``: ``c*_mn = conj(c_nm)``.

    With powers of ``T`` ordered left of powers of ``T^*``, ``h*(T) = h(T)^*``.
    """
    return HereditarySeries(h.n_min, h.m_min, h.coeffs.T.conj())


def apply_hereditary(h, T, annulus=None):
    """``h(T) = sum c_mn T^m (T^*)^n``."""
    T = as_operator(T)
    _check_spectrum(T, annulus)
    Ti = inverse(T) if min(h.m_min, h.n_min) < 0 else None
    P = _matrix_powers(T, h.m_min, h.m_max, Ti)
    Ts = adjoint(T)
    Q = _matrix_powers(Ts, h.n_min, h.n_max, None if Ti is None else adjoint(Ti))
    out = np.zeros_like(T)
    for i, m in enumerate(range(h.m_min, h.m_max + 1)):
        row = h.coeffs[i]
        if not np.any(row):
            continue
        right = sum(c * Q[n] for n, c in zip(range(h.n_min, h.n_max + 1), row) if c != 0)
        out = out + P[m] @ right
    return out


def torus_grid(rho1, rho2, M1, M2):
    """Meshgrid ``(lambda_j, mu_k) = (rho1 e^{2 pi i j/M1}, rho2 e^{2 pi i k/M2})``."""
    lam = rho1 * np.exp(2j * np.pi * np.arange(M1) / M1)
    mu = rho2 * np.exp(2j * np.pi * np.arange(M2) / M2)
    return np.meshgrid(lam, mu, indexing="ij")


def hereditary_from_samples(H, rho1, rho2, m_range, n_range, full_output=False, noise_floor=None):
    """Recover ``c_mn`` on a box from samples ``H[j, k] = h(lambda_j, mu_k)`` on a torus grid.

    The grid is the one produced by :func:`torus_grid`. The grid sizes must
    exceed the box widths. With `full_output`, also returns the maximal
    difference between the samples and the recovered series on the grid; it
    is zero up to rounding when ``h`` lives in the box and otherwise measures
    the mass outside it.

    Recovered coefficients carry rounding noise of order
    ``eps * max|H| * rho1^-m * rho2^-n``, which high powers of an operator
    amplify. Passing ``noise_floor=kappa`` zeroes every coefficient whose
    Fourier value is below ``kappa * eps * max|H|``.
    """
    H = np.asarray(H, dtype=complex)
    M1, M2 = H.shape
    (m0, m1), (n0, n1) = m_range, n_range
    if M1 <= m1 - m0 or M2 <= n1 - n0:
        raise ValueError(f"grid {M1}x{M2} aliases the box {m_range} x {n_range}")
    # conj(mu)^n carries e^{-i n psi}, so invert with e^{+i n psi} along axis 1
    C = np.fft.ifft(np.fft.fft(H, axis=0) / M1, axis=1)
    m = np.arange(m0, m1 + 1)
    n = np.arange(n0, n1 + 1)
    c = C[np.ix_(m % M1, n % M2)]
    if noise_floor is not None:
        c = np.where(np.abs(c) > noise_floor * np.finfo(float).eps * np.max(np.abs(H)), c, 0)
    c = c * (float(rho1) ** -m.astype(float))[:, None] * (float(rho2) ** -n.astype(float))[None, :]
    h = HereditarySeries(m0, n0, c)
    if not full_output:
        return h
    lam, mu = torus_grid(rho1, rho2, M1, M2)
    residual = float(np.max(np.abs(h(lam, mu) - H)))
    return h, residual


def hereditary_expand(func, annulus, box=HEREDITARY_BOX, tol=HEREDITARY_TOL, max_box=128,
                      rho=None, noise_floor=NOISE_FLOOR):
    """Truncated double-Laurent expansion of a callable ``func(lambda, mu)``.

    Samples on the torus ``|lambda| = |mu| = rho`` (default: geometric-mean
    radius), starting from the box ``[-box, box]^2`` and doubling while the
    on-grid residual exceeds `tol`. Returns ``(series, residual, box)``.
    """
    rho = annulus.center_radius if rho is None else rho
    while True:
        M = 2 * (2 * box + 1)
        lam, mu = torus_grid(rho, rho, M, M)
        h, res = hereditary_from_samples(func(lam, mu), rho, rho, (-box, box), (-box, box),
                                         full_output=True, noise_floor=noise_floor)
        if res <= tol or 2 * box > max_box:
            return h, res, box
        box *= 2


def hereditary_error_bound(h, T, residual, rho1, rho2, sample_max=1.0):
    """Bound on ``||h(T) - h_true(T)||`` from coefficient errors of a recovered series.

    Each retained coefficient is off by at most ``max(residual, eps * sample_max)``
    times ``rho1^-m rho2^-n``; the errors are propagated through
    ``||T^m|| ||(T^*)^n||``.
    """
    T = as_operator(T)
    err = max(residual, np.finfo(float).eps * sample_max)
    # ||(T^*)^n|| = ||T^n||
    P = _matrix_powers(T, min(h.m_min, h.n_min), max(h.m_max, h.n_max))
    pn = {k: np.linalg.norm(v, 2) for k, v in P.items()}
    total = 0.0
    for i, j in zip(*np.nonzero(h.coeffs)):
        m, n = h.m_min + i, h.n_min + j
        total += pn[m] * pn[n] * float(rho1) ** -float(m) * float(rho2) ** -float(n)
    return err * total


def model_formula_check(phi, T, r, box=32, rho=None, noise_floor=NOISE_FLOOR):
    """Desk-scale check of ``1 - phi(T) phi(T)^* = h(T) / (1 - r^2)``.

    Here ``h = U * (1 + r^2 - r^2/(l conj m) - l conj m)`` with
    ``U = (1 - phi(l) conj(phi(m))) k_{A_r}(l, m)``, sampled on a torus grid
    and expanded on ``[-box, box]^2``. Meaningful for ``phi`` with multiplier
    norm at most 1 and ``T`` in F_r. Returns a dict with the operator
    difference, the on-grid truncation residual and the propagated error
    bound.
    """
    A = Annulus.standard(r)
    kind = KernelKind.annulus(r)
    rho = A.center_radius if rho is None else rho
    M = 2 * (2 * box + 1)
    lam, mu = torus_grid(rho, rho, M, M)
    w = lam * mu.conj()
    H = (1 - evaluate(phi, lam) * evaluate(phi, mu).conj()) * kind._planar(w) * (1 + r * r - r * r / w - w)
    h, res = hereditary_from_samples(H, rho, rho, (-box, box), (-box, box), full_output=True,
                                     noise_floor=noise_floor)
    F = apply_function(phi, T, A)
    lhs = np.eye(len(F)) - F @ adjoint(F)
    rhs = apply_hereditary(h, T, A) / (1 - r * r)
    bound = hereditary_error_bound(h, T, res, rho, rho, float(np.max(np.abs(H)))) / (1 - r * r)
    return {"difference": float(np.linalg.norm(lhs - rhs, 2)), "grid_residual": res,
            "error_bound": float(bound), "box": box, "nonzero_coeffs": int(np.count_nonzero(h.coeffs))}


@dataclass
class PsdFactorization:
    """Finite-grid surrogate of a dyadic kernel decomposition.

    ``factors[i]`` holds ``f_i`` sampled on the grid, so the kernel matrix is
    approximately ``sum_i outer(f_i, conj(f_i))``.
    """

    factors: np.ndarray
    eigenvalues: np.ndarray
    dropped_mass: float
    residual: float
    grid: np.ndarray = field(default=None)

    @property
    def rank(self):
        return len(self.factors)

    def reconstruct(self):
        if self.rank == 0:
            n = 0 if self.grid is None else len(self.grid)
            return np.zeros((n, n), dtype=complex)
        return self.factors.T @ self.factors.conj()


def factor_psd(G, tol=PSD_TOL, grid=None):
    """Factor a Hermitian PSD matrix as ``sum_i f_i f_i^*``.

    Eigenpairs with eigenvalue above ``tol * trace`` are kept as factors
    ``sqrt(eig) * vec``; the magnitude of the discarded eigenvalues is
    reported as ``dropped_mass``. A matrix with an eigenvalue below
    ``-tol * trace`` is rejected.
    """
    G = hermitize(np.asarray(G, dtype=complex))
    w, V = np.linalg.eigh(G)
    thresh = tol * max(float(np.real(np.trace(G))), 0.0)
    if len(w) and w[0] < -max(thresh, tol):
        raise NotPSDError(f"matrix is not PSD: min eigenvalue {w[0]:.3g}")
    keep = w > thresh
    F = (V[:, keep] * np.sqrt(w[keep])[None, :]).T
    dropped = float(np.sum(np.abs(w[~keep])))
    recon = F.T @ F.conj() if len(F) else np.zeros_like(G)
    resid = float(np.linalg.norm(recon - G, "fro"))
    return PsdFactorization(F, w[keep], dropped, resid, None if grid is None else np.asarray(grid))


def model_matrix(phi, C, r, points):
    """``M[i, j] = (C^2 - phi(z_i) conj(phi(z_j))) k_{A_r}(z_i, z_j)``."""
    z = KernelKind.annulus(r).check_points(points)
    K = KernelKind.annulus(r).matrix(z)
    v = evaluate(phi, z)
    return (C * C - np.outer(v, v.conj())) * K


def model_kernel_check(phi, C, r, points, tol=PSD_TOL):
    """Minimal eigenvalue and PSD verdict of the model matrix for bound ``C``."""
    M = hermitize(model_matrix(phi, C, r, points))
    lo = float(np.linalg.eigvalsh(M)[0])
    return lo, lo >= -tol * max(1.0, float(np.real(np.trace(M))))
