"""Small dense linear-algebra helpers shared across modules."""

import numpy as np
import scipy.linalg

PSD_TOL = 1e-10
COND_MAX = 1e12


class DomainError(ValueError):
    """A point or operator lies outside the domain an operation requires."""


class IllConditionedError(ValueError):
    """A matrix is too close to singular for the requested solve."""

    def __init__(self, message, cond=None):
        super().__init__(message)
        self.cond = cond


def hermitize(A):
    return 0.5 * (A + A.conj().T)


def min_eig(H):
    """Smallest eigenvalue of the Hermitian part of `H`."""
    H = np.atleast_2d(np.asarray(H, dtype=complex))
    if H.size == 0:
        return 0.0
    return float(np.linalg.eigvalsh(hermitize(H))[0])


def psd_threshold(H, tol=PSD_TOL):
    return tol * max(1.0, float(np.real(np.trace(H))))


def is_psd(H, tol=PSD_TOL):
    """PSD up to a trace-scaled tolerance: ``min eig >= -tol * max(1, trace)``."""
    return min_eig(H) >= -psd_threshold(H, tol)


def factor_gram(G):
    """Cholesky factor of a Hermitian positive definite matrix.

    Falls back to adding ``1e-12 * trace`` to the diagonal when the plain
    factorization fails. Returns ``(L, jitter)``.
    """
    G = hermitize(np.asarray(G, dtype=complex))
    try:
        return scipy.linalg.cholesky(G, lower=True), 0.0
    except np.linalg.LinAlgError:
        jitter = 1e-12 * float(np.real(np.trace(G)))
        L = scipy.linalg.cholesky(G + jitter * np.eye(len(G)), lower=True)
        return L, jitter


def pick_norm(K, w, tol=1e-10, lo=None, hi=None, return_info=False):
    """Smallest ``C`` with ``[(C^2 - w_i conj(w_j)) K_ij]`` positive semidefinite.

    ``K`` must be positive definite. The condition is tested on the whitened
    matrix ``C^2 I - L^{-1} D K D^* L^{-*}`` (``K = L L^*``, ``D = diag(w)``)
    so the PSD decision does not depend on the scale of ``K``; ``C`` is then
    found by bisection to absolute accuracy `tol`.
    """
    K = np.asarray(K, dtype=complex)
    w = np.asarray(w, dtype=complex).ravel()
    L, jitter = factor_gram(K)
    X = scipy.linalg.solve_triangular(L, w[:, None] * K, lower=True)
    B = hermitize(scipy.linalg.solve_triangular(L, (X * w.conj()[None, :]).conj().T,
                                                lower=True).conj().T)
    scale = max(1.0, float(np.max(np.abs(w))) ** 2)

    def feasible(C):
        return np.linalg.eigvalsh(C * C * np.eye(len(w)) - B)[0] >= -PSD_TOL * scale

    lo = float(np.max(np.abs(w))) if lo is None else float(lo)
    if hi is None:
        hi = max(lo, 1.0)
        while not feasible(hi):
            hi *= 2.0
    hi = float(hi)
    if not feasible(hi):
        raise ValueError("upper bisection bracket is not feasible")
    lo = min(lo, hi)
    n_steps = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if feasible(mid):
            hi = mid
        else:
            lo = mid
        n_steps += 1
    if return_info:
        return hi, {"jitter": jitter, "bisection_steps": n_steps,
                    "margin": float(np.linalg.eigvalsh(hi * hi * np.eye(len(w)) - B)[0])}
    return hi
