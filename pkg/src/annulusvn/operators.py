"""Finite matrices standing in for operators in the class F_r.

``T`` belongs to F_r when its defect ``(r^2 + 1) I - r^2 T^{-1} T^{-*} - T T^*``
is positive semidefinite and its spectrum lies in ``{r < |z| < 1}``.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.stats import unitary_group

from ._linalg import COND_MAX, DomainError, IllConditionedError, hermitize
from .annulus import Annulus

SPECTRAL_MARGIN = 0.02
MAX_HALVINGS = 60


def as_operator(T):
    """Validate a square finite complex matrix."""
    T = np.array(T, dtype=complex)
    if T.ndim == 0:
        T = T.reshape(1, 1)
    if T.ndim != 2 or T.shape[0] != T.shape[1] or T.shape[0] == 0:
        raise ValueError(f"operator must be a non-empty square matrix, got shape {T.shape}")
    if not np.all(np.isfinite(T)):
        raise ValueError("operator has non-finite entries")
    return T


def adjoint(T):
    return T.conj().T


def spectrum(T):
    T = as_operator(T)
    try:
        return np.linalg.eigvals(T)
    except np.linalg.LinAlgError as exc:
        raise RuntimeError(f"eigenvalue solver failed: {exc}") from exc


def op_norm(T):
    return float(np.linalg.norm(as_operator(T), 2))


def inverse(T):
    """``T^{-1}`` by a linear solve; raises when ``cond(T) > 1e12``."""
    T = as_operator(T)
    cond = np.linalg.cond(T)
    if not np.isfinite(cond) or cond > COND_MAX:
        raise IllConditionedError(f"operator is numerically singular (cond = {cond:.3g})", cond)
    return scipy.linalg.solve(T, np.eye(len(T), dtype=complex))


def defect(T, r):
    """Hermitian defect ``(r^2 + 1) I - r^2 T^{-1} (T^{-1})^* - T T^*``."""
    T = as_operator(T)
    Ti = inverse(T)
    D = (r * r + 1) * np.eye(len(T)) - r * r * Ti @ adjoint(Ti) - T @ adjoint(T)
    return hermitize(D)


def membership_tol(r, tol):
    return tol * (r * r + 1)


@dataclass
class MembershipReport:
    is_member: bool
    defect_min_eig: float
    spectrum: np.ndarray
    spectral_margin: float
    tt_bounds: tuple
    singular: bool = False
    cond: float = float("nan")

    def to_dict(self):
        return {
            "is_member": self.is_member,
            "defect_min_eig": self.defect_min_eig,
            "spectrum": [[float(z.real), float(z.imag)] for z in self.spectrum],
            "spectral_margin": self.spectral_margin,
            "tt_bounds": list(self.tt_bounds),
            "singular": self.singular,
            "cond": self.cond,
        }


def check_membership(T, r, tol=1e-10):
    """Certify (or refute) ``T`` in F_r.

    The defect counts as PSD when its smallest eigenvalue is at least
    ``-tol * (r^2 + 1)``; every eigenvalue of ``T`` must lie strictly inside
    the annulus. ``tt_bounds`` holds the extreme eigenvalues of ``T T^*``.
    """
    T = as_operator(T)
    A = Annulus.standard(r)
    spec = spectrum(T)
    margin = float(np.min(A.margin(spec)))
    tt = np.linalg.eigvalsh(hermitize(T @ adjoint(T)))
    bounds = (float(tt[0]), float(tt[-1]))
    cond = float(np.linalg.cond(T))
    try:
        D = defect(T, r)
    except IllConditionedError:
        return MembershipReport(False, float("-inf"), spec, margin, bounds, singular=True, cond=cond)
    dmin = float(np.linalg.eigvalsh(D)[0])
    ok = dmin >= -membership_tol(r, tol) and bool(np.all(A.contains(spec)))
    return MembershipReport(ok, dmin, spec, margin, bounds, cond=cond)


def nonnormality(T):
    return float(np.linalg.norm(T @ adjoint(T) - adjoint(T) @ T, 2))


@dataclass
class MemberSample:
    T: np.ndarray
    strategy: str
    seed: int
    perturbation_scale: float = 0.0
    halvings: int = 0
    fell_back: bool = False
    nonnormality: float = 0.0
    eigenvalues: np.ndarray = field(default=None, repr=False)

    def metadata(self):
        return {"strategy": self.strategy, "seed": self.seed, "dim": int(len(self.T)),
                "perturbation_scale": self.perturbation_scale, "halvings": self.halvings,
                "fell_back": self.fell_back, "nonnormality": self.nonnormality}


def random_unitary(rng, dim):
    if dim == 1:
        return np.exp(2j * np.pi * rng.uniform()).reshape(1, 1)
    return unitary_group.rvs(dim, random_state=rng)


def sample_member(r, dim, strategy="normal", seed=0):
    """Draw a member of F_r of size ``dim``; a pure function of its arguments.

    ``normal``: ``U diag(l) U^*`` with eigenvalues area-uniform in
    ``{r + d < |z| < 1 - d}``, ``d = 0.02 (1 - r)``. ``perturbed``: adds a
    strictly upper triangular term in the same unitary frame (eigenvalues are
    unchanged) and halves it until the membership check passes.
    """
    if dim < 1:
        raise ValueError("dim must be at least 1")
    if strategy not in ("normal", "perturbed"):
        raise ValueError(f"unknown strategy {strategy!r}")
    A = Annulus.standard(r)
    rng = np.random.default_rng(seed)
    d = SPECTRAL_MARGIN * (1 - r)
    lo, hi = A.rho_in + d, A.rho_out - d
    lam = np.sqrt(rng.uniform(lo * lo, hi * hi, size=dim)) * np.exp(2j * np.pi * rng.uniform(size=dim))
    U = random_unitary(rng, dim)
    T0 = U @ np.diag(lam) @ adjoint(U)
    sample = MemberSample(T0, strategy, seed, eigenvalues=lam)
    if strategy == "normal" or dim == 1:
        sample.nonnormality = nonnormality(T0)
        return sample
    N = np.triu(rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim)), k=1)
    N = U @ N @ adjoint(U)
    s = 1.0 / max(np.linalg.norm(N, 2), 1e-300)
    for k in range(MAX_HALVINGS + 1):
        T = T0 + s * N
        if check_membership(T, r).is_member:
            sample.T, sample.perturbation_scale, sample.halvings = T, s, k
            sample.nonnormality = nonnormality(T)
            return sample
        s *= 0.5
    sample.fell_back = True
    sample.nonnormality = nonnormality(T0)
    return sample


def counterexample(r):
    """The 2x2 matrix ``[[sqrt r, 1 - r], [0, sqrt r]]``.

    Both ``||A||`` and ``||r A^{-1}||`` equal 1, yet the defect quadratic form
    at ``(1, sqrt r)`` is negative, so ``r^2 <= A A^* <= 1`` does not imply
    membership. Returns ``(A, ||A||, ||r A^{-1}||, quad_form)``.
    """
    if not 0 < r < 1:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    s = math.sqrt(r)
    A = np.array([[s, 1 - r], [0, s]], dtype=complex)
    v = np.array([1, s], dtype=complex)
    q = float(np.real(v.conj() @ defect(A, r) @ v))
    return A, op_norm(A), op_norm(r * inverse(A)), q


def counterexample_formula(r):
    return r * r * (r + 1 - 1 / r - (2 - 1 / r) ** 2)
