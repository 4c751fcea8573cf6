"""Finitely supported Laurent polynomials ``phi(z) = sum_n a_n z^n``."""

import math
from dataclasses import dataclass, field

import numpy as np

from ._linalg import DomainError

SUP_SAMPLES = 4096
SUP_REFINE_STEPS = 40


@dataclass(frozen=True, eq=False)
class LaurentPoly:
    """Coefficients ``coeffs[k]`` of ``z^(n_min + k)``.

    Stored in canonical form: leading and trailing zero coefficients are
    trimmed, and the zero polynomial has empty support with ``n_min = 0``.
    """

    n_min: int = 0
    coeffs: np.ndarray = field(default_factory=lambda: np.zeros(0, dtype=complex))

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if not np.all(np.isfinite(c)):
            raise ValueError("coefficients must be finite")
        nz = np.flatnonzero(c)
        if len(nz) == 0:
            n_min, c = 0, np.zeros(0, dtype=complex)
        else:
            n_min, c = int(self.n_min) + int(nz[0]), c[nz[0]:nz[-1] + 1]
        c.setflags(write=False)
        object.__setattr__(self, "n_min", n_min)
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def from_dict(cls, mapping):
        """Build from ``{n: a_n}``."""
        if not mapping:
            return cls()
        lo, hi = min(mapping), max(mapping)
        c = np.zeros(hi - lo + 1, dtype=complex)
        for n, a in mapping.items():
            c[n - lo] += a
        return cls(lo, c)

    @classmethod
    def monomial(cls, n, a=1.0):
        return cls(n, [a])

    @classmethod
    def constant(cls, c):
        return cls(0, [c])

    @property
    def n_max(self):
        return self.n_min + len(self.coeffs) - 1

    @property
    def is_zero(self):
        return len(self.coeffs) == 0

    @property
    def span(self):
        """``n_max - n_min`` (zero for monomials and the zero polynomial)."""
        return 0 if self.is_zero else self.n_max - self.n_min

    @property
    def bandwidth(self):
        """Largest ``|n|`` in the support."""
        return 0 if self.is_zero else max(abs(self.n_min), abs(self.n_max))

    def coeff(self, n):
        k = n - self.n_min
        if self.is_zero or k < 0 or k >= len(self.coeffs):
            return 0j
        return complex(self.coeffs[k])

    def items(self):
        return [(self.n_min + k, complex(a)) for k, a in enumerate(self.coeffs)]

    def __call__(self, z):
        return evaluate(self, z)

    def __eq__(self, other):
        if not isinstance(other, LaurentPoly):
            return NotImplemented
        return self.n_min == other.n_min and np.array_equal(self.coeffs, other.coeffs)

    def __hash__(self):
        return hash((self.n_min, self.coeffs.tobytes()))

    def __repr__(self):
        terms = " + ".join(f"({a:.6g})z^{n}" for n, a in self.items()) or "0"
        return f"LaurentPoly({terms})"

    def __add__(self, other):
        if not isinstance(other, LaurentPoly):
            other = LaurentPoly.constant(other)
        return add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return scale(self, -1)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, LaurentPoly):
            return multiply(self, other)
        return scale(self, other)

    __rmul__ = __mul__

    def conj_reflect(self):
        """``z -> conj(phi(conj(z)))``: conjugate the coefficients."""
        return LaurentPoly(self.n_min, self.coeffs.conj())

    def close_to(self, other, atol):
        lo = min(self.n_min, other.n_min)
        hi = max(self.n_max, other.n_max)
        return all(abs(self.coeff(n) - other.coeff(n)) <= atol for n in range(lo, hi + 1))


def evaluate(phi, z):
    """``sum a_n z^n`` by Horner's rule on the nonnegative and negative parts."""
    z = np.asarray(z, dtype=complex)
    if phi.is_zero:
        return np.zeros_like(z) if z.ndim else 0j
    if phi.n_min < 0 and np.any(z == 0):
        raise DomainError("cannot evaluate negative powers at z = 0")
    out = np.zeros_like(z)
    if phi.n_max >= 0:
        for n in range(phi.n_max, max(phi.n_min, 0) - 1, -1):
            out = out * z + phi.coeff(n)
        if phi.n_min > 0:
            out = out * z ** phi.n_min
    if phi.n_min < 0:
        w = 1 / z
        neg = np.zeros_like(z)
        for n in range(phi.n_min, min(phi.n_max, -1) + 1):
            neg = neg * w + phi.coeff(n)
        # Horner on w leaves one factor of w for the highest negative power -1
        if phi.n_max < -1:
            neg = neg * w ** (-1 - phi.n_max)
        out = out + neg * w
    return complex(out) if out.ndim == 0 else out


def add(p, q):
    if p.is_zero:
        return q
    if q.is_zero:
        return p
    lo, hi = min(p.n_min, q.n_min), max(p.n_max, q.n_max)
    c = np.zeros(hi - lo + 1, dtype=complex)
    c[p.n_min - lo:p.n_max - lo + 1] += p.coeffs
    c[q.n_min - lo:q.n_max - lo + 1] += q.coeffs
    return LaurentPoly(lo, c)


def scale(p, s):
    return LaurentPoly(p.n_min, complex(s) * p.coeffs)


def multiply(p, q):
    if p.is_zero or q.is_zero:
        return LaurentPoly()
    return LaurentPoly(p.n_min + q.n_min, np.convolve(p.coeffs, q.coeffs))


def arith(op, *operands):
    """Dispatch ``add`` / ``scale`` / ``multiply`` by name."""
    if op == "add":
        out = LaurentPoly()
        for p in operands:
            out = add(out, p)
        return out
    if op == "scale":
        p, s = operands
        return scale(p, s)
    if op == "multiply":
        out = LaurentPoly.constant(1)
        for p in operands:
            out = multiply(out, p)
        return out
    raise ValueError(f"unknown operation {op!r}")


def circle_points(rho, M):
    return rho * np.exp(2j * np.pi * np.arange(M) / M)


def coeffs_from_samples(samples, rho, n_min, n_max):
    """Recover ``a_n`` for ``n_min <= n <= n_max`` from ``M`` equispaced samples.

    ``samples[k] = f(rho * exp(2 pi i k / M))``. The recovery is exact for
    Laurent polynomials supported in the band provided ``M > n_max - n_min``.
    """
    f = np.asarray(samples, dtype=complex).reshape(-1)
    M = len(f)
    if n_max < n_min:
        raise ValueError("empty band")
    if M <= n_max - n_min:
        raise ValueError(f"{M} samples alias a band of width {n_max - n_min + 1}")
    F = np.fft.fft(f) / M
    n = np.arange(n_min, n_max + 1)
    return LaurentPoly(n_min, F[n % M] * float(rho) ** (-n.astype(float)))


def _refine_max(phi, rho, theta0, h, steps):
    lo, hi = theta0 - h, theta0 + h
    g = lambda t: abs(evaluate(phi, rho * np.exp(1j * t)))
    for _ in range(steps):
        m1, m2 = lo + (hi - lo) / 3, hi - (hi - lo) / 3
        if g(m1) < g(m2):
            lo = m1
        else:
            hi = m2
    return max(g(0.5 * (lo + hi)), g(theta0))


def sup_norm(phi, annulus, samples_per_circle=SUP_SAMPLES, refine_steps=SUP_REFINE_STEPS,
             n_candidates=3):
    """``max |phi|`` over the closed annulus, attained on the boundary circles.

    Each circle is sampled densely and the best few samples are polished by
    ternary search over one grid cell on either side.
    """
    if samples_per_circle < 256:
        raise ValueError("samples_per_circle must be at least 256")
    if phi.is_zero:
        return 0.0
    if phi.span == 0:
        n, a = phi.items()[0]
        return abs(a) * max(annulus.rho_in ** n, annulus.rho_out ** n)
    M = samples_per_circle
    h = 2 * np.pi / M
    theta = h * np.arange(M)
    best = 0.0
    for rho in (annulus.rho_in, annulus.rho_out):
        vals = np.abs(evaluate(phi, rho * np.exp(1j * theta)))
        for k in np.argsort(vals)[-n_candidates:]:
            best = max(best, _refine_max(phi, rho, theta[k], h, refine_steps))
    return float(best)


def norms(phi, r):
    """``(||phi||_{H^2}, ||phi||_{script H^2})`` of the annulus ``{r < |z| < 1}``.

    ``H^2``: ``sum (r^{2n} + 1) |a_n|^2``; re-weighted space: ``r^{2n}`` weights
    for ``n <= -1`` and unit weights for ``n >= 0``.
    """
    if not 0 < r < 1:
        raise DomainError(f"r must lie in (0, 1), got {r}")
    if phi.is_zero:
        return 0.0, 0.0
    n = np.arange(phi.n_min, phi.n_max + 1).astype(float)
    a2 = np.abs(phi.coeffs) ** 2
    rn = r ** (2 * n)
    h2 = math.sqrt(float(np.sum((rn + 1) * a2)))
    sh2 = math.sqrt(float(np.sum(np.where(n < 0, rn, 1.0) * a2)))
    return h2, sh2


def g_family(r, n):
    """``g_n(z) = r^n / z^n + z^n``, the extremal sequence for the constant sqrt(2)."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return LaurentPoly.from_dict({-n: r ** n, n: 1.0})


def random_laurent(rng, r, max_bandwidth=10, normalized=True):
    """Random symbol with support inside ``[-max_bandwidth, max_bandwidth]``.

    With `normalized`, the coefficient of ``z^n`` is scaled so each monomial
    term has unit sup norm on the annulus ``{r < |z| < 1}``.
    """
    lo = int(rng.integers(-max_bandwidth, max_bandwidth + 1))
    hi = int(rng.integers(-max_bandwidth, max_bandwidth + 1))
    lo, hi = min(lo, hi), max(lo, hi)
    n = np.arange(lo, hi + 1)
    c = rng.standard_normal(len(n)) + 1j * rng.standard_normal(len(n))
    if normalized:
        c = c * np.where(n < 0, float(r) ** np.abs(n).astype(float), 1.0)
    return LaurentPoly(lo, c)
