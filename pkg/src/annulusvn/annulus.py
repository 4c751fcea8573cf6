"""Annulus geometry, reproducing kernels and Gram matrices.

Kernels are evaluated in closed form:

* ``annulus(r)``: ``k(l, m) = (1 - r^2) / ((1 - l conj(m)) (1 - r^2 / (l conj(m))))``
  on ``{r < |z| < 1}``, the kernel of the re-weighted Hardy space.
* ``annulus_general(a, b)``: ``1 / ((1 - a^2 / (l conj(m))) (1 - l conj(m) / b^2))``
  on ``{a < |z| < b}``. With ``a = r + 1/n`` and ``b = 1 - 1/n`` this is the
  rescaled family used to approximate the annulus from inside.
* ``drury_arveson_2``: ``1 / (1 - <l, m>)`` on the unit ball of C^2.
* ``bidisk``: ``1 / ((1 - l1 conj(m1)) (1 - l2 conj(m2)))`` on the bidisk.
"""

import math
import re
import warnings
from dataclasses import dataclass

import numpy as np

from ._linalg import PSD_TOL, DomainError, is_psd, min_eig

DIAG_WARN = 1e8


class ConditioningWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Annulus:
    rho_in: float
    rho_out: float = 1.0

    def __post_init__(self):
        if not 0 < self.rho_in < self.rho_out:
            raise DomainError(f"need 0 < rho_in < rho_out, got {self.rho_in}, {self.rho_out}")

    @classmethod
    def standard(cls, r):
        """The annulus ``{r < |z| < 1}``."""
        if not 0 < r < 1:
            raise DomainError(f"r must lie in (0, 1), got {r}")
        return cls(float(r), 1.0)

    @classmethod
    def rescaled(cls, r, n):
        """``{r + 1/n < |z| < 1 - 1/n}``, defined for ``n > 2 / (1 - r)``."""
        if not n > 2.0 / (1.0 - r):
            raise DomainError(f"n must exceed 2/(1-r) = {2.0 / (1.0 - r):.6g}, got {n}")
        return cls(r + 1.0 / n, 1.0 - 1.0 / n)

    def contains(self, z):
        """Strict containment; works elementwise on arrays."""
        a = np.abs(z)
        out = (a > self.rho_in) & (a < self.rho_out)
        return bool(out) if np.ndim(out) == 0 else out

    @property
    def center_radius(self):
        return math.sqrt(self.rho_in * self.rho_out)

    def margin(self, z):
        """Distance of ``|z|`` to the nearer boundary circle (negative outside)."""
        a = np.abs(z)
        return np.minimum(a - self.rho_in, self.rho_out - a)


def contains(a, z):
    return a.contains(z)


@dataclass(frozen=True)
class KernelKind:
    tag: str
    params: tuple = ()

    @classmethod
    def annulus(cls, r):
        Annulus.standard(r)
        return cls("annulus", (float(r),))

    @classmethod
    def annulus_general(cls, rho_in, rho_out):
        Annulus(rho_in, rho_out)
        return cls("annulus_general", (float(rho_in), float(rho_out)))

    @classmethod
    def drury_arveson_2(cls):
        return cls("drury_arveson_2")

    @classmethod
    def bidisk(cls):
        return cls("bidisk")

    @classmethod
    def parse(cls, text):
        """Parse the tagged string form, e.g. ``"annulus(0.5)"`` or ``"bidisk"``."""
        m = re.fullmatch(r"\s*([a-z_0-9]+)\s*(?:\(([^)]*)\))?\s*", text)
        if not m:
            raise ValueError(f"cannot parse kernel kind {text!r}")
        tag, args = m.group(1), m.group(2)
        params = tuple(float(x) for x in args.split(",")) if args else ()
        ctor = {"annulus": cls.annulus, "annulus_general": cls.annulus_general,
                "drury_arveson_2": cls.drury_arveson_2, "bidisk": cls.bidisk}.get(tag)
        if ctor is None:
            raise ValueError(f"unknown kernel kind {tag!r}")
        return ctor(*params)

    def __str__(self):
        if not self.params:
            return self.tag
        return f"{self.tag}({','.join(repr(p) for p in self.params)})"

    def _planar(self, w):
        # w = lam * conj(mu)
        if self.tag == "annulus":
            r2 = self.params[0] ** 2
            return (1 - r2) / ((1 - w) * (1 - r2 / w))
        a, b = self.params
        return 1.0 / ((1 - a * a / w) * (1 - w / (b * b)))

    @property
    def is_planar(self):
        return self.tag in ("annulus", "annulus_general")

    @property
    def domain(self):
        if self.tag == "annulus":
            return Annulus.standard(self.params[0])
        if self.tag == "annulus_general":
            return Annulus(*self.params)
        return None

    def check_points(self, points):
        """Validate and normalize points; planar kinds give shape (n,), others (n, 2)."""
        pts = np.asarray(points, dtype=complex)
        if self.is_planar:
            pts = pts.reshape(-1)
            if not np.all(self.domain.contains(pts)):
                raise DomainError(f"points outside {self.domain}")
            return pts
        pts = pts.reshape(-1, 2)
        mod2 = np.abs(pts) ** 2
        if self.tag == "drury_arveson_2":
            ok = mod2.sum(axis=1) < 1
        else:
            ok = np.all(mod2 < 1, axis=1)
        if not np.all(ok):
            raise DomainError(f"points outside the {self.tag} domain")
        return pts

    def matrix(self, X, Y=None):
        """Kernel matrix ``K[i, j] = k(X[i], Y[j])`` for validated point arrays."""
        X = self.check_points(X)
        Y = X if Y is None else self.check_points(Y)
        if self.is_planar:
            return self._planar(X[:, None] * Y.conj()[None, :])
        if self.tag == "drury_arveson_2":
            return 1.0 / (1 - X @ Y.conj().T)
        return 1.0 / ((1 - np.outer(X[:, 0], Y[:, 0].conj()))
                      * (1 - np.outer(X[:, 1], Y[:, 1].conj())))


def kernel_eval(kind, lam, mu):
    """Value of the kernel at a single pair of points."""
    return complex(kind.matrix([lam], [mu])[0, 0])


def embed_b(r, lam):
    """The ball embedding ``l -> (l, r / l) / sqrt(r^2 + 1)`` of the annulus.

    Accepts a scalar or an array of points; returns shape (2,) or (n, 2).
    """
    a = Annulus.standard(r)
    z = np.asarray(lam, dtype=complex)
    if not np.all(a.contains(z)):
        raise DomainError(f"point(s) outside A_{r}")
    s = math.sqrt(r * r + 1)
    return np.stack([z / s, (r / s) / z], axis=-1)


def bidisk_lift(r, lam):
    """``l -> (l, r / l)``, mapping the annulus into the bidisk."""
    a = Annulus.standard(r)
    z = np.asarray(lam, dtype=complex)
    if not np.all(a.contains(z)):
        raise DomainError(f"point(s) outside A_{r}")
    return np.stack([z, r / z], axis=-1)


def gram(kind, points):
    """Gram matrix of `kind` at `points`.

    Emits a :class:`ConditioningWarning` when the diagonal exceeds 1e8; the
    matrix is still returned.
    """
    pts = kind.check_points(points)
    if len(pts) == 0:
        raise ValueError("gram needs at least one point")
    G = kind.matrix(pts)
    diag_max = float(np.max(np.real(np.diag(G))))
    if diag_max > DIAG_WARN:
        warnings.warn(f"Gram diagonal reaches {diag_max:.3g}; points are close to the boundary",
                      ConditioningWarning, stacklevel=2)
    return G


def gram_diagnostics(G, tol=PSD_TOL):
    G = np.asarray(G)
    diag = np.real(np.diag(G))
    return {
        "size": int(len(G)),
        "max_diag": float(diag.max()),
        "min_eig": min_eig(G),
        "psd": bool(is_psd(G, tol)),
        "cond": float(np.linalg.cond(G)),
        "near_boundary": bool(diag.max() > DIAG_WARN),
    }


def verify_kernel_identities(r, samples, relative=False):
    """Residuals of the two pull-back identities for the annulus kernel.

    Compares ``k_{A_r}(l, m)`` with ``(1 - r^2)/(1 + r^2) * a_2(b_r(l), b_r(m))``
    and with ``(1 - r^2) * s_2((l, r/l), (m, r/m))`` over sample pairs; returns
    the two maximal absolute differences (divided by ``|k_{A_r}|`` when
    `relative`). Absolute rounding grows like ``eps * |k|^2`` near the
    boundary circles.
    """
    pairs = np.asarray(samples, dtype=complex).reshape(-1, 2)
    if len(pairs) == 0:
        return 0.0, 0.0
    lam, mu = pairs[:, 0], pairs[:, 1]
    k = KernelKind.annulus(r)
    lhs = pairwise(k, lam, mu)
    bl, bm = embed_b(r, lam), embed_b(r, mu)
    da = 1.0 / (1 - np.sum(bl * bm.conj(), axis=1))
    sl, sm = bidisk_lift(r, lam), bidisk_lift(r, mu)
    s2 = 1.0 / ((1 - sl[:, 0] * sm[:, 0].conj()) * (1 - sl[:, 1] * sm[:, 1].conj()))
    scale = np.abs(lhs) if relative else 1.0
    res_da = np.max(np.abs(lhs - (1 - r * r) / (1 + r * r) * da) / scale)
    res_s2 = np.max(np.abs(lhs - (1 - r * r) * s2) / scale)
    return float(res_da), float(res_s2)


def pairwise(kind, lam, mu):
    """``k(lam[i], mu[i])`` elementwise for planar kernels."""
    lam, mu = kind.check_points(lam), kind.check_points(mu)
    return kind._planar(lam * mu.conj())


def random_points(rng, a, n, margin=0.0):
    """Points area-uniform in ``{rho_in + margin < |z| < rho_out - margin}``."""
    lo, hi = a.rho_in + margin, a.rho_out - margin
    rad = np.sqrt(rng.uniform(lo * lo, hi * hi, size=n))
    return rad * np.exp(2j * np.pi * rng.uniform(size=n))


def polar_grid(a, n_radii=3, n_angles=12, offset=0.0):
    """Product grid: geometrically spaced radii strictly inside `a`, equispaced angles."""
    t = (np.arange(n_radii) + 1) / (n_radii + 1)
    radii = a.rho_in * (a.rho_out / a.rho_in) ** t
    ang = 2 * np.pi * (np.arange(n_angles) + offset) / n_angles
    return (radii[:, None] * np.exp(1j * ang)[None, :]).ravel()
