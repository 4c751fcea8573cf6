"""Finite Pick problems on the embedded annulus in the unit ball of C^2.

The annulus kernel is a constant multiple of the Drury-Arveson kernel pulled
back along ``b_r``, so the two-dimensional Drury-Arveson Pick matrix at the
nodes ``b_r(z_i)`` decides the same bounds as the annulus Pick matrix.
"""

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from ._linalg import COND_MAX, DomainError, IllConditionedError, factor_gram, pick_norm
from .annulus import Annulus, KernelKind, bidisk_lift, embed_b, polar_grid
from .laurent import evaluate, sup_norm


@dataclass
class PickProblem:
    r: float
    nodes: np.ndarray
    targets: np.ndarray
    embedded: np.ndarray = field(init=False)

    def __post_init__(self):
        self.nodes = np.asarray(self.nodes, dtype=complex).reshape(-1)
        self.targets = np.asarray(self.targets, dtype=complex).reshape(-1)
        if len(self.nodes) != len(self.targets):
            raise ValueError("nodes and targets must have equal length")
        if len(self.nodes) == 0:
            raise ValueError("a Pick problem needs at least one node")
        if len(np.unique(self.nodes)) != len(self.nodes):
            raise DomainError("nodes must be pairwise distinct")
        self.embedded = embed_b(self.r, self.nodes).reshape(-1, 2)

    @classmethod
    def from_symbol(cls, phi, r, nodes):
        nodes = np.asarray(nodes, dtype=complex).reshape(-1)
        return cls(r, nodes, evaluate(phi, nodes))


def default_nodes(r, n_radii=3, n_angles=8):
    return polar_grid(Annulus.standard(r), n_radii, n_angles)


def min_extension_norm(p, tol=1e-10, full_output=False):
    """Smallest ``C`` with ``[(C^2 - w_i conj(w_j)) a_2(b_i, b_j)]`` PSD.

    Bisection between ``max |w_i|`` and a doubling upper bracket.
    """
    K = KernelKind.drury_arveson_2().matrix(p.embedded)
    C, info = pick_norm(K, p.targets, tol=tol, return_info=True)
    return (C, info) if full_output else C


def min_norm_interpolant(kind, points, values):
    """Norm ``sqrt(w^* G^{-1} w)`` of the least-norm interpolant in the kernel's space."""
    pts = kind.check_points(points)
    w = np.asarray(values, dtype=complex).reshape(-1)
    if len(w) != len(pts):
        raise ValueError("points and values must have equal length")
    G = kind.matrix(pts)
    cond = float(np.linalg.cond(G))
    if not np.isfinite(cond) or cond > COND_MAX:
        raise IllConditionedError(f"Gram matrix is ill-conditioned (cond = {cond:.3g})", cond)
    L, _ = factor_gram(G)
    y = scipy.linalg.solve_triangular(L, w, lower=True)
    return float(np.linalg.norm(y))


def pullback_checks(r, points, values):
    """Residuals of the two pull-back norm descriptions at finitely many nodes.

    Returns ``(residual_da, residual_bidisk)``: the gaps between the annulus
    interpolant norm and the rescaled Drury-Arveson / bidisk interpolant norms
    at the nodes ``b_r(z)`` and ``(z, r/z)``.
    """
    z = np.asarray(points, dtype=complex).reshape(-1)
    base = min_norm_interpolant(KernelKind.annulus(r), z, values)
    da = min_norm_interpolant(KernelKind.drury_arveson_2(), embed_b(r, z), values)
    bd = min_norm_interpolant(KernelKind.bidisk(), bidisk_lift(r, z), values)
    res_da = abs(math.sqrt((1 + r * r) / (1 - r * r)) * da - base)
    res_bd = abs(math.sqrt(1 / (1 - r * r)) * bd - base)
    return res_da, res_bd


@dataclass
class ExtensionCheck:
    C_star: float
    lower_ok: bool
    upper_ok: bool
    max_abs: float
    sup: float
    margin: float

    def to_dict(self):
        return {"C_star": self.C_star, "lower_ok": self.lower_ok, "upper_ok": self.upper_ok,
                "max_abs_at_nodes": self.max_abs, "sup_norm": self.sup,
                "sqrt2_sup": math.sqrt(2) * self.sup, "psd_margin": self.margin}


def extension_check(phi, r, nodes=None, tol=1e-7):
    """Finite-node extension norm of ``phi`` and its interval check.

    ``lower_ok``: ``C_star >= max_i |phi(z_i)| - tol``; ``upper_ok``:
    ``C_star <= sqrt(2) sup|phi| + tol``.
    """
    nodes = default_nodes(r) if nodes is None else nodes
    p = PickProblem.from_symbol(phi, r, nodes)
    C, info = min_extension_norm(p, tol=min(tol, 1e-10), full_output=True)
    mx = float(np.max(np.abs(p.targets)))
    sup = sup_norm(phi, Annulus.standard(r))
    return ExtensionCheck(C, C >= mx - tol, C <= math.sqrt(2) * sup + tol, mx, sup, info["margin"])


def refinement_trajectory(phi, r, n_radii=3, angles=(8, 16, 32, 64), tol=1e-10):
    """``[(n_nodes, C_star)]`` over nested grids with doubling angle counts."""
    out = []
    for n_ang in angles:
        nodes = default_nodes(r, n_radii, n_ang)
        p = PickProblem.from_symbol(phi, r, nodes)
        out.append((len(nodes), min_extension_norm(p, tol)))
    return out
