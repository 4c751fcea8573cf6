"""The re-weighted annulus Hardy space as a weighted sequence space.

The orthonormal basis is ``e_n = z^n / w_n`` with ``w_n = r^n`` for
``n <= -1`` and ``w_n = 1`` for ``n >= 0``. Multiplication by ``phi`` then has
matrix entries ``a_{k-n} w_k / w_n``; its compressions to ``|n| <= N`` give
lower bounds for the multiplier norm that increase with ``N``.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from ._linalg import DomainError, hermitize, pick_norm
from .annulus import Annulus, KernelKind, pairwise, polar_grid
from .calculus import apply_function
from .laurent import LaurentPoly, evaluate, g_family, random_laurent, sup_norm
from .operators import op_norm, sample_member

MULT_TOL = 1e-8


def basis_weights(r, N):
    """``w_j`` for ``j = -N..N`` (overflows for very large ``N``; see :func:`log_weights`)."""
    return np.exp(log_weights(r, N))


def log_weights(r, N):
    j = np.arange(-N, N + 1)
    return np.where(j < 0, j * math.log(r), 0.0)


@dataclass
class MultMatrix:
    r: float
    N: int
    entries: np.ndarray

    @property
    def indices(self):
        return np.arange(-self.N, self.N + 1)

    def entry(self, k, n):
        return complex(self.entries[k + self.N, n + self.N])

    def norm(self):
        return float(np.linalg.norm(self.entries, 2))


def mult_matrix(phi, r, N):
    """Compression of multiplication by ``phi`` to basis indices ``-N..N``."""
    if N < phi.bandwidth:
        raise ValueError(f"N = {N} is below the symbol bandwidth {phi.bandwidth}")
    lw = log_weights(r, N)
    size = 2 * N + 1
    E = np.zeros((size, size), dtype=complex)
    for m, a in phi.items():
        # row k = col n + m
        n = np.arange(max(0, -m), min(size, size - m))
        E[n + m, n] = a * np.exp(lw[n + m] - lw[n])
    return MultMatrix(float(r), int(N), E)


def truncation_schedule(bandwidth, N_max=128):
    """``8, 16, ..., N_max``, or doublings of the bandwidth when it exceeds 8.

    Always has at least two entries so convergence can be judged.
    """
    N = max(8, int(bandwidth))
    out = [N]
    while 2 * N <= N_max or len(out) < 2:
        N *= 2
        out.append(N)
    return out


@dataclass
class MultNormResult:
    estimate: float
    lower: float
    upper: float
    converged: bool
    trajectory: list = field(default_factory=list)
    sup: float = float("nan")

    @property
    def best_lower(self):
        """``max(lower, sup|phi|)``; the sup norm never exceeds the multiplier norm."""
        return max(self.lower, self.sup)

    def to_dict(self):
        return {"estimate": self.estimate, "lower": self.lower, "upper": self.upper,
                "best_lower": self.best_lower, "converged": self.converged,
                "trajectory": [[int(N), float(s)] for N, s in self.trajectory]}


def mult_norm(phi, r, tol=MULT_TOL, N_max=128, sup=None):
    """Bracket the multiplier norm of ``phi``.

    ``lower`` is the norm of the largest compression computed, an honest
    lower bound; ``upper = sqrt(2) * sup_norm(phi)``. Compressions run over
    :func:`truncation_schedule` until successive norms differ by less than
    `tol`; ``converged`` is False if that never happens. Convergence is
    geometric when the extremal vector is localized (as for ``g_n``) but only
    algebraic for symbols whose norm is governed by the boundary behaviour,
    which then rarely converge within ``N_max``.
    """
    if sup is None:
        sup = sup_norm(phi, Annulus.standard(r))
    upper = math.sqrt(2) * sup
    if phi.is_zero:
        return MultNormResult(0.0, 0.0, 0.0, True, [], 0.0)
    schedule = truncation_schedule(phi.bandwidth, N_max)
    traj = []
    converged = False
    for N in schedule:
        s = mult_matrix(phi, r, N).norm()
        if traj and abs(s - traj[-1][1]) < tol:
            traj.append((N, s))
            converged = True
            break
        traj.append((N, s))
    # compressions are nested, so the last value is the largest
    lower = max(s for _, s in traj)
    return MultNormResult(lower, lower, upper, converged, traj, sup)


def shift_report(r, N):
    """Truncated bilateral shift and its defect on the interior block.

    The defect ``(r^2 + 1) I - r^2 S^{-1} S^{-*} - S S^*`` is formed from the
    compressions of multiplication by ``z`` and ``1/z`` (the inverse of the
    shift on the whole space) and restricted to indices ``-N+1..N-1``, where
    the truncation does not disturb it. There it equals ``(1 - r^2)`` times
    the projection onto ``e_0``.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    S = mult_matrix(LaurentPoly.monomial(1), r, N)
    Sinv = mult_matrix(LaurentPoly.monomial(-1), r, N)
    E, Ei = S.entries, Sinv.entries
    D = (r * r + 1) * np.eye(2 * N + 1) - r * r * Ei @ Ei.conj().T - E @ E.conj().T
    return S, hermitize(D)[1:-1, 1:-1]


def shift_kernel_identity(r, lam, mu):
    """``|(r^2 + 1) k - r^2 k / (l conj(m)) - l conj(m) k - (1 - r^2)|``."""
    kind = KernelKind.annulus(r)
    lam = np.asarray(lam, dtype=complex)
    mu = np.asarray(mu, dtype=complex)
    k = pairwise(kind, lam.reshape(-1), mu.reshape(-1))
    w = lam.reshape(-1) * mu.reshape(-1).conj()
    res = np.abs((r * r + 1) * k - r * r / w * k - w * k - (1 - r * r))
    return float(res.max()) if res.size > 1 else float(res[0])


def pick_lower_bound(phi, r, points=None, tol=1e-10, refine_tol=1e-6, max_refinements=3):
    """Smallest ``C`` making the annulus Pick matrix of ``phi`` PSD.

    This is a certified lower bound for the multiplier norm and grows under
    point-set inclusion. Bisection runs on ``[max |phi(z_i)|, sqrt(2) sup|phi|]``.
    Without explicit `points`, a 3-radii by 12-angle grid is used and the
    angle count doubled while the value still grows by more than `refine_tol`.
    """
    A = Annulus.standard(r)
    kind = KernelKind.annulus(r)
    hi = math.sqrt(2) * sup_norm(phi, A) + tol

    def solve(pts):
        z = kind.check_points(pts)
        w = evaluate(phi, z)
        lo = float(np.max(np.abs(w)))
        return pick_norm(kind.matrix(z), w, tol=tol, lo=lo, hi=max(hi, lo + tol))

    if points is not None:
        if len(np.atleast_1d(points)) == 0:
            raise ValueError("need at least one point")
        return solve(points)
    n_angles = 12
    val = solve(polar_grid(A, 3, n_angles))
    for _ in range(max_refinements):
        n_angles *= 2
        new = solve(polar_grid(A, 3, n_angles))
        grew = new - val
        val = max(val, new)
        if grew <= refine_tol:
            break
    return val


def rescaling_inequalities(r, n):
    """Truth of the two scalar inequalities comparing the rescaled annuli.

    Vectorized over `n`; requires ``n > 2 / (1 - r)``.
    """
    n = np.asarray(n, dtype=float)
    if np.any(n <= 2.0 / (1.0 - r)):
        raise DomainError(f"n must exceed 2/(1-r) = {2.0 / (1.0 - r):.6g}")
    a, b = r + 1.0 / n, 1.0 - 1.0 / n
    lhs1 = a * a / (1 + (a / b) ** 2)
    lhs2 = 1.0 / (b * b + a * a)
    ok1 = lhs1 >= r * r / (1 + r * r)
    ok2 = lhs2 >= 1.0 / (1 + r * r)
    if n.ndim == 0:
        return bool(ok1), bool(ok2)
    return ok1, ok2


def rescaling_inequality_sides(r, n):
    a, b = r + 1.0 / n, 1.0 - 1.0 / n
    return (a * a / (1 + (a / b) ** 2), r * r / (1 + r * r)), (1.0 / (b * b + a * a), 1.0 / (1 + r * r))


def sharpness_trajectory(r, n_max, tol=MULT_TOL):
    """Rows ``(n, lower, sup, ratio)`` with ratio ``= lower(g_n) / sup|g_n|``."""
    A = Annulus.standard(r)
    rows = []
    for n in range(1, n_max + 1):
        g = g_family(r, n)
        s = sup_norm(g, A)
        m = mult_norm(g, r, tol=tol, sup=s)
        rows.append((n, m.lower, s, m.lower / s))
    return rows


@dataclass(frozen=True)
class SymbolSpec:
    """Random Laurent symbols with support in ``[-max_bandwidth, max_bandwidth]``."""

    max_bandwidth: int = 10
    normalized: bool = True

    def draw(self, rng, r):
        return random_laurent(rng, r, self.max_bandwidth, self.normalized)


def _trial(r, dim, strategy, trial_seed, symbols, tol):
    rng = np.random.default_rng([trial_seed, 1])
    sample = sample_member(r, dim, strategy, trial_seed)
    phi = symbols.draw(rng, r)
    A = Annulus.standard(r)
    F = apply_function(phi, sample.T, A)
    phi_T = op_norm(F)
    sup = sup_norm(phi, A)
    mn = mult_norm(phi, r, sup=sup)
    return {
        "seed": int(trial_seed), "dim": int(dim), "strategy": strategy,
        "normal": strategy == "normal" or dim == 1 or sample.fell_back,
        "fell_back": sample.fell_back, "n_min": phi.n_min, "n_max": phi.n_max,
        "norm_phi_T": phi_T, "mult_estimate": mn.estimate, "mult_best_lower": mn.best_lower,
        "mult_upper": mn.upper, "mult_converged": mn.converged, "sup": sup,
        "margin_mult": mn.best_lower - phi_T,
        "margin_sqrt2": math.sqrt(2) * sup - phi_T,
        "margin_upper": mn.upper - phi_T,
        "ratio": phi_T / sup if sup > 0 else 0.0,
    }


def vn_experiment(r, trials, dims=(2, 3, 4, 5, 6, 7, 8), symbols=SymbolSpec(), seed=0,
                  strategies=("normal", "perturbed"), tol=1e-8, normal_tol=1e-10,
                  keep_records=False):
    """Randomized check of ``||phi(T)|| <= ||phi||_Mult <= sqrt(2) ||phi||_inf``.

    Trial ``i`` uses seed ``seed + i``, dimension ``dims[i % len(dims)]`` and
    strategy ``strategies[(i // len(dims)) % len(strategies)]``, so the report
    does not depend on execution order. Trials that fail numerically are
    listed under ``skipped``.
    """
    dims = list(dims)
    strategies = list(strategies)
    records, skipped, violations = [], [], []
    for i in range(trials):
        dim = dims[i % len(dims)]
        strategy = strategies[(i // len(dims)) % len(strategies)]
        try:
            rec = _trial(r, dim, strategy, seed + i, symbols, tol)
        except (ValueError, np.linalg.LinAlgError) as exc:
            skipped.append({"trial": i, "seed": seed + i, "error": str(exc)})
            continue
        rec["trial"] = i
        records.append(rec)
        if rec["margin_sqrt2"] < -tol:
            violations.append({"trial": i, "kind": "sqrt2", "margin": rec["margin_sqrt2"]})
        if rec["margin_upper"] < -tol:
            violations.append({"trial": i, "kind": "mult_upper", "margin": rec["margin_upper"]})
        # an unconverged estimate is only a lower bound, not a violation
        if rec["mult_converged"] and rec["margin_mult"] < -tol:
            violations.append({"trial": i, "kind": "mult_estimate", "margin": rec["margin_mult"]})
        if rec["normal"] and rec["ratio"] > 1 + normal_tol:
            violations.append({"trial": i, "kind": "normal_sup", "ratio": rec["ratio"]})
    normal_ratios = [x["ratio"] for x in records if x["normal"]]
    summary = {
        "trials": int(trials),
        "completed": len(records),
        "min_margin_mult": min((x["margin_mult"] for x in records), default=None),
        "min_margin_sqrt2": min((x["margin_sqrt2"] for x in records), default=None),
        "min_margin_upper": min((x["margin_upper"] for x in records), default=None),
        "max_ratio": max((x["ratio"] for x in records), default=None),
        "max_ratio_normal": max(normal_ratios, default=None),
        "unconverged_mult": sum(not x["mult_converged"] for x in records),
        "violations": violations,
        "skipped": skipped,
    }
    report = {"summary": summary, "tolerances": {"tol": tol, "normal_tol": normal_tol}}
    if keep_records:
        report["records"] = records
    return report
