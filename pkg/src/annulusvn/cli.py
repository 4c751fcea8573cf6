"""Command-line driver: every verification as a seeded, reproducible subcommand.

Exit status is 0 on success, 2 when a checked inequality or identity fails
beyond tolerance, and 1 on malformed input.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone

import numpy as np

from . import annulus, calculus, laurent, multspace, operators, pickext
from . import serialize as ser

SCHEMA_VERSION = 1


class InputError(ValueError):
    pass


@dataclass
class RunConfig:
    subcommand: str
    r: float = 0.5
    dim: int = None
    dims: list = None
    trials: int = None
    seed: int = 0
    tol: float = None
    n_max: int = None
    output: str = None
    format: str = "json"
    matrix_file: str = None
    points_file: str = None
    symbol_file: str = None
    extra: dict = field(default_factory=dict)

    def validate(self):
        if not 0 < self.r < 1:
            raise InputError(f"--r must lie in (0, 1), got {self.r}")
        if self.trials is not None and self.trials < 0:
            raise InputError(f"--trials must be >= 0, got {self.trials}")
        if self.tol is not None and not self.tol > 0:
            raise InputError(f"--tol must be > 0, got {self.tol}")
        if self.dim is not None and self.dim < 1:
            raise InputError(f"--dim must be >= 1, got {self.dim}")
        if self.dims is not None and (not self.dims or min(self.dims) < 1):
            raise InputError(f"--dims must list positive sizes, got {self.dims}")
        if self.n_max is not None and self.n_max < 1:
            raise InputError(f"--n-max must be >= 1, got {self.n_max}")
        if self.format not in ("json", "csv"):
            raise InputError(f"--format must be json or csv, got {self.format}")

    def echo(self):
        d = asdict(self)
        d.pop("output")
        extra = d.pop("extra")
        d.update(extra)
        return {k: v for k, v in d.items() if v is not None}


def parse_dims(text):
    """``"2..8"`` or ``"2,3,5"``."""
    try:
        if ".." in text:
            a, b = text.split("..")
            return list(range(int(a), int(b) + 1))
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise InputError(f"--dims: cannot parse {text!r}") from exc


def _read(path, what, loader):
    try:
        return loader(ser.load_json(path))
    except FileNotFoundError as exc:
        raise InputError(f"{what}: file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: invalid JSON in {path}: {exc}") from exc
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{what}: malformed content in {path}: {exc}") from exc


def _symbol(cfg):
    if cfg.symbol_file:
        return _read(cfg.symbol_file, "--symbol-file", ser.laurent_from_json)
    n = cfg.extra.get("g_n")
    if n is not None:
        if n < 1:
            raise InputError(f"--g-n must be >= 1, got {n}")
        return laurent.g_family(cfg.r, n)
    return None


def _report(cfg, columns=(), rows=(), **fields):
    rep = {"schema_version": SCHEMA_VERSION, "subcommand": cfg.subcommand, "config": cfg.echo()}
    rep.update(fields)
    rep.setdefault("violations", [])
    rep["columns"] = list(columns)
    rep["rows"] = [list(r) for r in rows]
    return rep


def cmd_kernel_check(cfg):
    tol = cfg.tol or 1e-12
    n = 1000 if cfg.trials is None else cfg.trials
    rng = np.random.default_rng(cfg.seed)
    A = annulus.Annulus.standard(cfg.r)
    pairs = np.stack([annulus.random_points(rng, A, n), annulus.random_points(rng, A, n)], axis=1)
    res_da, res_s2 = annulus.verify_kernel_identities(cfg.r, pairs)
    res_14 = multspace.shift_kernel_identity(cfg.r, pairs[:, 0], pairs[:, 1]) if n else 0.0
    viol = [{"check": k, "residual": v} for k, v in
            (("drury_arveson", res_da), ("bidisk", res_s2), ("shift_kernel", res_14)) if v >= tol]
    return _report(cfg, ["check", "residual", "tol"],
                   [["drury_arveson", res_da, tol], ["bidisk", res_s2, tol], ["shift_kernel", res_14, tol]],
                   summary={"pairs": n, "residual_da": res_da, "residual_bidisk": res_s2,
                            "residual_shift_kernel": res_14}, violations=viol)


def _load_matrices(path):
    def loader(obj):
        if isinstance(obj, dict) and "samples" in obj:
            return [ser.matrix_from_json(s["matrix"]) for s in obj["samples"]]
        if isinstance(obj, dict) and "matrix" in obj:
            return [ser.matrix_from_json(obj["matrix"])]
        return [ser.matrix_from_json(obj)]
    return _read(path, "--matrix-file", loader)


def cmd_member_check(cfg):
    if not cfg.matrix_file:
        raise InputError("--matrix-file is required")
    tol = cfg.tol or 1e-10
    rows, reports, viol = [], [], []
    for i, T in enumerate(_load_matrices(cfg.matrix_file)):
        try:
            rep = operators.check_membership(T, cfg.r, tol)
        except ValueError as exc:
            raise InputError(f"--matrix-file: entry {i}: {exc}") from exc
        lo, hi = rep.tt_bounds
        bounds_ok = (not rep.is_member) or (lo >= cfg.r ** 2 - 1e-8 and hi <= 1 + 1e-8)
        if not bounds_ok:
            viol.append({"index": i, "check": "tt_bounds", "bounds": [lo, hi]})
        reports.append(rep.to_dict())
        rows.append([i, rep.is_member, rep.defect_min_eig, rep.spectral_margin, lo, hi])
    return _report(cfg, ["index", "is_member", "defect_min_eig", "spectral_margin", "tt_min", "tt_max"],
                   rows, reports=reports, violations=viol)


def cmd_sample(cfg):
    dim = cfg.dim or 4
    count = 1 if cfg.trials is None else cfg.trials
    strategy = cfg.extra.get("strategy", "normal")
    samples, rows, viol = [], [], []
    for i in range(count):
        s = operators.sample_member(cfg.r, dim, strategy, cfg.seed + i)
        rep = operators.check_membership(s.T, cfg.r)
        if not rep.is_member:
            viol.append({"index": i, "check": "membership"})
        samples.append({"matrix": ser.matrix_to_json(s.T), "metadata": s.metadata(),
                        "is_member": rep.is_member})
        rows.append([i, s.seed, rep.is_member, rep.defect_min_eig, s.nonnormality, s.fell_back])
    return _report(cfg, ["index", "seed", "is_member", "defect_min_eig", "nonnormality", "fell_back"],
                   rows, samples=samples, violations=viol)


VN_COLUMNS = ["trial", "seed", "dim", "strategy", "n_min", "n_max", "norm_phi_T", "mult_estimate",
              "mult_upper", "sup", "margin_mult", "margin_sqrt2", "ratio"]


def cmd_vn_verify(cfg):
    tol = cfg.tol or 1e-8
    trials = 100 if cfg.trials is None else cfg.trials
    dims = cfg.dims or [2, 3, 4, 5, 6, 7, 8]
    spec = multspace.SymbolSpec(cfg.extra.get("bandwidth", 10))
    rep = multspace.vn_experiment(cfg.r, trials, dims, spec, cfg.seed, tol=tol, keep_records=True)
    keep = cfg.extra.get("records", False)
    rows = [[rec[c] for c in VN_COLUMNS] for rec in rep["records"]] if keep else []
    return _report(cfg, VN_COLUMNS if keep else [], rows, summary=rep["summary"],
                   tolerances=rep["tolerances"], violations=rep["summary"]["violations"])


def cmd_mult_norm(cfg):
    phi = _symbol(cfg)
    if phi is None:
        raise InputError("mult-norm needs --symbol-file or --g-n")
    tol = cfg.tol or multspace.MULT_TOL
    res = multspace.mult_norm(phi, cfg.r, tol=tol, N_max=cfg.n_max or 128)
    viol = []
    if res.lower > res.upper + tol:
        viol.append({"check": "sqrt2_upper", "lower": res.lower, "upper": res.upper})
    return _report(cfg, ["N", "norm"], res.trajectory, result=res.to_dict(),
                   symbol=ser.laurent_to_json(phi), violations=viol)


def cmd_sharpness(cfg):
    n_max = cfg.n_max or 20
    tol = cfg.tol or 1e-8
    rows = multspace.sharpness_trajectory(cfg.r, n_max)
    viol = []
    for i, (n, lower, sup, ratio) in enumerate(rows):
        if lower < math.sqrt(2) - tol:
            viol.append({"n": n, "check": "lower_sqrt2", "lower": lower})
        if ratio > math.sqrt(2) + tol:
            viol.append({"n": n, "check": "ratio_sqrt2", "ratio": ratio})
        if i and ratio < rows[i - 1][3] - tol:
            viol.append({"n": n, "check": "nondecreasing", "ratio": ratio})
    return _report(cfg, ["n", "mult_lower", "sup_norm", "ratio"], rows,
                   summary={"final_ratio": rows[-1][3], "sqrt2": math.sqrt(2)}, violations=viol)


def cmd_pick_extend(cfg):
    tol = cfg.tol or 1e-7
    nodes = (_read(cfg.points_file, "--points-file", ser.points_from_json)
             if cfg.points_file else pickext.default_nodes(cfg.r))
    phi = _symbol(cfg)
    if phi is not None:
        symbols = [phi]
    else:
        rng = np.random.default_rng(cfg.seed)
        symbols = [laurent.random_laurent(rng, cfg.r, 10) for _ in range(cfg.trials or 1)]
    rows, viol = [], []
    for i, phi in enumerate(symbols):
        try:
            res = pickext.extension_check(phi, cfg.r, nodes, tol)
        except annulus.DomainError as exc:
            raise InputError(f"--points-file: {exc}") from exc
        pl = multspace.pick_lower_bound(phi, cfg.r, nodes, tol=min(tol, 1e-10))
        gap = abs(res.C_star - pl)
        if not (res.lower_ok and res.upper_ok):
            viol.append({"index": i, "check": "interval", **res.to_dict()})
        if gap >= tol:
            viol.append({"index": i, "check": "equality_transfer", "gap": gap})
        rows.append([i, res.C_star, pl, res.max_abs, math.sqrt(2) * res.sup, res.lower_ok, res.upper_ok])
    return _report(cfg, ["index", "C_star", "pick_lower_bound", "max_abs_at_nodes", "sqrt2_sup",
                         "lower_ok", "upper_ok"], rows, nodes=len(nodes), violations=viol)


def cmd_factor(cfg):
    tol = cfg.tol or 1e-10
    if cfg.matrix_file:
        G = _load_matrices(cfg.matrix_file)[0]
        grid = None
    elif cfg.points_file:
        grid = _read(cfg.points_file, "--points-file", ser.points_from_json)
        try:
            G = annulus.gram(annulus.KernelKind.annulus(cfg.r), grid)
        except annulus.DomainError as exc:
            raise InputError(f"--points-file: {exc}") from exc
    else:
        raise InputError("factor needs --matrix-file (Gram matrix) or --points-file")
    try:
        fac = calculus.factor_psd(G, tol, grid)
    except calculus.NotPSDError as exc:
        return _report(cfg, violations=[{"check": "psd", "error": str(exc)}])
    trace = float(np.real(np.trace(G)))
    viol = []
    if fac.residual > fac.dropped_mass + 1e-10 * max(trace, 1.0):
        viol.append({"check": "reconstruction", "residual": fac.residual})
    return _report(cfg, ["rank", "dropped_mass", "residual", "trace"],
                   [[fac.rank, fac.dropped_mass, fac.residual, trace]], violations=viol,
                   factors=ser.array_to_json(fac.factors),
                   grid=None if grid is None else ser.points_to_json(grid))


def cmd_counterexample(cfg):
    tol = cfg.tol or 1e-10
    sweep = cfg.extra.get("sweep")
    rs = [cfg.r] if not sweep else list(np.linspace(0.01, 0.99, sweep))
    rows, viol = [], []
    for r in rs:
        _, na, nr, q = operators.counterexample(r)
        f = operators.counterexample_formula(r)
        rows.append([float(r), na, nr, q, f])
        if abs(na - 1) > tol or abs(nr - 1) > tol or abs(q - f) > tol or not q < 0:
            viol.append({"r": float(r), "norm_A": na, "norm_rAinv": nr, "quad_form": q})
    out = {"violations": viol}
    if not sweep:
        out["summary"] = {"norm_A": rows[0][1], "norm_rAinv": rows[0][2], "quad_form": rows[0][3]}
    return _report(cfg, ["r", "norm_A", "norm_rAinv", "quad_form", "formula"], rows, **out)


COMMANDS = {
    "kernel-check": cmd_kernel_check,
    "member-check": cmd_member_check,
    "sample": cmd_sample,
    "vn-verify": cmd_vn_verify,
    "mult-norm": cmd_mult_norm,
    "sharpness": cmd_sharpness,
    "pick-extend": cmd_pick_extend,
    "factor": cmd_factor,
    "counterexample": cmd_counterexample,
}


def _json_default(o):
    if isinstance(o, (np.bool_,)):
        return bool(o)
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, complex):
        return [o.real, o.imag]
    raise TypeError(f"not serializable: {type(o)}")


def _cell(v):
    if isinstance(v, (bool, np.bool_)):
        return str(bool(v)).lower()
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2, default=_json_default) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report["columns"])
    for row in report["rows"]:
        w.writerow([_cell(v) for v in row])
    return buf.getvalue()


def report_write(report, fmt="json", path=None):
    text = render(report, fmt)
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w") as fh:
            fh.write(text)
    except OSError as exc:
        raise InputError(f"--output: cannot write {path}: {exc}") from exc


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def build_parser():
    p = _Parser(prog="annulusvn", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="subcommand", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--r", type=float, default=0.5)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--tol", type=float)
        sp.add_argument("--output", "-o")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--no-timestamp", action="store_true")
        return sp

    sp = common(sub.add_parser("kernel-check", help="pull-back kernel identities and the shift identity"))
    sp.add_argument("--trials", type=int, help="number of random point pairs (default 1000)")

    sp = common(sub.add_parser("member-check", help="certify membership of matrices in F_r"))
    sp.add_argument("--matrix-file")

    sp = common(sub.add_parser("sample", help="draw members of F_r"))
    sp.add_argument("--dim", type=int)
    sp.add_argument("--trials", type=int, help="number of samples (default 1)")
    sp.add_argument("--strategy", choices=("normal", "perturbed"), default="normal")

    sp = common(sub.add_parser("vn-verify", help="randomized von Neumann inequality check"))
    sp.add_argument("--trials", type=int)
    sp.add_argument("--dims", type=parse_dims)
    sp.add_argument("--bandwidth", type=int, default=10)
    sp.add_argument("--records", action="store_true", help="include per-trial rows")

    sp = common(sub.add_parser("mult-norm", help="multiplier norm bracket of a symbol"))
    sp.add_argument("--symbol-file")
    sp.add_argument("--g-n", type=int)
    sp.add_argument("--n-max", type=int, help="largest truncation order")

    sp = common(sub.add_parser("sharpness", help="ratio trajectory for the extremal family g_n"))
    sp.add_argument("--n-max", type=int, help="largest n (default 20)")

    sp = common(sub.add_parser("pick-extend", help="finite-node Drury-Arveson extension norms"))
    sp.add_argument("--points-file")
    sp.add_argument("--symbol-file")
    sp.add_argument("--g-n", type=int)
    sp.add_argument("--trials", type=int, help="random symbols when no symbol is given")

    sp = common(sub.add_parser("factor", help="PSD factorization of a Gram matrix"))
    sp.add_argument("--matrix-file")
    sp.add_argument("--points-file")

    sp = common(sub.add_parser("counterexample", help="the 2x2 non-member with unit norms"))
    sp.add_argument("--sweep", type=int, help="number of r values in (0.01, 0.99)")
    return p


_CONFIG_FIELDS = {"r", "dim", "dims", "trials", "seed", "tol", "n_max", "output", "format",
                  "matrix_file", "points_file", "symbol_file"}


def config_from_args(ns):
    d = vars(ns).copy()
    name = d.pop("subcommand")
    d.pop("no_timestamp")
    base = {k: d.pop(k) for k in list(d) if k in _CONFIG_FIELDS}
    extra = {k: v for k, v in d.items() if v is not None and v is not False}
    return RunConfig(name, extra=extra, **base)


def dispatch(cfg, timestamp=True):
    """Run one subcommand; returns ``(exit_status, report)``."""
    cfg.validate()
    report = COMMANDS[cfg.subcommand](cfg)
    if timestamp:
        report["timestamp"] = datetime.now(timezone.utc).isoformat()
    return (2 if report["violations"] else 0), report


def main(argv=None):
    try:
        ns = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors exit 1 and --help exits 0 without leaving the interpreter
        return exc.code
    try:
        cfg = config_from_args(ns)
        status, report = dispatch(cfg, timestamp=not ns.no_timestamp)
        report_write(report, cfg.format, cfg.output)
    except InputError as exc:
        print(f"annulusvn {ns.subcommand}: {exc}", file=sys.stderr)
        return 1
    except (ValueError, annulus.DomainError) as exc:
        print(f"annulusvn {ns.subcommand}: invalid input: {exc}", file=sys.stderr)
        return 1
    if status == 2:
        print(f"annulusvn {ns.subcommand}: {len(report['violations'])} violation(s)", file=sys.stderr)
    return status


if __name__ == "__main__":
    sys.exit(main())
