"""JSON formats for points, matrices, symbols and Pick problems.

Complex numbers are ``[re, im]`` pairs throughout.

* points: ``[[re, im], ...]`` (or ``{"points": [...]}``)
* matrix: ``{"dim": d, "entries": [[[re, im], ...], ...]}`` row-major
* Laurent polynomial: ``{"n_min": int, "coeffs": [[re, im], ...]}``
* hereditary series: ``{"m_min": int, "n_min": int, "rows": [[[re, im], ...], ...]}``
* Pick problem: ``{"r": float, "nodes": [...], "targets": [...]}``
"""

import json

import numpy as np

from .calculus import HereditarySeries
from .laurent import LaurentPoly
from .pickext import PickProblem


def complex_to_json(z):
    z = complex(z)
    return [z.real, z.imag]


def complex_from_json(v):
    if isinstance(v, (int, float)):
        return complex(v)
    if len(v) != 2:
        raise ValueError(f"expected [re, im], got {v!r}")
    return complex(float(v[0]), float(v[1]))


def array_to_json(a):
    a = np.asarray(a, dtype=complex)
    if a.ndim == 0:
        return complex_to_json(a)
    return [array_to_json(x) for x in a]


def _array_from_json(v, ndim):
    if ndim == 0:
        return complex_from_json(v)
    return [_array_from_json(x, ndim - 1) for x in v]


def points_to_json(points):
    return array_to_json(np.asarray(points, dtype=complex).reshape(-1))


def points_from_json(obj):
    if isinstance(obj, dict):
        obj = obj["points"]
    return np.array([complex_from_json(v) for v in obj], dtype=complex)


def matrix_to_json(T):
    T = np.asarray(T, dtype=complex)
    return {"dim": int(T.shape[0]), "entries": array_to_json(T)}


def matrix_from_json(obj):
    try:
        dim = int(obj["dim"])
        rows = obj["entries"]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"matrix needs 'dim' and 'entries' fields: {exc}") from exc
    T = np.array(_array_from_json(rows, 2), dtype=complex)
    if T.shape != (dim, dim):
        raise ValueError(f"field 'entries' has shape {T.shape}, expected ({dim}, {dim})")
    return T


def laurent_to_json(phi):
    return {"n_min": int(phi.n_min), "coeffs": array_to_json(phi.coeffs)}


def laurent_from_json(obj):
    return LaurentPoly(int(obj["n_min"]), [complex_from_json(v) for v in obj["coeffs"]])


def hereditary_to_json(h):
    return {"m_min": int(h.m_min), "n_min": int(h.n_min), "rows": array_to_json(h.coeffs)}


def hereditary_from_json(obj):
    return HereditarySeries(int(obj["m_min"]), int(obj["n_min"]),
                            np.array(_array_from_json(obj["rows"], 2), dtype=complex))


def pick_to_json(p):
    return {"r": float(p.r), "nodes": points_to_json(p.nodes), "targets": points_to_json(p.targets)}


def pick_from_json(obj):
    return PickProblem(float(obj["r"]), points_from_json(obj["nodes"]), points_from_json(obj["targets"]))


def load_json(path):
    with open(path) as fh:
        return json.load(fh)
