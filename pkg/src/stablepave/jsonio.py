"""File formats: polynomials, matrices, processes, and run reports.

Polynomial JSON: {"n": int, "terms": [{"vars": [...], "coeff": float}, ...]}
where "vars" lists the monomial's variable set for multi-affine input and a
full exponent vector (length n) for dense input; the loader is told which.
Matrix JSON: {"n": int, "rows": [[...], ...]}, symmetric to 1e-12.
Process JSON: {"n": int, "pmf": [{"set": [...], "p": float}, ...]}, omitted
sets carry zero mass.
"""

from __future__ import annotations

import csv
import json
from typing import Optional

import numpy as np

from . import multiaffine as ma
from . import multidegree as md
from .errors import DimensionMismatch
from .multiaffine import MultiAffinePoly
from .multidegree import MultiDegreePoly
from .paving import PavingResult
from .processes import PointProcess


def multiaffine_to_dict(p: MultiAffinePoly) -> dict:
    terms = []
    for mask in np.nonzero(p.coeffs)[0]:
        terms.append({"vars": ma.indices_of(int(mask)), "coeff": float(p.coeffs[mask])})
    return {"n": p.n, "terms": terms}


def multiaffine_from_dict(d: dict) -> MultiAffinePoly:
    n = int(d["n"])
    return MultiAffinePoly.from_terms(
        n, [(t["vars"], float(t["coeff"])) for t in d["terms"]]
    )


def multidegree_to_dict(p: MultiDegreePoly) -> dict:
    arr = p.coeffs.reshape(p.shape)
    terms = []
    for idx in np.argwhere(arr != 0.0):
        terms.append({"vars": [int(v) for v in idx], "coeff": float(arr[tuple(idx)])})
    return {"n": p.n, "terms": terms}


def multidegree_from_dict(d: dict) -> MultiDegreePoly:
    n = int(d["n"])
    exps = []
    for t in d["terms"]:
        v = [int(x) for x in t["vars"]]
        if len(v) != n:
            raise DimensionMismatch("dense terms need full exponent vectors")
        exps.append((v, float(t["coeff"])))
    caps = tuple(
        max((v[i] for v, _ in exps), default=0) for i in range(n)
    )
    arr = np.zeros(tuple(c + 1 for c in caps))
    for v, c in exps:
        arr[tuple(v)] += c
    return MultiDegreePoly(caps, arr.ravel())


def matrix_to_dict(K) -> dict:
    M = np.asarray(K, dtype=np.float64)
    return {"n": M.shape[0], "rows": [[float(x) for x in row] for row in M]}


def matrix_from_dict(d: dict) -> np.ndarray:
    M = np.array(d["rows"], dtype=np.float64)
    if M.shape != (int(d["n"]), int(d["n"])):
        raise DimensionMismatch("matrix rows do not match n")
    return ma.validate_symmetric(M, tol=1e-12)


def process_to_dict(X: PointProcess) -> dict:
    entries = []
    for mask in np.nonzero(X.pmf)[0]:
        entries.append({"set": ma.indices_of(int(mask)), "p": float(X.pmf[mask])})
    return {"n": X.n, "pmf": entries}


def process_from_dict(d: dict) -> PointProcess:
    n = int(d["n"])
    pmf = np.zeros(1 << n)
    for entry in d["pmf"]:
        pmf[ma.mask_of(entry["set"])] += float(entry["p"])
    return PointProcess(n, pmf)


def paving_report_dict(
    result: PavingResult,
    r: int,
    alpha: Optional[float] = None,
    lam: Optional[float] = None,
    runtime_ms: Optional[float] = None,
    **extra,
) -> dict:
    rep = {
        "method": result.method.value,
        "r": r,
        "alpha": alpha,
        "lambda": lam,
        "bound": result.bound,
        "partition": [ma.indices_of(m) for m in result.partition.masks],
        "num_parts": result.partition.num_parts,
        "per_part_maxroot": list(result.per_part_maxroot),
        "certified": result.certified,
        "runtime_ms": runtime_ms,
    }
    rep.update(extra)
    return rep


def save_json(obj, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(obj, fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_json(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)


def save_csv(rows: list[dict], path) -> None:
    if not rows:
        with open(path, "w", encoding="utf-8"):
            pass
        return
    keys = list(rows[0].keys())
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys)
        writer.writeheader()
        writer.writerows(rows)
