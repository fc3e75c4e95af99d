"""CSV ingestion (p-values, z-statistics, or survival-probability pairs),
the arcsine variance-stabilizing pipeline, and machine-readable reports."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .special import std_normal_cdf

__all__ = ["InputData", "InputError", "read_input_csv", "arcsine_z", "Report", "topk_subsets"]

# Recognized header sets, in detection order.
_SCHEMAS = {
    "p": {"id", "p"},
    "z": {"id", "z"},
    "survival": {"id", "pi_trt", "se_trt", "pi_ctl", "se_ctl"},
}


class InputError(ValueError):
    """Malformed input file or unrecognized schema."""


@dataclass(frozen=True)
class InputData:
    """Parsed records: p-values for the 'theta <= 0' nulls plus optional
    z-statistics (kept for |z|-based orderings)."""

    ids: tuple
    pvalues: np.ndarray
    z: np.ndarray | None
    schema: str

    @property
    def n(self) -> int:
        return len(self.ids)

    def index_of(self, record_id: str) -> int:
        try:
            return self.ids.index(record_id)
        except ValueError:
            raise InputError(f"unknown record id {record_id!r}") from None


def read_input_csv(path) -> InputData:
    """Load a UTF-8 CSV with one of the recognized header sets:
    {id,p}, {id,z} or {id,pi_trt,se_trt,pi_ctl,se_ctl}."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None:
            raise InputError(f"{path}: empty file")
        header = {name.strip() for name in reader.fieldnames}
        schema = next((s for s, cols in _SCHEMAS.items() if header == cols), None)
        if schema is None:
            raise InputError(
                f"{path}: unrecognized columns {sorted(header)}; expected exactly one of "
                + " | ".join("{" + ",".join(sorted(c)) + "}" for c in _SCHEMAS.values())
            )
        rows = list(reader)
    if not rows:
        raise InputError(f"{path}: no data rows")
    ids = []
    for k, row in enumerate(rows, start=2):
        rid = (row.get("id") or "").strip()
        if not rid:
            raise InputError(f"{path}: line {k}: empty id")
        ids.append(rid)
    if len(set(ids)) != len(ids):
        raise InputError(f"{path}: duplicate record ids")
    try:
        if schema == "p":
            p = np.array([float(row["p"]) for row in rows])
            z = None
        elif schema == "z":
            z = np.array([float(row["z"]) for row in rows])
            p = np.array([1.0 - std_normal_cdf(v) for v in z])
        else:
            z = np.array([
                arcsine_z(float(r["pi_trt"]), float(r["se_trt"]),
                          float(r["pi_ctl"]), float(r["se_ctl"]))
                for r in rows
            ])
            p = np.array([1.0 - std_normal_cdf(v) for v in z])
    except InputError:
        raise
    except ValueError as exc:
        raise InputError(f"{path}: non-numeric field ({exc})") from None
    if schema == "p" and (np.any(p < 0) or np.any(p > 1) or np.isnan(p).any()):
        raise InputError(f"{path}: p-values must lie in [0, 1]")
    return InputData(tuple(ids), p, z, schema)


def arcsine_z(pi_trt: float, se_trt: float, pi_ctl: float, se_ctl: float) -> float:
    """Standardized arcsine-square-root difference of two survival estimates.

    Variances are stabilized through the effective sample sizes
    m = pi(1-pi)/SE^2, giving a large-sample N(0,1) statistic under equal
    survival.
    """
    for pi in (pi_trt, pi_ctl):
        if not 0.0 < pi < 1.0:
            raise InputError(f"survival estimate {pi!r} must lie strictly in (0, 1)")
    for se in (se_trt, se_ctl):
        if not se > 0.0:
            raise InputError(f"standard error {se!r} must be > 0")
    m_trt = pi_trt * (1.0 - pi_trt) / se_trt**2
    m_ctl = pi_ctl * (1.0 - pi_ctl) / se_ctl**2
    num = math.asin(math.sqrt(pi_trt)) - math.asin(math.sqrt(pi_ctl))
    return num / math.sqrt(1.0 / (4.0 * m_trt) + 1.0 / (4.0 * m_ctl))


def topk_subsets(data: InputData, k_max: int) -> list:
    """Index sets of the k records with largest |z|, k = 1..k_max; ties
    broken by id."""
    if data.z is None:
        raise InputError("top-k sweeps require z or survival input (need |z| ordering)")
    order = sorted(range(data.n), key=lambda i: (-abs(data.z[i]), data.ids[i]))
    return [("top%d" % k, tuple(sorted(order[:k]))) for k in range(1, min(k_max, data.n) + 1)]


@dataclass
class Report:
    """Lossless JSON-ready analysis report.

    Probabilities serialize at full double precision (repr round-trip), so
    re-parsing reproduces every bound and p-value exactly.
    """

    method: str
    combiner: str | None
    alpha: float
    level: str
    n: int
    ids: tuple
    s_minus: tuple = ()
    bounds: dict = field(default_factory=dict)
    subsets: list = field(default_factory=list)
    discoveries: dict = field(default_factory=dict)
    qi_pvalue: float | None = None
    pc_bounds: dict | None = None

    def to_dict(self) -> dict:
        return {
            "method": self.method,
            "combiner": self.combiner,
            "alpha": self.alpha,
            "level": self.level,
            "n": self.n,
            "s_minus": list(self.s_minus),
            "bounds": self.bounds,
            "subsets": self.subsets,
            "discoveries": self.discoveries,
            "qi_pvalue": self.qi_pvalue,
            "pc_bounds": self.pc_bounds,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def csv_rows(self) -> list:
        """One row per subset: (subset, ell_plus, ell_minus, n_plus_lower,
        n_plus_upper)."""
        rows = [("full", self.bounds.get("ell_plus"), self.bounds.get("ell_minus"),
                 self.bounds.get("n_plus_lower"), self.bounds.get("n_plus_upper"))]
        for sub in self.subsets:
            rows.append((sub["name"], sub.get("ell_plus"), sub.get("ell_minus"),
                         sub.get("n_plus_lower"), sub.get("n_plus_upper")))
        return rows

    def write_csv(self, fh):
        writer = csv.writer(fh)
        writer.writerow(["subset", "ell_plus", "ell_minus", "n_plus_lower", "n_plus_upper"])
        for row in self.csv_rows():
            writer.writerow(row)
