"""CSV and JSON serialisation of curves and Monte Carlo results.

Floats are written with ``repr`` (shortest round-trip form), so reading a
file back reproduces the in-memory values exactly.
"""

from __future__ import annotations

import csv
import io
import json
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

import numpy as np

from .closed_form import UNIT_PARALLEL_PROFILE, DmtCurve, Scheme
from .exponents import ChannelProfile
from .montecarlo import OutageEstimate, SlopeFit, SnrPoint

CURVE_FIELDS = ["scheme", "a", "b", "c", "r", "d", "method", "grid_step"]
ESTIMATE_FIELDS = ["scheme", "a", "b", "c", "r", "rho_db", "rate_bits", "p_out", "n_samples", "hits", "ci95_halfwidth", "seed"]
FIT_FIELDS = ["scheme", "a", "b", "c", "r", "diversity_estimate", "intercept", "r_squared", "points_used", "seed"]

PathLike = Union[str, Path]


def _num(x) -> str:
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    return repr(float(x))


def _opt_float(s: str) -> Optional[float]:
    return None if s == "" else float(s)


def curve_rows(curve: DmtCurve) -> list[dict]:
    rows = []
    p = curve.profile
    for r, d in zip(curve.r.tolist(), curve.d.tolist()):
        row = {
            "scheme": curve.scheme.value,
            "a": _num(p.a),
            "b": _num(p.b),
            "c": _num(p.c),
            "r": _num(r),
            "d": _num(d),
            "method": curve.method,
            "grid_step": _num(curve.grid_step),
        }
        if curve.scheme.is_parallel:
            row["network"] = "parallel"
        rows.append(row)
    return rows


def _write_csv(rows: list[dict], fields: list[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def curves_to_csv(curves: Sequence[DmtCurve]) -> str:
    fields = list(CURVE_FIELDS)
    if any(c.scheme.is_parallel for c in curves):
        fields.append("network")
    rows = [row for c in curves for row in curve_rows(c)]
    if "network" in fields:
        for row in rows:
            row.setdefault("network", "single")
    return _write_csv(rows, fields)


def _group_curves(rows: Iterable[dict]) -> list[DmtCurve]:
    groups: dict = {}
    for row in rows:
        key = (row["scheme"], row["a"], row["b"], row["c"], row["method"], row["grid_step"])
        groups.setdefault(key, []).append(row)
    curves = []
    for (scheme, a, b, c, method, step), rs in groups.items():
        sch = Scheme(scheme)
        prof = UNIT_PARALLEL_PROFILE if sch.is_parallel else ChannelProfile(float(a), float(b), float(c))
        curves.append(
            DmtCurve(
                sch,
                prof,
                [float(x["r"]) for x in rs],
                [float(x["d"]) for x in rs],
                method=method,
                grid_step=step if step is None or isinstance(step, float) else _opt_float(step),
            )
        )
    return curves


def curves_from_csv(text: str) -> list[DmtCurve]:
    return _group_curves(csv.DictReader(io.StringIO(text)))


def curves_to_json(curves: Sequence[DmtCurve], meta: Optional[dict] = None) -> str:
    rows = []
    for c in curves:
        for row in curve_rows(c):
            out = {k: row[k] for k in ("scheme", "method")}
            for k in ("a", "b", "c", "r", "d"):
                out[k] = float(row[k])
            out["grid_step"] = c.grid_step
            if "network" in row:
                out["network"] = row["network"]
            rows.append(out)
    return json.dumps({"meta": meta or {}, "rows": rows}, indent=1) + "\n"


def curves_from_json(text: str) -> list[DmtCurve]:
    doc = json.loads(text)
    return _group_curves(doc["rows"])


def _profile_cells(profile: Optional[ChannelProfile]) -> dict:
    p = profile or UNIT_PARALLEL_PROFILE
    return {"a": _num(p.a), "b": _num(p.b), "c": _num(p.c)}


def estimate_rows(label: str, profile, r: float, estimates: Sequence[OutageEstimate], seed: int) -> list[dict]:
    return [
        {
            "scheme": label,
            **_profile_cells(profile),
            "r": _num(r),
            "rho_db": _num(e.snr.rho_db),
            "rate_bits": _num(e.rate_bits),
            "p_out": _num(e.p_out),
            "n_samples": _num(e.n_samples),
            "hits": _num(e.hits),
            "ci95_halfwidth": _num(e.ci95_halfwidth),
            "seed": _num(seed),
        }
        for e in estimates
    ]


def fit_row(label: str, profile, r: float, fit: SlopeFit, seed: int) -> dict:
    return {
        "scheme": label,
        **_profile_cells(profile),
        "r": _num(r),
        "diversity_estimate": _num(fit.diversity_estimate),
        "intercept": _num(fit.intercept),
        "r_squared": _num(fit.r_squared),
        "points_used": _num(fit.points_used),
        "seed": _num(seed),
    }


def estimates_to_csv(rows: list[dict]) -> str:
    return _write_csv(rows, ESTIMATE_FIELDS)


def fit_to_csv(row: dict) -> str:
    return _write_csv([row], FIT_FIELDS)


def estimates_from_csv(text: str) -> list[OutageEstimate]:
    out = []
    for row in csv.DictReader(io.StringIO(text)):
        out.append(
            OutageEstimate(
                SnrPoint(float(row["rho_db"])),
                float(row["rate_bits"]),
                float(row["p_out"]),
                int(row["n_samples"]),
                float(row["ci95_halfwidth"]),
                int(row["hits"]),
            )
        )
    return out


def _jsonify(row: dict) -> dict:
    out = {}
    for k, v in row.items():
        if k == "scheme":
            out[k] = v
        elif k in ("n_samples", "hits", "points_used", "seed"):
            out[k] = int(v)
        else:
            out[k] = float(v)
    return out


def mc_to_json(est_rows: list[dict], fit: Optional[dict], meta: dict) -> str:
    doc = {"meta": meta, "rows": [_jsonify(r) for r in est_rows], "fit": None if fit is None else _jsonify(fit)}
    return json.dumps(doc, indent=1) + "\n"


def write_text(path: PathLike, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text, encoding="utf-8")
