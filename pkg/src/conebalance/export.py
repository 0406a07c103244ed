"""
Serialization of pipeline results to JSON and CSV.

CSV floats are written with 17 significant digits and JSON floats with
Python's shortest round-trip repr, so both round trips are lossless.
"""

import json

import numpy as np

from .spectral import grid

FLOAT_FORMAT = "{:.17g}"


def _plain(obj):
    """Recursively convert numpy scalars/arrays into JSON-ready Python objects."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if np.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    return obj


def dumps(obj) -> str:
    """Deterministic JSON with sorted keys; floats use the shortest round-trip repr."""
    return json.dumps(_plain(obj), indent=1, sort_keys=True) + "\n"


def _fmt(v) -> str:
    return FLOAT_FORMAT.format(float(v))


def csv_table(header: str, columns, comment: str | None = None) -> str:
    lines = [f"# {comment}"] if comment else []
    lines.append(header)
    for row in zip(*columns):
        lines.append(",".join(str(v) if isinstance(v, (int, np.integer)) else _fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _header(n, flipped) -> str:
    return f"N={n} orientation_flipped={str(bool(flipped)).lower()}"


def coefficients_csv(lift) -> str:
    return csv_table("t,alpha,beta", (lift.t, lift.alpha, lift.beta),
                     _header(lift.n, lift.orientation_flipped))


def frames_json(frame, flipped=False) -> str:
    return dumps({"N": frame.Y.shape[0], "orientation_flipped": bool(flipped),
                  "frames": [m.tolist() for m in frame.Y]})


def monodromy_report(cls, system=None) -> dict:
    out = cls.report()
    if system is not None:
        out["T"] = system.T.tolist()
        out["det_defect"] = abs(float(np.linalg.det(system.T)) - 1.0)
    return out


def balanced_report(result) -> dict:
    return {
        "alpha_star": result.alpha_star,
        "case": result.case_tag,
        "beta": result.beta_balanced,
        "s_of_t": result.reparam.s_of_t,
        "warnings": list(result.warnings),
        "non_unique": result.non_unique,
        "alpha_deviation": result.alpha_deviation,
        "beta_deviation": result.beta_deviation,
    }


def balanced_csv(result, flipped=False) -> str:
    y = result.y_balanced
    n = y.shape[0]
    return csv_table("s,beta,y0,y1,y2", (grid(n), result.beta_balanced, y[:, 0], y[:, 1], y[:, 2]),
                     _header(n, flipped))


def sextactic_report(report) -> dict:
    return {
        "zeros": report.zeros,
        "count": report.count,
        "segment_lengths": report.segment_lengths,
        "total_length": report.total_length,
        "touch_points": report.touch_points,
        "warnings": report.warnings,
    }


def segments_csv(report) -> str:
    z = report.zeros
    ends = z[1:] + z[:1]
    return csv_table("i,s_start,s_end,length",
                     (list(range(len(report.segment_lengths))), z, ends, report.segment_lengths))
