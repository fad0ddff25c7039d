"""JSON/CSV/SVG input and output for the CLI.

Schemas (versioned in every report):
  driving  {"interp": "...", "samples": [[t, u], ...], "coeffs": [...]?}
  slit     {"vertices": [[x, y], ...]}
  system   {"lambdas": [...], "drivings": [driving, ...]}

Numeric fields are emitted with 17 significant digits; writes go through a
temp file + rename so outputs are atomic. Given the same seed a run emits
byte-identical files.
"""

from __future__ import annotations

import json
import os
import tempfile
from typing import Optional

import numpy as np

from .driving import MultiSlitSystem, SampledDriving
from .errors import DomainError
from .inverse import SlitPolyline

SCHEMA_PREFIX = "loewner"
SCHEMA_VERSION = 1


def fmt(x) -> float:
    """Round-trip float through its 17-significant-digit decimal form."""
    return float(f"{float(x):.17g}")


def _fmt_tree(obj):
    if isinstance(obj, dict):
        return {k: _fmt_tree(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_fmt_tree(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (float, np.floating)):
        return fmt(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, np.ndarray):
        return _fmt_tree(obj.tolist())
    return obj


def write_atomic(path: str, data: str):
    d = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def dump_report(kind: str, payload: dict, path: Optional[str] = None) -> str:
    doc = {"schema": f"{SCHEMA_PREFIX}/{kind}/{SCHEMA_VERSION}"}
    doc.update(_fmt_tree(payload))
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if path:
        write_atomic(path, text)
    return text


# -- drivings ---------------------------------------------------------------

def driving_to_json(d: SampledDriving) -> dict:
    out = {"interp": d.interp,
           "samples": [[fmt(t), fmt(u)] for t, u in zip(d.times, d.values)]}
    if d.coeffs is not None:
        out["coeffs"] = [fmt(c) for c in d.coeffs]
    return out


def driving_from_json(obj: dict) -> SampledDriving:
    try:
        samples = np.asarray(obj["samples"], dtype=float)
        interp = obj.get("interp", "linear")
    except (KeyError, TypeError, ValueError) as e:
        raise DomainError(f"malformed driving JSON: {e}")
    if samples.ndim != 2 or samples.shape[1] != 2:
        raise DomainError("driving samples must be [[t, u], ...]")
    coeffs = obj.get("coeffs")
    if coeffs is not None:
        coeffs = np.asarray(coeffs, dtype=float)
    return SampledDriving(samples[:, 0], samples[:, 1], interp, coeffs=coeffs)


# -- slits --------------------------------------------------------------------

def slit_to_json(s: SlitPolyline) -> dict:
    return {"vertices": [[fmt(v.real), fmt(v.imag)] for v in s.vertices]}


def slit_from_json(obj: dict) -> SlitPolyline:
    try:
        verts = np.asarray(obj["vertices"], dtype=float)
    except (KeyError, TypeError, ValueError) as e:
        raise DomainError(f"malformed slit JSON: {e}")
    if verts.ndim != 2 or verts.shape[1] != 2:
        raise DomainError("slit vertices must be [[x, y], ...]")
    return SlitPolyline(verts[:, 0] + 1j * verts[:, 1])


def slits_from_json(obj) -> list:
    if isinstance(obj, dict) and "slits" in obj:
        return [slit_from_json(o) for o in obj["slits"]]
    if isinstance(obj, dict):
        return [slit_from_json(obj)]
    raise DomainError("expected a slit object or {'slits': [...]}")


# -- systems ------------------------------------------------------------------

def system_to_json(sys: MultiSlitSystem) -> dict:
    if sys._constant is None:
        raise DomainError("only constant-weight systems serialize")
    return {"lambdas": [fmt(v) for v in sys._constant],
            "drivings": [driving_to_json(d) for d in sys.drivings]}


def system_from_json(obj: dict) -> MultiSlitSystem:
    try:
        lams = np.asarray(obj["lambdas"], dtype=float)
        drvs = [driving_from_json(o) for o in obj["drivings"]]
    except (KeyError, TypeError, ValueError) as e:
        raise DomainError(f"malformed system JSON: {e}")
    return MultiSlitSystem(lams, drvs)


def load_json(path: str) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as e:
        raise DomainError(f"cannot read JSON from {path}: {e}")


# -- CSV / SVG ----------------------------------------------------------------

def trace_to_csv(times, curves) -> str:
    multi = len(curves) > 1
    lines = ["t,re,im,slit_index" if multi else "t,re,im"]
    for k, curve in enumerate(curves):
        for t, z in zip(times, curve):
            row = f"{fmt(t):.17g},{fmt(z.real):.17g},{fmt(z.imag):.17g}"
            lines.append(row + f",{k}" if multi else row)
    return "\n".join(lines) + "\n"


def trace_to_svg(curves, width: int = 640, height: int = 480) -> str:
    pts = np.concatenate([np.asarray(c) for c in curves])
    x0, x1 = float(pts.real.min()), float(pts.real.max())
    y1 = float(pts.imag.max())
    pad = 0.08 * max(x1 - x0, y1, 1e-9)
    x0, x1 = x0 - pad, x1 + pad
    y1 = y1 + pad

    def sx(x):
        return (x - x0) / (x1 - x0) * width

    def sy(y):
        return height - y / y1 * (height - 12) - 6

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
             f'height="{height}" viewBox="0 0 {width} {height}">',
             f'<line x1="0" y1="{sy(0):.2f}" x2="{width}" y2="{sy(0):.2f}" '
             'stroke="#888" stroke-width="1"/>']
    for k, curve in enumerate(curves):
        c = np.asarray(curve)
        d = " ".join(f"{'M' if i == 0 else 'L'}{sx(z.real):.2f},{sy(z.imag):.2f}"
                     for i, z in enumerate(c))
        col = colors[k % len(colors)]
        parts.append(f'<path d="{d}" fill="none" stroke="{col}" stroke-width="1.2"/>')
        parts.append(f'<circle cx="{sx(c[0].real):.2f}" cy="{sy(0):.2f}" r="3" '
                     f'fill="{col}"/>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
