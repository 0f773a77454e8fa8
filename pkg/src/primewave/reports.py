"""File emitters: CSV tables, SVG drawings and the JSON run summary."""

from __future__ import annotations

import csv
import json
import math
import os
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__

OUT_ENV = "PRIMEWAVE_OUT"

HEADERS = {
    "primes": ["p"],
    "marks": ["value", "x", "cofactor", "branch", "seq"],
    "atlas": ["value", "host", "path", "label", "class"],
    "graph": ["parent", "child", "class", "origin_value"],
    "argand": ["t", "re", "im"],
    "phase": ["t", "theta", "jump_flag"],
    "zeros": ["t_zero", "bracket_lo", "bracket_hi"],
    "xray": ["label", "parity", "escapes", "asym_index", "sq_class", "t_at_reference"],
}


def default_out_dir() -> Path:
    return Path(os.environ.get(OUT_ENV, "."))


def fmt(v) -> str:
    """Cell text: floats with 17 significant digits, bools lowercase, None empty."""
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def write_csv(path: Path, kind: str, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(HEADERS[kind])
        for r in rows:
            w.writerow([fmt(x) for x in r])
    return path


def write_summary(path: Path, argv, args: dict, timings: dict, results: dict) -> Path:
    doc = {
        "argv": list(argv),
        "inputs": {k: v for k, v in args.items()},
        "versions": {
            "primewave": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "timings": timings,
        "results": results,
    }
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(doc, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")
    return path


def _json_default(o):
    if isinstance(o, np.integer):
        return int(o)
    if isinstance(o, np.floating):
        return float(o)
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (set, tuple)):
        return list(o)
    return str(o)


# -------------------------------------------------------------------- rows

def prime_rows(primes):
    return ([int(p)] for p in primes)


def mark_rows(marks):
    for m in marks:
        yield [m.value, m.x, m.cofactor, m.branch, m.seq.value]


def atlas_rows(table):
    for r in table.rows:
        yield [r.value, r.host, r.path, r.label, r.cls]


def graph_rows(graph):
    for parent, child, cls, origin in graph.edges:
        yield ["" if parent is None else str(parent), str(child), cls.value, origin]


def argand_rows(path):
    for t, v in zip(path.t, path.values):
        yield [float(t), float(v.real), float(v.imag)]


def phase_rows(trace):
    for t, th, flag in zip(trace.t, trace.theta, trace.jump_flags):
        yield [float(t), float(th), int(bool(flag))]


def zero_rows(zl):
    for z, (a, b) in zip(zl.zeros, zl.brackets):
        yield [z, a, b]


def xray_rows(report):
    for r in report.rows:
        yield [r.label, r.parity, r.escapes, r.asym_index, r.sq_class, r.t_at_reference]


# --------------------------------------------------------------------- svg

def _poly(points, style):
    coords = " ".join(f"{x:.1f},{y:.1f}" for x, y in points)
    return f'<polyline points="{coords}" {style}/>'


def _svg_doc(w, h, body):
    head = (f'<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0f}" height="{h:.0f}" '
            f'viewBox="0 0 {w:.0f} {h:.0f}" font-family="sans-serif">')
    return "\n".join([head, f'<rect width="{w:.0f}" height="{h:.0f}" fill="white"/>', *body, "</svg>", ""])


def _runs(mask):
    """Contiguous True runs of a boolean array as (start, stop) pairs."""
    d = np.diff(np.concatenate([[0], mask.astype(np.int8), [0]]))
    return zip(np.nonzero(d == 1)[0], np.nonzero(d == -1)[0])


def xray_svg(report, zeros=(), sigma_range=(-1.0, 2.0), strip_height=40.0,
             px_per_unit=12.0) -> str:
    """Strips of height 40 in t placed side by side, left to right in increasing t."""
    s_lo, s_hi = sigma_range
    n_strips = max(1, math.ceil(report.t_max / strip_height - 1e-9))
    sw = (s_hi - s_lo) * px_per_unit * 5
    sh = strip_height * px_per_unit
    pad, gap = 30.0, 24.0
    body = []
    for k in range(n_strips):
        t0 = k * strip_height
        t1 = t0 + strip_height
        x0 = pad + k * (sw + gap)
        clip = f"strip{k}"
        body.append(f'<clipPath id="{clip}"><rect x="{x0:.1f}" y="{pad:.1f}" '
                    f'width="{sw:.1f}" height="{sh:.1f}"/></clipPath>')
        body.append(f'<rect x="{x0:.1f}" y="{pad:.1f}" width="{sw:.1f}" height="{sh:.1f}" '
                    f'fill="none" stroke="#999"/>')
        xc = x0 + (0.5 - s_lo) / (s_hi - s_lo) * sw
        body.append(f'<line x1="{xc:.1f}" y1="{pad:.1f}" x2="{xc:.1f}" y2="{pad + sh:.1f}" '
                    f'stroke="#ccc" stroke-dasharray="3,3"/>')
        body.append(f'<text x="{x0:.1f}" y="{pad + sh + 14:.1f}" font-size="10">t {t0:g}-{t1:g}</text>')

        def xy(p):
            return (x0 + (p[:, 0] - s_lo) / (s_hi - s_lo) * sw,
                    pad + sh - (p[:, 1] - t0) / strip_height * sh)

        g = [f'<g clip-path="url(#{clip})">']
        for c in report.curves:
            p = c.points
            inside = (p[:, 1] >= t0 - 0.5) & (p[:, 1] <= t1 + 0.5) & (p[:, 0] <= s_hi + 0.5)
            style = ('fill="none" stroke="black" stroke-width="1.6"' if c.parity == "thick"
                     else 'fill="none" stroke="#3a6ea5" stroke-width="0.6"')
            for a, b in _runs(inside):
                if b - a < 2:
                    continue
                x, y = xy(p[a:b])
                g.append(_poly(zip(x, y), style))
        for z in zeros:
            if t0 <= z < t1:
                x, y = xy(np.array([[0.5, z]]))
                g.append(f'<circle cx="{x[0]:.1f}" cy="{y[0]:.1f}" r="2.5" fill="red"/>')
        g.append("</g>")
        body.extend(g)
        for r in report.rows:
            if t0 <= r.t_at_reference < t1:
                y = pad + sh - (r.t_at_reference - t0) / strip_height * sh
                color = "black" if r.parity == "thick" else "#3a6ea5"
                body.append(f'<text x="{x0 - 2:.1f}" y="{y + 2:.1f}" font-size="5" '
                            f'text-anchor="end" fill="{color}">{r.label}</text>')
    w = 2 * pad + n_strips * sw + (n_strips - 1) * gap
    h = 2 * pad + sh
    return _svg_doc(w, h, body)


def argand_svg(path, size=480.0) -> str:
    v = path.values
    r = max(float(np.max(np.abs(v.real))), float(np.max(np.abs(v.imag))), 1e-9) * 1.05
    scale = size / (2 * r)

    def xy(z):
        return size / 2 + z.real * scale, size / 2 - z.imag * scale

    x, y = xy(v)
    body = [
        f'<line x1="0" y1="{size / 2:.1f}" x2="{size:.1f}" y2="{size / 2:.1f}" stroke="#ccc"/>',
        f'<line x1="{size / 2:.1f}" y1="0" x2="{size / 2:.1f}" y2="{size:.1f}" stroke="#ccc"/>',
        _poly(zip(x, y), 'fill="none" stroke="black" stroke-width="0.8"'),
        f'<circle cx="{size / 2:.1f}" cy="{size / 2:.1f}" r="3" fill="red"/>',
        f'<text x="6" y="14" font-size="11">sigma = {path.sigma:g}, '
        f'origin loops: {path.origin_approaches}</text>',
    ]
    for i, (t, m) in enumerate(path.approaches):
        body.append(f'<text x="{size / 2 + 5:.1f}" y="{size / 2 - 5 - 9 * i:.1f}" '
                    f'font-size="7">t={t:.4f}</text>')
    return _svg_doc(size, size, body)


def write_text(path: Path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    return path


def echo(msg: str) -> None:
    print(msg, file=sys.stderr)
