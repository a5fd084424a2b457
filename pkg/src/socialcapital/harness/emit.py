"""Writing run summaries as CSV tables, JSON and minimal SVG plots.

CSV header contract (one file per table, long form)::

    stats.csv        point,metric,index,mean,se,n
    comparisons.csv  name,criterion,predicted,observed,tolerance,passed,in_regime,provenance,detail
    series.csv       plot,series,x,y

``index`` is the position inside a vector-valued metric (empty for
scalars).  Floats are written with ``repr`` so the files are byte-stable
for a given summary.  ``summary.json`` holds the full
:class:`~socialcapital.harness.runner.RunSummary`; :func:`load_summary`
reads it back.  SVGs hold one polyline per series, oracle curves dashed.
"""
from __future__ import annotations

import csv
import io
import json
import os
from typing import Iterable, Sequence
from xml.sax.saxutils import escape

from .runner import RunSummary

__all__ = ["emit", "load_summary", "EmitError", "STATS_HEADER", "COMPARISONS_HEADER", "SERIES_HEADER"]

STATS_HEADER = ("point", "metric", "index", "mean", "se", "n")
COMPARISONS_HEADER = (
    "name", "criterion", "predicted", "observed", "tolerance", "passed", "in_regime", "provenance", "detail",
)
SERIES_HEADER = ("plot", "series", "x", "y")

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")


class EmitError(OSError):
    """Output could not be written; carries the offending path."""

    def __init__(self, path: str, reason: str):
        super().__init__(f"cannot write {path}: {reason}")
        self.path = path


def _cell(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def _table(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def _stats_rows(d: dict):
    for pt in d["points"]:
        for metric, s in pt["stats"].items():
            mean, se, n = s.get("mean"), s.get("se"), s.get("n")
            if isinstance(mean, list):
                ses = se if isinstance(se, list) else [None] * len(mean)
                stride = s.get("stride", 1)
                for k, (m, e) in enumerate(zip(mean, ses)):
                    yield pt["label"], metric, k * stride, m, e, n
            else:
                yield pt["label"], metric, "", mean, se, n


def _series_rows(d: dict):
    for s in d["series"]:
        for x, y in zip(s["x"], s["y"]):
            yield s["plot"], s["series"], x, y


def _write(path: str, text: str) -> str:
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise EmitError(path, exc.strerror or str(exc)) from exc
    return path


# -- svg ---------------------------------------------------------------------


def _is_oracle(label: str) -> bool:
    return any(w in label for w in ("oracle", "bound", "mean-field", "optimum"))


def svg_plot(series: list[dict], title: str, xlabel: str = "", ylabel: str = "",
             width: int = 640, height: int = 400) -> str:
    """Line plot of several series with axes, ticks and a legend."""
    left, right, top, bottom = 64, 150, 32, 48
    pts = [(x, y) for s in series for x, y in zip(s["x"], s["y"]) if x is not None and y is not None]
    xs = [p[0] for p in pts] or [0.0, 1.0]
    ys = [p[1] for p in pts] or [0.0, 1.0]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = width - left - right, height - top - bottom

    def sx(x):
        return left + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return top + ph - (y - y0) / (y1 - y0) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="11">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<text x="{left}" y="20" font-size="13">{escape(title)}</text>',
        f'<line x1="{left}" y1="{top + ph}" x2="{left + pw}" y2="{top + ph}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{top + ph}" stroke="black"/>',
    ]
    for k in range(5):
        xv = x0 + (x1 - x0) * k / 4
        yv = y0 + (y1 - y0) * k / 4
        out.append(f'<text x="{sx(xv):.1f}" y="{top + ph + 16}" text-anchor="middle">{xv:.4g}</text>')
        out.append(f'<text x="{left - 6}" y="{sy(yv) + 4:.1f}" text-anchor="end">{yv:.4g}</text>')
    out.append(f'<text x="{left + pw / 2:.1f}" y="{height - 10}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(
        f'<text x="14" y="{top + ph / 2:.1f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {top + ph / 2:.1f})">{escape(ylabel)}</text>'
    )
    for n, s in enumerate(series):
        color = _PALETTE[n % len(_PALETTE)]
        dash = ' stroke-dasharray="5,3"' if _is_oracle(s["series"]) else ""
        coords = " ".join(
            f"{sx(x):.2f},{sy(y):.2f}" for x, y in zip(s["x"], s["y"]) if x is not None and y is not None
        )
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5"{dash} points="{coords}"/>')
        ly = top + 14 * n + 8
        out.append(f'<line x1="{left + pw + 10}" y1="{ly}" x2="{left + pw + 30}" y2="{ly}" '
                   f'stroke="{color}" stroke-width="2"{dash}/>')
        out.append(f'<text x="{left + pw + 34}" y="{ly + 4}">{escape(s["series"])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- entry points --------------------------------------------------------------


def emit(summary: RunSummary, out_dir: str, formats: Sequence[str] = ("csv", "json", "svg"),
         axes: dict | None = None) -> list[str]:
    """Write the requested formats into ``out_dir`` and return the file paths.

    Raises
    ------
    EmitError
        When the directory or a file cannot be written.
    ValueError
        On an unknown format name.
    """
    bad = set(formats) - {"csv", "json", "svg"}
    if bad:
        raise ValueError(f"unknown output format(s): {sorted(bad)}")
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as exc:
        raise EmitError(out_dir, exc.strerror or str(exc)) from exc
    d = summary.to_dict()
    written = []
    if "csv" in formats:
        comp_rows = ([c[k] for k in COMPARISONS_HEADER] for c in d["comparisons"])
        written.append(_write(os.path.join(out_dir, "stats.csv"), _table(STATS_HEADER, _stats_rows(d))))
        written.append(_write(os.path.join(out_dir, "comparisons.csv"), _table(COMPARISONS_HEADER, comp_rows)))
        written.append(_write(os.path.join(out_dir, "series.csv"), _table(SERIES_HEADER, _series_rows(d))))
    if "json" in formats:
        text = json.dumps(d, indent=2, sort_keys=True, allow_nan=False) + "\n"
        written.append(_write(os.path.join(out_dir, "summary.json"), text))
    if "svg" in formats:
        axes = axes or {}
        plots: dict[str, list] = {}
        for s in d["series"]:
            plots.setdefault(s["plot"], []).append(s)
        for name, ss in plots.items():
            xl, yl = axes.get(name, ("", ""))
            text = svg_plot(ss, f"{summary.preset}: {name}", xl, yl)
            written.append(_write(os.path.join(out_dir, f"{name}.svg"), text))
    return written


def load_summary(path: str) -> RunSummary:
    """Read a ``summary.json`` written by :func:`emit`."""
    if os.path.isdir(path):
        path = os.path.join(path, "summary.json")
    with open(path, encoding="utf-8") as fh:
        return RunSummary.from_dict(json.load(fh))
