"""CSV tables, flat config files and minimal SVG plots."""
from __future__ import annotations

import math
import os
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .errors import InvalidArgument

TIMESERIES_COLUMNS = ("time", "current", "p_minus1", "p_0", "p_plus1")
LYAPUNOV_COLUMNS = ("time", "log_ratio")
SWEEP_COLUMNS = ("param_value", "tac")
PORTRAIT_COLUMNS = ("current", "phase_diff")
TWIN_COLUMNS = ("time", "current", "current_twin")
LYAPUNOV_SCAN_COLUMNS = ("param_value", "lambda", "lambda_ratio")
INSTABILITY_COLUMNS = ("param_value", "if")

OUTPUT_DIR_ENV = "RINGRATCHET_OUTPUT_DIR"


def fmt(value) -> str:
    v = float(value)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.17g}"


def write_csv(path, columns, *data) -> Path:
    """Write equal-length columns with a header; floats at 17 significant digits."""
    cols = [np.asarray(c, dtype=float).ravel() for c in data]
    if len(cols) != len(columns):
        raise InvalidArgument(f"{len(columns)} column names for {len(cols)} columns")
    if len({c.size for c in cols}) > 1:
        raise InvalidArgument("columns differ in length")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(columns)]
    lines.extend(",".join(fmt(v) for v in row) for row in zip(*cols))
    path.write_text("\n".join(lines) + "\n")
    return path


def read_csv(path):
    """``(columns, array)`` for a file written by :func:`write_csv`."""
    with open(path) as f:
        header = f.readline().strip().split(",")
    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    return tuple(header), data


def write_timeseries(path, times, currents, populations):
    p = np.asarray(populations)
    return write_csv(path, TIMESERIES_COLUMNS, times, currents, p[:, 0], p[:, 1], p[:, 2])


# ---------------------------------------------------------------------------
# run configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    experiment: str = "evolve-tmm"
    g: float = 0.1
    K: float = 2.0
    omega: float = 10.0
    grid_points: int = 256
    steps_per_period: int = 1000
    periods: int = 8000
    sample_stride: int = 10
    w_minus1: float = 0.5
    w_0: float = 0.5
    phase: float = 0.0
    output_dir: str = ""

    def merged(self, overrides: dict) -> "RunConfig":
        known = {f.name: f.type for f in fields(self)}
        clean = {}
        for key, raw in overrides.items():
            key = key.replace("-", "_")
            if key not in known:
                raise InvalidArgument(f"unknown config key {key!r}")
            if raw is None:
                continue
            if isinstance(raw, str):
                raw = _coerce(getattr(self, key), raw)
            clean[key] = raw
        return replace(self, **clean)

    def resolved_output_dir(self) -> Path:
        return Path(self.output_dir or os.environ.get(OUTPUT_DIR_ENV, "") or ".")


def _coerce(default, text):
    text = text.strip()
    try:
        if isinstance(default, bool):
            return text.lower() in ("1", "true", "yes", "on")
        if isinstance(default, int):
            return int(text)
        if isinstance(default, float):
            return float(text)
    except ValueError:
        raise InvalidArgument(f"cannot parse {text!r} as {type(default).__name__}") from None
    return text


def parse_config_text(text: str) -> dict:
    """Flat ``key = value`` lines; ``#`` starts a comment; blank lines ignored."""
    out = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise InvalidArgument(f"config line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        out[key.strip()] = value.strip()
    return out


def load_config(path) -> dict:
    return parse_config_text(Path(path).read_text())


# ---------------------------------------------------------------------------
# SVG
# ---------------------------------------------------------------------------

_W, _H, _PAD = 640, 400, 50


def _scale(v, lo, hi, a, b):
    if hi == lo:
        return 0.5 * (a + b)
    return a + (v - lo) * (b - a) / (hi - lo)


def write_svg(path, x, ys, labels=(), title="", xlabel="", ylabel="",
              scatter=False) -> Path:
    """Line (or scatter) plot of one or more series sharing ``x``."""
    x = np.asarray(x, dtype=float)
    several = isinstance(ys, (list, tuple)) and len(ys) > 0 and np.ndim(ys[0]) > 0
    ys = [np.asarray(y, dtype=float) for y in (ys if several else [ys])]
    finite = np.concatenate([y[np.isfinite(y)] for y in ys] or [np.zeros(1)])
    x0, x1 = float(np.nanmin(x)), float(np.nanmax(x))
    y0, y1 = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    colors = ("#1f77b4", "#d62728", "#2ca02c", "#000000")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_W}" height="{_H}">',
        f'<rect width="{_W}" height="{_H}" fill="white"/>',
        f'<rect x="{_PAD}" y="{_PAD}" width="{_W - 2 * _PAD}" height="{_H - 2 * _PAD}" '
        'fill="none" stroke="black"/>',
        f'<text x="{_W / 2}" y="{_PAD / 2}" text-anchor="middle">{title}</text>',
        f'<text x="{_W / 2}" y="{_H - 10}" text-anchor="middle">{xlabel}</text>',
        f'<text x="15" y="{_H / 2}" transform="rotate(-90 15 {_H / 2})" '
        f'text-anchor="middle">{ylabel}</text>',
        f'<text x="{_PAD}" y="{_H - _PAD + 15}" font-size="10">{x0:.4g}</text>',
        f'<text x="{_W - _PAD}" y="{_H - _PAD + 15}" font-size="10" '
        f'text-anchor="end">{x1:.4g}</text>',
        f'<text x="{_PAD - 5}" y="{_H - _PAD}" font-size="10" text-anchor="end">{y0:.4g}</text>',
        f'<text x="{_PAD - 5}" y="{_PAD + 10}" font-size="10" text-anchor="end">{y1:.4g}</text>',
    ]
    # Cap the vertex count so long runs stay viewable.
    step = max(1, x.size // 4000)
    for k, y in enumerate(ys):
        color = colors[k % len(colors)]
        px = _scale(x[::step], x0, x1, _PAD, _W - _PAD)
        py = _scale(y[::step], y0, y1, _H - _PAD, _PAD)
        ok = np.isfinite(py)
        if scatter:
            parts.extend(f'<circle cx="{a:.2f}" cy="{b:.2f}" r="1" fill="{color}"/>'
                         for a, b in zip(px[ok], py[ok]))
        else:
            pts = " ".join(f"{a:.2f},{b:.2f}" for a, b in zip(px[ok], py[ok]))
            parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1" '
                         f'points="{pts}"/>')
        if k < len(labels):
            parts.append(f'<text x="{_W - _PAD - 5}" y="{_PAD + 15 * (k + 1)}" '
                         f'text-anchor="end" fill="{color}">{labels[k]}</text>')
    parts.append("</svg>")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(parts) + "\n")
    return path
