"""Self-contained SVG renderings of the report grids (no plotting library)."""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

W, H = 640, 400
ML, MR, MT, MB = 70, 20, 36, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd")


def _ticks(lo, hi, n=5):
    if hi == lo:
        return [lo]
    step = 10 ** math.floor(math.log10((hi - lo) / n))
    for m in (1, 2, 5, 10):
        if (hi - lo) / (step * m) <= n:
            step *= m
            break
    start = math.ceil(lo / step) * step
    return [start + i * step for i in range(int((hi - start) / step + 1e-9) + 1)]


def _frame(title, xlabel, ylabel, xr, yr):
    x0, x1 = xr
    y0, y1 = yr
    sx = lambda x: ML + (x - x0) / (x1 - x0 or 1) * (W - ML - MR)
    sy = lambda y: H - MB - (y - y0) / (y1 - y0 or 1) * (H - MT - MB)
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="11">',
             f'<rect width="{W}" height="{H}" fill="white"/>',
             f'<text x="{W / 2}" y="20" text-anchor="middle" font-size="14">{escape(title)}</text>',
             f'<rect x="{ML}" y="{MT}" width="{W - ML - MR}" height="{H - MT - MB}" fill="none" stroke="black"/>']
    for t in _ticks(x0, x1):
        parts.append(f'<text x="{sx(t):.1f}" y="{H - MB + 15}" text-anchor="middle">{t:g}</text>')
    for t in _ticks(y0, y1):
        parts.append(f'<text x="{ML - 5}" y="{sy(t) + 4:.1f}" text-anchor="end">{t:g}</text>')
        parts.append(f'<line x1="{ML}" x2="{W - MR}" y1="{sy(t):.1f}" y2="{sy(t):.1f}" stroke="#ddd"/>')
    parts.append(f'<text x="{W / 2}" y="{H - 12}" text-anchor="middle">{escape(xlabel)}</text>')
    parts.append(f'<text x="16" y="{H / 2}" text-anchor="middle" transform="rotate(-90 16 {H / 2})">{escape(ylabel)}</text>')
    return parts, sx, sy


def line_chart(series: dict, title: str, xlabel: str, ylabel: str) -> str:
    finite = [(np.asarray(x, float), np.asarray(y, float)) for x, y in series.values()]
    xs = np.concatenate([x for x, _ in finite])
    ys = np.concatenate([y[np.isfinite(y)] for _, y in finite]) if finite else np.array([0.0])
    if ys.size == 0:
        ys = np.array([0.0, 1.0])
    pad = 0.05 * (ys.max() - ys.min() or 1)
    parts, sx, sy = _frame(title, xlabel, ylabel, (xs.min(), xs.max()), (ys.min() - pad, ys.max() + pad))
    for i, (label, (x, y)) in enumerate(series.items()):
        c = COLORS[i % len(COLORS)]
        pts = " ".join(f"{sx(a):.1f},{sy(b):.1f}" for a, b in zip(x, y) if np.isfinite(b))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{c}" stroke-width="1.5"/>')
        parts.append(f'<text x="{W - MR - 5}" y="{MT + 15 + 14 * i}" text-anchor="end" fill="{c}">{escape(label)}</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def heatmap(z: np.ndarray, x: np.ndarray, y: np.ndarray, title: str, xlabel: str, ylabel: str,
            zmin: float, zmax: float, max_cols: int = 400) -> str:
    """Rows of ``z`` along y, columns along x; columns max-pooled to ``max_cols``."""
    step = max(1, math.ceil(z.shape[1] / max_cols))
    ncol = math.ceil(z.shape[1] / step)
    pad = ncol * step - z.shape[1]
    zp = np.pad(z, ((0, 0), (0, pad)), constant_values=-np.inf).reshape(z.shape[0], ncol, step).max(axis=2)
    parts, sx, sy = _frame(title, xlabel, ylabel, (x[0], x[-1]), (y[0], y[-1]))
    cw = (W - ML - MR) / ncol
    ch = (H - MT - MB) / max(len(y), 1)
    for i in range(zp.shape[0]):
        for j in range(ncol):
            t = np.clip((zp[i, j] - zmin) / (zmax - zmin), 0, 1) if np.isfinite(zp[i, j]) else 0.0
            g = int(255 * (1 - t))
            parts.append(f'<rect x="{ML + j * cw:.2f}" y="{H - MB - (i + 1) * ch:.2f}" width="{cw + 0.3:.2f}" '
                         f'height="{ch + 0.3:.2f}" fill="rgb({255 - g // 3},{g},{g})"/>')
    parts.append("</svg>")
    return "\n".join(parts)


def render_report(report, out_dir) -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {}
    for key, ylabel in (("exponent", "n(f)"), ("intercept", "A(f) [dB]"), ("sigma", "sigma(f) [dB]")):
        series = {k: (sw.frequencies / 1e9, getattr(sw, key)) for k, sw in report.sweeps.items()}
        if series:
            files[f"fit_{key}.svg"] = line_chart(series, f"Power-law {ylabel}", "Frequency [GHz]", ylabel)
    corridors = sorted({r.corridor for r in report.small_scale})
    for attr, scale, ylabel in (("k_factor", 1, "K [dB]"), ("delay_spread", 1e9, "D_s [ns]"),
                                ("coherence_bw", 1e-6, "B_c [MHz]")):
        series = {}
        for c in corridors:
            recs = report.for_corridor(c)
            series[c] = (np.array([r.d for r in recs]), np.array([getattr(r, attr) * scale for r in recs]))
        files[f"{attr}.svg"] = line_chart(series, ylabel + " vs distance", "Tx-Rx distance [m]", ylabel)
    for label, g in report.pdp_grids.items():
        peak = np.max(g.power_db[np.isfinite(g.power_db)]) if np.any(np.isfinite(g.power_db)) else 0.0
        files[f"pdp_{label}.svg"] = heatmap(g.power_db, g.delay_distances, g.distances,
                                            f"PDP {label} [dB]", "Delay distance [m]",
                                            "Tx-Rx distance [m]", peak - 60, peak)
    written = []
    for name, text in files.items():
        p = out / name
        p.write_text(text)
        written.append(p)
    return written
