"""Four-panel SVG figure of an MDS run.

Upper left: the embedded points with their labels.  Lower left: stress
relative to its initial value, in dB.  Right column: grey-level maps of the
input distances (top) and of the embedded distances (bottom).

Output is plain text assembled with fixed number formatting, so identical
reports give identical bytes.
"""

from xml.sax.saxutils import escape

import numpy as np

from .errors import TraceError

PANEL_W = 360.0
PANEL_H = 320.0
MARGIN = 40.0
GAP = 40.0


def _f(x):
    return f"{x:.2f}"


def _panel_origin(col, row):
    return MARGIN + col * (PANEL_W + GAP), MARGIN + row * (PANEL_H + GAP)


def _frame(x0, y0, title):
    return [
        f'<rect x="{_f(x0)}" y="{_f(y0)}" width="{_f(PANEL_W)}" height="{_f(PANEL_H)}" '
        'fill="none" stroke="#444" stroke-width="1"/>',
        f'<text x="{_f(x0)}" y="{_f(y0 - 8)}" font-size="13">{escape(title)}</text>',
    ]


def _planar_view(Z):
    """Project onto the two leading principal axes (or pad 1-D data)."""
    Z = np.asarray(Z, dtype=float)
    Z = Z - Z.mean(axis=0)
    if Z.shape[1] == 1:
        return np.hstack([Z, np.zeros_like(Z)])
    if Z.shape[1] == 2:
        return Z
    _, _, vt = np.linalg.svd(Z, full_matrices=False)
    axes = vt[:2]
    # deterministic sign: largest entry of each axis positive
    signs = np.sign(axes[np.arange(2), np.argmax(np.abs(axes), axis=1)])
    return Z @ (axes * signs[:, None]).T


def _scatter(report, x0, y0):
    out = _frame(x0, y0, "Embedded points")
    P = _planar_view(report.Z)
    lo = P.min(axis=0)
    span = max(float(np.max(P.max(axis=0) - lo)), 1e-300)
    pad = 24.0
    scale = min(PANEL_W, PANEL_H) - 2 * pad
    off_x = x0 + pad + 0.5 * (PANEL_W - 2 * pad - scale * (P[:, 0].max() - lo[0]) / span)
    off_y = y0 + pad + 0.5 * (PANEL_H - 2 * pad - scale * (P[:, 1].max() - lo[1]) / span)
    xs = off_x + scale * (P[:, 0] - lo[0]) / span
    ys = off_y + scale * (P[:, 1].max() - P[:, 1]) / span
    if report.connect and len(xs) > 1:
        pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in zip(xs, ys))
        out.append(f'<polyline points="{pts}" fill="none" stroke="#999" stroke-width="1"/>')
    for label, x, y in zip(report.labels, xs, ys):
        out.append(f'<circle cx="{_f(x)}" cy="{_f(y)}" r="3" fill="none" stroke="#1f4e9a"/>')
        out.append(f'<text x="{_f(x + 5)}" y="{_f(y - 5)}" font-size="10">{escape(label)}</text>')
    return out


def _trace(report, x0, y0):
    values = report.trace.values
    if len(values) == 0:
        raise TraceError("empty stress trace, nothing to plot")
    out = _frame(x0, y0, "Stress / initial stress (dB)")
    db = report.trace.db
    if db is None:
        db = np.zeros(len(values))
    db = np.where(np.isfinite(db), db, np.nan)
    finite = db[np.isfinite(db)]
    low = float(finite.min()) if finite.size else 0.0
    low = min(low, -1.0)
    pad = 20.0
    n = len(db)
    xs = x0 + pad + (PANEL_W - 2 * pad) * (np.arange(n) / max(n - 1, 1))
    ys = y0 + pad + (PANEL_H - 2 * pad) * (np.nan_to_num(db, nan=low) / low)
    pts = " ".join(f"{_f(x)},{_f(y)}" for x, y in zip(xs, ys))
    out.append(f'<polyline points="{pts}" fill="none" stroke="#b22" stroke-width="1.5"/>')
    out.append(f'<text x="{_f(x0 + 4)}" y="{_f(y0 + 14)}" font-size="10">0 dB</text>')
    out.append(
        f'<text x="{_f(x0 + 4)}" y="{_f(y0 + PANEL_H - 6)}" font-size="10">{low:.1f} dB, '
        f"{n - 1} iterations</text>"
    )
    return out


def _heatmap(values, top, x0, y0, title):
    out = _frame(x0, y0, title)
    n = values.shape[0]
    cell = min(PANEL_W, PANEL_H) / n
    left = x0 + 0.5 * (PANEL_W - cell * n)
    top_y = y0 + 0.5 * (PANEL_H - cell * n)
    norm = values / top if top > 0 else np.zeros_like(values)
    for i in range(n):
        for j in range(n):
            level = int(round(255 * (1.0 - min(max(norm[i, j], 0.0), 1.0))))
            out.append(
                f'<rect x="{_f(left + j * cell)}" y="{_f(top_y + i * cell)}" '
                f'width="{_f(cell)}" height="{_f(cell)}" fill="rgb({level},{level},{level})"/>'
            )
    return out


def render_svg(report):
    """SVG document (a string) for a :class:`~manifold_mds.report.RunReport`."""
    top = float(max(report.D_in.values.max(), np.max(report.D_out)))
    width = 2 * PANEL_W + GAP + 2 * MARGIN
    height = 2 * PANEL_H + GAP + 2 * MARGIN
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(width)}" height="{_f(height)}" '
        f'viewBox="0 0 {_f(width)} {_f(height)}" font-family="sans-serif">',
        f'<rect width="{_f(width)}" height="{_f(height)}" fill="white"/>',
    ]
    parts += _scatter(report, *_panel_origin(0, 0))
    parts += _trace(report, *_panel_origin(0, 1))
    parts += _heatmap(report.D_in.values, top, *_panel_origin(1, 0), "Input distances")
    parts += _heatmap(np.asarray(report.D_out), top, *_panel_origin(1, 1), "Embedded distances")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_svg(report, path):
    text = render_svg(report)
    with open(path, "w", newline="\n") as fh:
        fh.write(text)
    return path
