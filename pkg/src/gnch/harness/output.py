"""CSV, JSON-lines, schema and SVG emission."""
import csv
import dataclasses
import json
import math
import os


def _cell(v):
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return f"{v:.17g}"
    return str(v)


def _as_row(rec):
    if dataclasses.is_dataclass(rec):
        return dataclasses.asdict(rec)
    return dict(rec)


def write_csv(path, rows, columns=None):
    rows = [_as_row(r) for r in rows]
    if columns is None:
        columns = list(rows[0]) if rows else []
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(columns)
        for r in rows:
            w.writerow([_cell(r[c]) for c in columns])
    return columns


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    if isinstance(v, dict):
        return {k: _jsonable(x) for k, x in v.items()}
    if hasattr(v, "item"):
        return v.item()
    return v


def append_jsonl(path, obj):
    with open(path, "a") as fh:
        fh.write(json.dumps(_jsonable(obj), sort_keys=True) + "\n")


COLUMN_DOCS = {
    "t": "time (nondimensional)",
    "E_s": "energy E^s(U) with the current state as reference",
    "X_s": "X^s norm |U|_{X^s}",
    "mass": "mean of zeta over the period",
    "h1_min": "min of 1 - eps*zeta",
    "h2_min": "min of 1/delta + eps*zeta",
    "q1_min": "min of 1 + eps*kappa1*zeta",
    "q2_min": "min of 1 + eps*kappa2*zeta",
    "solver_iters": "PCG iterations since the previous sample",
    "mass_plus": "mean of v+^lambda",
    "mass_minus": "mean of v-^lambda",
    "max_abs": "max |v+-^lambda|",
    "x": "grid node",
    "value": "nodal value",
}


def write_schema(path, tables):
    """``tables`` maps csv file name to its column list."""
    out = ["# CSV schema\n\n",
           "All files have a header row; floats are written with 17 significant digits.\n"]
    for name in sorted(tables):
        out.append(f"\n## {name}\n\n| column | meaning |\n|---|---|\n")
        for col in tables[name]:
            out.append(f"| {col} | {COLUMN_DOCS.get(col, '')} |\n")
    with open(path, "w") as fh:
        fh.write("".join(out))


def write_svg(path, series, title="", xlabel="", ylabel="", logx=False, logy=False,
              width=640, height=420):
    """Minimal line plot.  ``series`` is a list of ``(label, xs, ys)``."""
    pad_l, pad_r, pad_t, pad_b = 70, 20, 30, 50
    tx = (lambda v: math.log10(v)) if logx else float
    ty = (lambda v: math.log10(v)) if logy else float
    pts = []
    for label, xs, ys in series:
        pts.append((label, [(tx(a), ty(b)) for a, b in zip(xs, ys)
                            if (not logx or a > 0) and (not logy or b > 0)]))
    allx = [p[0] for _, ps in pts for p in ps] or [0.0, 1.0]
    ally = [p[1] for _, ps in pts for p in ps] or [0.0, 1.0]
    x0, x1 = min(allx), max(allx)
    y0, y1 = min(ally), max(ally)
    if x1 == x0:
        x1 = x0 + 1
    if y1 == y0:
        y1 = y0 + 1
    pw, ph = width - pad_l - pad_r, height - pad_t - pad_b

    def sx(v):
        return pad_l + (v - x0) / (x1 - x0) * pw

    def sy(v):
        return pad_t + ph - (v - y0) / (y1 - y0) * ph

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]
    parts = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}">',
             f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
             f'<rect x="{pad_l}" y="{pad_t}" width="{pw}" height="{ph}" fill="none" stroke="black"/>',
             f'<text x="{width / 2}" y="18" text-anchor="middle" font-size="14">{title}</text>',
             f'<text x="{pad_l + pw / 2}" y="{height - 10}" text-anchor="middle" font-size="12">'
             f'{("log10 " if logx else "") + xlabel}</text>',
             f'<text x="14" y="{pad_t + ph / 2}" font-size="12" transform="rotate(-90 14 {pad_t + ph / 2})" '
             f'text-anchor="middle">{("log10 " if logy else "") + ylabel}</text>']
    for v, anchor in ((x0, "start"), (x1, "end")):
        parts.append(f'<text x="{sx(v)}" y="{pad_t + ph + 16}" text-anchor="{anchor}" font-size="10">{v:.3g}</text>')
    for v in (y0, y1):
        parts.append(f'<text x="{pad_l - 4}" y="{sy(v) + 4}" text-anchor="end" font-size="10">{v:.3g}</text>')
    for i, (label, ps) in enumerate(pts):
        col = colors[i % len(colors)]
        if ps:
            d = " ".join(f"{sx(a):.2f},{sy(b):.2f}" for a, b in ps)
            parts.append(f'<polyline fill="none" stroke="{col}" stroke-width="1.5" points="{d}"/>')
        parts.append(f'<text x="{pad_l + 8}" y="{pad_t + 16 + 14 * i}" font-size="11" fill="{col}">{label}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")


def ensure_dir(path):
    os.makedirs(path, exist_ok=True)
    return path
