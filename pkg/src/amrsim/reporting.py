"""Result emission: CSV tables with fixed schemas and dependency-free SVG charts."""

from __future__ import annotations

import csv
import io

from .simulator import MetricsReport, SweepRow

RESULTS_HEADER = [
    "axis_value",
    "pdr_mean",
    "pdr_stddev",
    "energy_rate_mean",
    "hello",
    "reply_hello",
    "rreq",
    "rrep",
    "seed",
]

COMPARE_HEADER = [
    "repetition",
    "seed",
    "pdr_multipath",
    "pdr_single",
    "energy_rate_multipath",
    "energy_rate_single",
]


def _fmt(value: float | int | None) -> str:
    """Numeric cell formatting: 6 significant digits, empty for absent."""
    if value is None:
        return ""
    return format(value, ".6g")


def results_csv(rows: list[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    for row in rows:
        writer.writerow(
            [
                _fmt(row.value),
                _fmt(row.pdr_mean),
                _fmt(row.pdr_std),
                _fmt(row.energy_rate_mean),
                _fmt(row.control_means["hello"]),
                _fmt(row.control_means["reply_hello"]),
                _fmt(row.control_means["rreq"]),
                _fmt(row.control_means["rrep"]),
                row.seed,
            ]
        )
    return buf.getvalue()


def run_csv(report: MetricsReport) -> str:
    """Single-run table in the shared results schema (one degenerate row)."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(RESULTS_HEADER)
    writer.writerow(
        [
            _fmt(report.node_count),
            _fmt(report.pdr),
            _fmt(0.0),
            _fmt(report.avg_energy_consumption_rate),
            _fmt(report.control_messages["hello"]),
            _fmt(report.control_messages["reply_hello"]),
            _fmt(report.control_messages["rreq"]),
            _fmt(report.control_messages["rrep"]),
            report.seed,
        ]
    )
    return buf.getvalue()


def compare_csv(rows: list[dict]) -> str:
    """Side-by-side multipath vs single-path table, one row per repetition
    plus a trailing mean row."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(COMPARE_HEADER)
    for row in rows:
        writer.writerow(
            [
                row["repetition"],
                row["seed"],
                _fmt(row["pdr_multipath"]),
                _fmt(row["pdr_single"]),
                _fmt(row["energy_rate_multipath"]),
                _fmt(row["energy_rate_single"]),
            ]
        )
    return buf.getvalue()


def run_summary(report: MetricsReport) -> str:
    """Human-readable single-run digest."""
    lines = [
        f"nodes: {report.node_count}   seed: {report.seed}",
        f"packets: sent {report.packets_sent}, delivered {report.packets_delivered}, "
        f"lost {report.packets_lost}",
        f"pdr: {_fmt(report.pdr) if report.pdr is not None else 'n/a'}",
        f"avg energy consumption rate: {_fmt(report.avg_energy_consumption_rate)}%",
        f"paths discovered: {report.paths_discovered}   route failures: {report.route_failures}",
        "control messages: "
        + ", ".join(f"{k} {v}" for k, v in report.control_messages.items()),
    ]
    for flow in report.flows:
        status = "route-failed" if flow["route_failed"] else f"{flow['delivered']}/{flow['offered']}"
        via = "; ".join(
            "->".join(p["nodes"]) + f" ({p['delivered']}/{p['assigned']})" for p in flow["paths"]
        )
        lines.append(
            f"flow {flow['source']}->{flow['destination']}: {status}" + (f" via {via}" if via else "")
        )
    return "\n".join(lines) + "\n"


# --- SVG chart -------------------------------------------------------------

_PANEL_W = 640
_PANEL_H = 300
_MARGIN = 60


def _panel(
    rows: list[SweepRow],
    metric: str,
    label: str,
    y_offset: int,
    axis_label: str,
) -> list[str]:
    xs = [row.value for row in rows]
    if metric == "pdr":
        means = [row.pdr_mean for row in rows]
        stds = [row.pdr_std for row in rows]
    else:
        means = [row.energy_rate_mean for row in rows]
        stds = [row.energy_rate_std for row in rows]
    x_lo, x_hi = min(xs), max(xs)
    if x_hi == x_lo:
        x_lo, x_hi = x_lo - 1.0, x_hi + 1.0
    y_lo = min(m - s for m, s in zip(means, stds))
    y_hi = max(m + s for m, s in zip(means, stds))
    if y_hi == y_lo:
        y_lo, y_hi = y_lo - 1.0, y_hi + 1.0
    pad = 0.05 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    def sx(x: float) -> float:
        return _MARGIN + (x - x_lo) / (x_hi - x_lo) * (_PANEL_W - 2 * _MARGIN)

    def sy(y: float) -> float:
        return y_offset + _PANEL_H - _MARGIN + (y - y_lo) / (y_lo - y_hi) * (_PANEL_H - 2 * _MARGIN)

    parts = [
        f'<rect x="{_MARGIN}" y="{y_offset + _MARGIN}" width="{_PANEL_W - 2 * _MARGIN}" '
        f'height="{_PANEL_H - 2 * _MARGIN}" fill="none" stroke="#888"/>',
        f'<text x="{_PANEL_W / 2:.1f}" y="{y_offset + 24}" text-anchor="middle" '
        f'font-size="14">{label}</text>',
        f'<text x="{_PANEL_W / 2:.1f}" y="{y_offset + _PANEL_H - 12}" text-anchor="middle" '
        f'font-size="12">{axis_label}</text>',
    ]
    for x in xs:
        parts.append(
            f'<text x="{sx(x):.1f}" y="{y_offset + _PANEL_H - _MARGIN + 16:.1f}" '
            f'text-anchor="middle" font-size="10">{format(x, ".6g")}</text>'
        )
    for y in (y_lo + pad, y_hi - pad):
        parts.append(
            f'<text x="{_MARGIN - 6}" y="{sy(y):.1f}" text-anchor="end" '
            f'font-size="10">{format(y, ".4g")}</text>'
        )
    points = " ".join(f"{sx(x):.2f},{sy(m):.2f}" for x, m in zip(xs, means))
    parts.append(f'<polyline points="{points}" fill="none" stroke="#1f77b4" stroke-width="2"/>')
    for x, m, s in zip(xs, means, stds):
        cx, cy = sx(x), sy(m)
        parts.append(f'<circle cx="{cx:.2f}" cy="{cy:.2f}" r="3" fill="#1f77b4"/>')
        if s > 0:
            top, bot = sy(m + s), sy(m - s)
            parts.append(
                f'<line x1="{cx:.2f}" y1="{top:.2f}" x2="{cx:.2f}" y2="{bot:.2f}" '
                f'stroke="#1f77b4" stroke-width="1"/>'
            )
            for yy in (top, bot):
                parts.append(
                    f'<line x1="{cx - 4:.2f}" y1="{yy:.2f}" x2="{cx + 4:.2f}" y2="{yy:.2f}" '
                    f'stroke="#1f77b4" stroke-width="1"/>'
                )
    return parts


def sweep_svg(rows: list[SweepRow]) -> str:
    """Two stacked line panels (PDR and energy-consumption rate vs the swept
    axis) with one-standard-deviation whiskers."""
    if not rows:
        raise ValueError("no sweep rows to plot")
    axis = rows[0].axis
    axis_label = {"node_count": "node count", "speed": "speed (m/s)"}.get(axis, axis)
    height = 2 * _PANEL_H
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_PANEL_W}" height="{height}" '
        f'viewBox="0 0 {_PANEL_W} {height}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]
    parts += _panel(rows, "pdr", "Packet delivery ratio", 0, axis_label)
    parts += _panel(rows, "energy", "Avg energy consumption rate (%)", _PANEL_H, axis_label)
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
