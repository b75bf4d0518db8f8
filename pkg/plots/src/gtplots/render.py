"""Render sweep and landscape CSVs into the four figure layouts.

The renderer never recomputes statistics: it draws exactly the columns the
producing toolkit wrote.  Output is a PNG with fixed metadata so re-running
a render overwrites the file byte-identically.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

KINDS = ("ftilde", "optimization", "comparison", "scaling")

_SWEEP_COLUMNS = ("decoder", "p", "rate", "trials", "satisfying", "exact", "approx")
_REQUIRED = {
    "ftilde": ("lambda", "F_tilde", "R"),
    "optimization": _SWEEP_COLUMNS,
    "comparison": _SWEEP_COLUMNS,
    "scaling": _SWEEP_COLUMNS,
}

_PNG_METADATA = {"Software": "gtplots"}
_DPI = 120


@dataclass(frozen=True)
class PlotSpec:
    """One render job: which CSV, which figure layout, where to write."""

    csv_path: str
    kind: str
    out_path: str

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {KINDS}")


class SchemaError(ValueError):
    """The CSV header lacks a column the chosen figure kind needs."""


def _read_rows(spec: PlotSpec) -> list[dict]:
    with open(spec.csv_path, "r", encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [col for col in _REQUIRED[spec.kind] if col not in header]
        if missing:
            raise SchemaError(
                f"{spec.csv_path} is missing column(s) {missing} required by "
                f"figure kind {spec.kind!r}"
            )
        return list(reader)


def _save(fig, spec: PlotSpec) -> None:
    fig.savefig(spec.out_path, dpi=_DPI, metadata=_PNG_METADATA)
    plt.close(fig)


def _render_ftilde(rows, spec):
    panels: dict[str, list[tuple[float, float]]] = {}
    for row in rows:
        panels.setdefault(row["R"], []).append((float(row["lambda"]), float(row["F_tilde"])))
    count = max(len(panels), 1)
    cols = 2 if count > 1 else 1
    grid_rows = (count + cols - 1) // cols
    fig, axes = plt.subplots(grid_rows, cols, figsize=(4.0 * cols, 3.0 * grid_rows), squeeze=False)
    flat = [ax for row_of_axes in axes for ax in row_of_axes]
    for ax, (rate, points) in zip(flat, sorted(panels.items(), key=lambda kv: float(kv[0]))):
        points.sort()
        ax.plot([x for x, _ in points], [y for _, y in points], color="tab:blue")
        ax.set_title(f"R = {rate}")
        ax.set_xlabel("overlap fraction")
        ax.set_ylabel("predicted unexplained fraction")
    for ax in flat[max(len(panels), 1):]:
        ax.set_axis_off()
    fig.tight_layout()
    _save(fig, spec)


def _fractions(row):
    trials = float(row["trials"])
    return (
        float(row["satisfying"]) / trials,
        float(row["exact"]) / trials,
        float(row["approx"]) / trials,
    )


def _render_optimization(rows, spec):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    by_decoder: dict[str, list] = {}
    for row in rows:
        by_decoder.setdefault(row["decoder"], []).append(row)
    for decoder, group in sorted(by_decoder.items()):
        group.sort(key=lambda r: 1.0 / float(r["rate"]))
        xs = [1.0 / float(r["rate"]) for r in group]
        fractions = [_fractions(r) for r in group]
        suffix = f" ({decoder})" if len(by_decoder) > 1 else ""
        ax.plot(xs, [f[0] for f in fractions], color="gray", marker="o",
                label="satisfying set found" + suffix)
        ax.plot(xs, [f[1] for f in fractions], color="tab:orange", marker="o",
                label="exact recovery" + suffix)
        ax.plot(xs, [f[2] for f in fractions], color="tab:blue", marker="o",
                label="90%-approximate recovery" + suffix)
    ax.set_xlabel("inverse rate")
    ax.set_ylabel("success fraction")
    ax.set_ylim(-0.05, 1.05)
    if rows:
        ax.legend()
    fig.tight_layout()
    _save(fig, spec)


def _render_comparison(rows, spec):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    by_decoder: dict[str, list] = {}
    for row in rows:
        by_decoder.setdefault(row["decoder"], []).append(row)
    for decoder, group in sorted(by_decoder.items()):
        group.sort(key=lambda r: 1.0 / float(r["rate"]))
        xs = [1.0 / float(r["rate"]) for r in group]
        ys = [float(r["approx"]) / float(r["trials"]) for r in group]
        ax.plot(xs, ys, marker="o", label=decoder)
    ax.set_xlabel("inverse rate")
    ax.set_ylabel("90%-approximate recovery fraction")
    ax.set_ylim(-0.05, 1.05)
    if rows:
        ax.legend()
    fig.tight_layout()
    _save(fig, spec)


def _render_scaling(rows, spec):
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    by_decoder: dict[str, list] = {}
    for row in rows:
        by_decoder.setdefault(row["decoder"], []).append(row)
    for decoder, group in sorted(by_decoder.items()):
        group.sort(key=lambda r: int(r["p"]))
        xs = [int(r["p"]) for r in group]
        ys = [float(r["approx"]) / float(r["trials"]) for r in group]
        ax.plot(xs, ys, marker="o", label=decoder)
    ax.set_xscale("log")
    ax.set_xlabel("population size")
    ax.set_ylabel("90%-approximate recovery fraction")
    ax.set_ylim(-0.05, 1.05)
    if rows:
        ax.legend()
    fig.tight_layout()
    _save(fig, spec)


_RENDERERS = {
    "ftilde": _render_ftilde,
    "optimization": _render_optimization,
    "comparison": _render_comparison,
    "scaling": _render_scaling,
}


def render(spec: PlotSpec) -> str:
    """Read the CSV, draw the figure, write the PNG; returns the output path.

    A header-only CSV yields an empty-axes image rather than an error.
    """
    rows = _read_rows(spec)
    _RENDERERS[spec.kind](rows, spec)
    return spec.out_path
