"""Deterministic figure rendering from simulation CSV/JSON datasets.

Pure presentation: every figure is a function of the input files alone.
Complex fields are drawn with a cyclic hue for the local phase
(arg psi in (-pi, pi] mapped onto the hsv wheel) and brightness or
opacity for the density, with a phase wheel legend.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.collections import LineCollection
from matplotlib.colors import hsv_to_rgb

EXPECTED_SCHEMA = 1
DPI = 150


class RenderError(Exception):
    pass


@dataclass(frozen=True)
class FigureSpec:
    """One renderable figure: its id, the input directory, the output path."""

    figure: str
    indir: Path
    outpath: Path


def _read_csv(path: Path, columns: list[str]) -> dict[str, np.ndarray]:
    if not path.exists():
        raise RenderError(f"missing input file {path}")
    lines = path.read_text(encoding="utf-8").splitlines()
    if not lines:
        raise RenderError(f"{path} is empty")
    header = lines[0].split(",")
    missing = [c for c in columns if c not in header]
    if missing:
        raise RenderError(f"{path} lacks expected columns {missing}")
    if len(lines) < 2:
        raise RenderError(f"{path} has a header but no data rows")
    str_cols = {c for c in columns if c in ("shunt", "target")}
    raw = [line.split(",") for line in lines[1:]]
    out = {}
    for name in columns:
        i = header.index(name)
        if name in str_cols:
            out[name] = np.array([r[i] for r in raw])
        else:
            out[name] = np.array([float(r[i]) for r in raw])
    return out


def _check_schema(indir: Path, meta_name: str) -> dict:
    path = indir / meta_name
    if not path.exists():
        raise RenderError(f"missing metadata file {path}")
    meta = json.loads(path.read_text(encoding="utf-8"))
    version = meta.get("schema_version")
    if version != EXPECTED_SCHEMA:
        raise RenderError(
            f"{path}: schema version {version!r} does not match expected "
            f"{EXPECTED_SCHEMA}"
        )
    return meta


def _phase_hue(values: np.ndarray) -> np.ndarray:
    return (np.angle(values) + np.pi) / (2.0 * np.pi)


def _phase_image(ax, k, phi, values, density):
    """Hue-coded phase under density contours on the (k, phi) plane."""
    hue = _phase_hue(values)
    sat = np.ones_like(hue)
    val = density / density.max() if density.max() > 0 else density
    rgb = hsv_to_rgb(np.dstack([hue, sat, np.sqrt(val)]))
    ax.imshow(
        np.swapaxes(rgb, 0, 1),
        origin="lower",
        extent=(k.min(), k.max(), phi.min(), phi.max()),
        aspect="auto",
        interpolation="nearest",
    )
    levels = np.linspace(0.1, 0.9, 4) * density.max()
    if density.max() > 0:
        ax.contour(
            k, phi, density.T, levels=levels, colors="white", linewidths=0.4
        )
    ax.set_xlabel("k")
    ax.set_ylabel(r"$\varphi$")


def _phase_wheel(fig):
    """Cyclic legend for arg(psi) in (-pi, pi]."""
    ax = fig.add_axes([0.92, 0.35, 0.015, 0.3])
    grad = np.linspace(0.0, 1.0, 256).reshape(-1, 1)
    ax.imshow(
        hsv_to_rgb(np.dstack([grad, np.ones_like(grad), np.ones_like(grad)])),
        origin="lower",
        extent=(0, 1, -np.pi, np.pi),
        aspect="auto",
    )
    ax.set_xticks([])
    ax.set_yticks([-np.pi, 0, np.pi])
    ax.set_yticklabels([r"$-\pi$", "0", r"$\pi$"])
    ax.yaxis.tick_right()
    ax.set_title(r"$\arg\psi$", fontsize=8)


def _phase_colored_line(ax, x, values, offset=0.0, scale=1.0, lw=1.6):
    """Polyline of |values| (signed by real part) with hue-coded phase."""
    y = offset + scale * values.real
    pts = np.array([x, y]).T.reshape(-1, 1, 2)
    segs = np.concatenate([pts[:-1], pts[1:]], axis=1)
    hue = _phase_hue(0.5 * (values[:-1] + values[1:]))
    colors = hsv_to_rgb(
        np.stack([hue, np.ones_like(hue), 0.85 * np.ones_like(hue)], axis=1)
    )
    ax.add_collection(LineCollection(segs, colors=colors, linewidths=lw))


def _trace_axes(ax, data):
    ax.plot(data["t"], data["p_center"], color="crimson", label="zone centre")
    ax.plot(
        data["t"], data["p_edge"], color="royalblue", ls="--", label="zone edge"
    )
    ax.fill_between(
        data["t"], 0.0, np.maximum(data["residual"], 0.0),
        color="0.6", alpha=0.5, label="residual",
    )
    ax.set_xlim(data["t"].min(), data["t"].max())
    ax.set_ylim(0, 1.02)
    ax.set_xlabel(r"$t\,E_J$")
    ax.set_ylabel("probability")
    ax.legend(loc="center right", fontsize=8)


def fig2(indir: Path, outpath: Path) -> None:
    _check_schema(indir, "bands_meta.json")
    bands = _read_csv(indir / "bands.csv", ["kappa", "band", "energy"])
    fig = plt.figure(figsize=(6.4, 4.8))
    ax = fig.add_axes([0.1, 0.1, 0.62, 0.85])
    for b in sorted(set(bands["band"].astype(int))):
        sel = bands["band"].astype(int) == b
        order = np.argsort(bands["kappa"][sel])
        ax.plot(
            bands["kappa"][sel][order], bands["energy"][sel][order],
            color=f"C{b % 10}", lw=1.4,
        )
        if b > 5:
            break
    ax.set_xlabel(r"$\kappa$")
    ax.set_ylabel(r"$E/E_J$")
    insets = [
        ("bloch_kappa0_b0.csv", [0.76, 0.10, 0.2, 0.17], r"$\kappa=0,\,b=0$"),
        ("bloch_kappahalf_b0.csv", [0.76, 0.32, 0.2, 0.17], r"$\kappa=1/2,\,b=0$"),
        ("bloch_kappa0_b1.csv", [0.76, 0.54, 0.2, 0.17], r"$\kappa=0,\,b=1$"),
        ("bloch_kappahalf_b1.csv", [0.76, 0.76, 0.2, 0.17], r"$\kappa=1/2,\,b=1$"),
    ]
    for name, rect, label in insets:
        data = _read_csv(indir / name, ["phi", "re", "im"])
        sub = fig.add_axes(rect)
        values = data["re"] + 1j * data["im"]
        _phase_colored_line(sub, data["phi"], values, lw=1.0)
        sub.set_xlim(data["phi"].min(), data["phi"].max())
        lim = np.abs(values).max() * 1.1
        sub.set_ylim(-lim, lim)
        sub.set_xticks([])
        sub.set_yticks([])
        sub.set_title(label, fontsize=6)
    fig.savefig(outpath, dpi=DPI)
    plt.close(fig)


def _snapshot_panels(indir: Path, outpath: Path, n_panels: int = 5) -> None:
    fig, axes = plt.subplots(1, n_panels, figsize=(3.0 * n_panels, 3.2))
    for i, ax in enumerate(np.atleast_1d(axes)):
        data = _read_csv(
            indir / f"snapshot_{i:02d}.csv", ["k", "phi", "re", "im", "density"]
        )
        k = np.unique(data["k"])
        phi = np.unique(data["phi"])
        shape = (k.size, phi.size)
        values = (data["re"] + 1j * data["im"]).reshape(shape)
        density = data["density"].reshape(shape)
        _phase_image(ax, k, phi, values, density)
        ax.set_title(f"snapshot {i}", fontsize=9)
    fig.subplots_adjust(left=0.05, right=0.9, wspace=0.3)
    _phase_wheel(fig)
    fig.savefig(outpath, dpi=DPI)
    plt.close(fig)


def fig3(indir: Path, outpath: Path) -> None:
    _check_schema(indir, "evolve_meta.json")
    _snapshot_panels(indir, outpath)


def fig4(indir: Path, outpath: Path) -> None:
    _check_schema(indir, "evolve_meta.json")
    data = _read_csv(indir / "trace.csv", ["t", "p_center", "p_edge", "residual"])
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    _trace_axes(ax, data)
    fig.tight_layout()
    fig.savefig(outpath, dpi=DPI)
    plt.close(fig)


def fig5(indir: Path, outpath: Path) -> None:
    _check_schema(indir, "evolve_meta.json")
    targets = _read_csv(indir / "fourpi_targets.csv", ["phi_tilde", "target", "re", "im"])
    potential = _read_csv(indir / "fourpi_potential.csv", ["phi_tilde", "v"])
    modes = _read_csv(indir / "fourpi_modes.csv", ["phi_tilde", "band", "re", "im"])
    fig, axes = plt.subplots(3, 1, figsize=(6.0, 7.5), sharex=True)

    ax = axes[0]
    ax.plot(potential["phi_tilde"], potential["v"], color="0.4", lw=1.0)
    for tag, color, ls in (("center", "crimson", "-"), ("edge", "royalblue", "--")):
        sel = targets["target"] == tag
        ax.plot(
            targets["phi_tilde"][sel], targets["re"][sel],
            color=color, ls=ls, label=f"zone {tag}",
        )
    ax.legend(fontsize=8)
    ax.set_ylabel("bare band states")

    ax = axes[1]
    bands = modes["band"].astype(int)
    for b in sorted(set(bands)):
        sel = bands == b
        values = modes["re"][sel] + 1j * modes["im"][sel]
        _phase_colored_line(ax, modes["phi_tilde"][sel], values, offset=0.6 * b)
    ax.set_xlim(modes["phi_tilde"].min(), modes["phi_tilde"].max())
    ax.set_ylim(-0.7, 0.6 * 2 + 0.7)
    ax.set_ylabel("shunted modes (stacked)")

    ax = axes[2]
    i = 0
    while (indir / f"snapshot_{i:02d}.csv").exists():
        data = _read_csv(indir / f"snapshot_{i:02d}.csv", ["phi_tilde", "re", "im"])
        values = data["re"] + 1j * data["im"]
        _phase_colored_line(ax, data["phi_tilde"], values, offset=0.8 * i, lw=1.2)
        i += 1
    if i == 0:
        raise RenderError(f"no snapshot files found in {indir}")
    ax.set_xlim(data["phi_tilde"].min(), data["phi_tilde"].max())
    ax.set_ylim(-1.0, 0.8 * i + 0.4)
    ax.set_ylabel("evolution (stacked)")
    ax.set_xlabel(r"$\tilde\varphi$")
    fig.subplots_adjust(left=0.12, right=0.9, hspace=0.12)
    _phase_wheel(fig)
    fig.savefig(outpath, dpi=DPI)
    plt.close(fig)


def fig6(indir: Path, outpath: Path) -> None:
    fig4(indir, outpath)


def fig8(indir: Path, outpath: Path) -> None:
    _check_schema(indir, "fluxonium_meta.json")
    energies = _read_csv(indir / "fluxonium_energies.csv", ["j", "energy"])
    fig, axes = plt.subplots(2, 4, figsize=(12.8, 6.4))
    flat = axes.ravel()
    for j in range(7):
        data = _read_csv(
            indir / f"fluxonium_mode_{j:02d}.csv", ["k", "phi", "re", "im", "density"]
        )
        k = np.unique(data["k"])
        phi = np.unique(data["phi"])
        shape = (k.size, phi.size)
        values = (data["re"] + 1j * data["im"]).reshape(shape)
        density = data["density"].reshape(shape)
        _phase_image(flat[j], k, phi, values, density)
        flat[j].set_title(f"$E_{{{j}}} = {energies['energy'][j]:.4f}$", fontsize=9)
    flat[7].axis("off")
    fig.subplots_adjust(left=0.05, right=0.9, hspace=0.35, wspace=0.3)
    _phase_wheel(fig)
    fig.savefig(outpath, dpi=DPI)
    plt.close(fig)


def fig9(indir: Path, outpath: Path) -> None:
    _check_schema(indir, "fluxonium_meta.json")
    data = _read_csv(indir / "mode_weights.csv", ["j", "weight"])
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    n = min(40, data["j"].size)
    markers, stems, _ = ax.stem(data["j"][:n], data["weight"][:n])
    plt.setp(markers, markersize=4, color="crimson")
    plt.setp(stems, color="0.6", linewidth=1.0)
    ax.set_xlabel("mode index")
    ax.set_ylabel("population")
    ax.set_ylim(bottom=0)
    fig.tight_layout()
    fig.savefig(outpath, dpi=DPI)
    plt.close(fig)


FIGURES = {
    "fig2": fig2,
    "fig3": fig3,
    "fig4": fig4,
    "fig5": fig5,
    "fig6": fig6,
    "fig8": fig8,
    "fig9": fig9,
}


def render(spec: FigureSpec) -> Path:
    """Render one figure; raises RenderError without leaving partial output."""
    if spec.figure not in FIGURES:
        raise RenderError(
            f"unknown figure {spec.figure!r}; choose from {sorted(FIGURES)}"
        )
    spec.outpath.parent.mkdir(parents=True, exist_ok=True)
    FIGURES[spec.figure](spec.indir, spec.outpath)
    return spec.outpath


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="qcs-render", description="Render figures from simulation output"
    )
    parser.add_argument("--figure", required=True, choices=sorted(FIGURES))
    parser.add_argument("--in", dest="indir", type=Path, required=True)
    parser.add_argument("--out", dest="outpath", type=Path, required=True)
    args = parser.parse_args(argv)
    try:
        render(FigureSpec(args.figure, args.indir, args.outpath))
    except RenderError as exc:
        print(f"render error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
