"""Command-line harness: parse a config, run a solver, emit datasets.

Subcommands: bands | fluxonium-modes | evolve | protocol.  Each run
writes one observable family per CSV plus a JSON metadata file that
echoes the fully resolved configuration and a schema version.  All
energies are in units of E_J with hbar = 1; times in 1/E_J.  The
QCS_THREADS environment variable caps the numeric thread pools (applied
at package import, in quasicharge/__init__.py).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from . import fourpi as fourpi_mod
from .bands import bloch_wavefunction, solve_band_structure, z_splitting
from .evolution import initial_state, project, evolve, run_inductive
from .fluxonium import harmonic_spacing_profile, solve_modes
from .output import SCHEMA_VERSION, write_csv, write_json
from .params import CircuitParams
from .zak import ZakGrid, k_marginal

INDUCTIVE_DEFAULT_EL = 1.0 / (2.0 * np.pi) ** 2
FOURPI_DEFAULT_E4PI = 0.5


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class RunConfig:
    """Flat, fully validated run configuration.

    ``el`` and ``e4pi`` default to None, meaning "use the command's
    default shunt strength"; everything else carries its final value.
    """

    ec: float = 1.0
    ej: float = 1.0
    el: float | None = None
    e4pi: float | None = None
    nx: float = 0.0
    delta: float = 0.2
    n_k: int = 201
    n_phi: int = 257
    cutoff: int = 40
    fourpi_cutoff: int = 80
    n_bands: int = 8
    n_modes: int = 100
    n_gallery: int = 7
    phi_max_pi: int = 0  # 0 = choose from the mode count
    n_grid: int = 0  # 0 = choose from the window
    t_max: float = 0.0  # 0 = 1.1 * t_2pi
    n_times: int = 512
    shunt: str = "ind"

    def resolved(self, command: str) -> "RunConfig":
        el, e4pi = self.el, self.e4pi
        if command == "bands":
            el = 0.0 if el is None else el
            e4pi = 0.0 if e4pi is None else e4pi
        elif command == "fluxonium-modes":
            el = INDUCTIVE_DEFAULT_EL if el is None else el
            e4pi = 0.0 if e4pi is None else e4pi
        elif command == "evolve":
            if self.shunt == "ind":
                el = INDUCTIVE_DEFAULT_EL if el is None else el
                e4pi = 0.0 if e4pi is None else e4pi
            else:
                el = 0.0 if el is None else el
                e4pi = FOURPI_DEFAULT_E4PI if e4pi is None else e4pi
        # protocol runs both shunts and resolves them itself
        return replace(self, el=el, e4pi=e4pi)

    def shunt_params(self, shunt: str) -> CircuitParams:
        """Per-shunt parameters with the command defaults filled in."""
        if shunt == "ind":
            el = INDUCTIVE_DEFAULT_EL if self.el is None else self.el
            e4pi = 0.0
        else:
            el = 0.0
            e4pi = FOURPI_DEFAULT_E4PI if self.e4pi is None else self.e4pi
        return CircuitParams(
            e_c=self.ec, e_j=self.ej, e_l=el, e_4pi=e4pi,
            n_x=self.nx, delta=self.delta,
        )

    def params(self) -> CircuitParams:
        return CircuitParams(
            e_c=self.ec,
            e_j=self.ej,
            e_l=self.el if self.el is not None else 0.0,
            e_4pi=self.e4pi if self.e4pi is not None else 0.0,
            n_x=self.nx,
            delta=self.delta,
        )

    def echo(self, command: str) -> dict:
        body = {f.name: getattr(self, f.name) for f in fields(self)}
        return {
            "schema_version": SCHEMA_VERSION,
            "command": command,
            "units": "E_J = 1, hbar = 1",
            "config": body,
        }


_FIELD_TYPES = {f.name: f for f in fields(RunConfig)}


def _coerce(key: str, raw: str):
    if key not in _FIELD_TYPES:
        raise ConfigError(f"unknown config key {key!r}")
    if key == "shunt":
        if raw not in ("ind", "4pi"):
            raise ConfigError(f"shunt must be 'ind' or '4pi', got {raw!r}")
        return raw
    if key in ("n_k", "n_phi", "cutoff", "fourpi_cutoff", "n_bands", "n_modes",
               "n_gallery", "phi_max_pi", "n_grid", "n_times"):
        try:
            return int(raw)
        except ValueError as exc:
            raise ConfigError(f"config key {key!r} needs an integer, got {raw!r}") from exc
    try:
        return float(raw)
    except ValueError as exc:
        raise ConfigError(f"config key {key!r} needs a number, got {raw!r}") from exc


def load_config(path: Path | None, overrides: dict) -> RunConfig:
    """Flat key = value text, '#' comments; CLI overrides win."""
    values: dict = {}
    if path is not None:
        for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
            stripped = line.split("#", 1)[0].strip()
            if not stripped:
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, raw = (part.strip() for part in stripped.split("=", 1))
            values[key] = _coerce(key, raw)
    for key, value in overrides.items():
        if value is not None:
            values[key] = value
    unknown = set(values) - set(_FIELD_TYPES)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    return RunConfig(**values)


def _canonical_times(t_2pi: float) -> list[float]:
    return [0.0, t_2pi / 4, t_2pi / 2, 3 * t_2pi / 4, t_2pi]


def cmd_bands(cfg: RunConfig, outdir: Path) -> int:
    params = cfg.params()
    grid = ZakGrid(cfg.n_k, cfg.n_phi)
    bs = solve_band_structure(params, grid.k_values, cfg.n_bands, cfg.cutoff)
    rows = [
        (k, b, bs.energies[i, b])
        for b in range(cfg.n_bands)
        for i, k in enumerate(bs.kappa_values)
    ]
    write_csv(outdir / "bands.csv", ["kappa", "band", "energy"], rows)

    for kappa, tag in ((0.0, "kappa0"), (0.5, "kappahalf")):
        for band in (0, 1):
            wf = bloch_wavefunction(params, kappa, band, grid.phi_values, cfg.cutoff)
            write_csv(
                outdir / f"bloch_{tag}_b{band}.csv",
                ["phi", "re", "im", "abs2"],
                zip(
                    wf.phi_values,
                    wf.values.real,
                    wf.values.imag,
                    np.abs(wf.values) ** 2,
                ),
            )

    centre = solve_band_structure(params, [0.0], 2, cfg.cutoff).energies[0]
    ratio = (
        (centre[1] - centre[0]) / np.sqrt(2.0 * params.e_c * params.e_j)
        if params.e_j > 0
        else None
    )
    meta = cfg.echo("bands")
    meta["transition_ratio"] = ratio
    meta["z_splitting"] = z_splitting(params, cfg.cutoff)
    write_json(outdir / "bands_meta.json", meta)
    return 0


def cmd_fluxonium_modes(cfg: RunConfig, outdir: Path) -> int:
    params = cfg.params()
    grid = ZakGrid(cfg.n_k, cfg.n_phi)
    modes = solve_modes(
        params,
        cfg.n_modes,
        phi_max=cfg.phi_max_pi * np.pi if cfg.phi_max_pi else None,
        n=cfg.n_grid or None,
    )
    write_csv(
        outdir / "fluxonium_energies.csv",
        ["j", "energy"],
        enumerate(modes.energies),
    )
    spacings = harmonic_spacing_profile(modes) if len(modes) >= 40 else np.diff(
        modes.energies
    )
    write_csv(outdir / "fluxonium_spacings.csv", ["j", "spacing"], enumerate(spacings))

    gallery = modes.with_zak(grid)
    for j in range(min(cfg.n_gallery, len(modes))):
        zak = gallery.modes_zak[j]
        kcol = np.repeat(grid.k_values, grid.n_phi)
        pcol = np.tile(grid.phi_values, grid.n_k)
        flat = zak.values.ravel()
        write_csv(
            outdir / f"fluxonium_mode_{j:02d}.csv",
            ["k", "phi", "re", "im", "density"],
            zip(kcol, pcol, flat.real, flat.imag, np.abs(flat) ** 2),
        )

    psi0 = initial_state(params, grid, 0.0, cfg.cutoff)
    proj = project(psi0, gallery)
    write_csv(
        outdir / "mode_weights.csv",
        ["j", "weight"],
        enumerate(np.abs(proj.amplitudes) ** 2),
    )

    meta = cfg.echo("fluxonium-modes")
    meta["capture"] = proj.capture
    meta["harmonic_spacing"] = 2.0 * np.sqrt(params.e_c * params.e_l)
    meta["window_half_width"] = modes.phi_max
    meta["grid_points"] = modes.n
    meta["max_edge_ratio"] = float(modes.edge_ratios.max())
    write_json(outdir / "fluxonium_meta.json", meta)
    if modes.edge_ratios.max() > 1e-6:
        print("warning: some retained modes touch the window edge", file=sys.stderr)
        return 1
    return 0


def _write_trace(outdir: Path, result) -> None:
    write_csv(
        outdir / "trace.csv",
        ["t", "p_center", "p_edge", "residual", "theta"],
        zip(
            result.times,
            result.p_center,
            result.p_edge,
            result.residual,
            result.relative_phase,
        ),
    )


def cmd_evolve(cfg: RunConfig, outdir: Path) -> int:
    params = cfg.params()
    meta = cfg.echo("evolve")
    if cfg.shunt == "ind":
        grid = ZakGrid(cfg.n_k, cfg.n_phi)
        modes = solve_modes(
            params,
            cfg.n_modes,
            phi_max=cfg.phi_max_pi * np.pi if cfg.phi_max_pi else None,
            n=cfg.n_grid or None,
        ).with_zak(grid)
        psi0 = initial_state(params, grid, 0.0, cfg.cutoff)
        proj = project(psi0, modes)
        first = evolve(proj.amplitudes, modes, times=np.array([0.0]), cutoff=cfg.cutoff)
        t_end = cfg.t_max if cfg.t_max > 0 else 1.1 * first.t_2pi
        times = np.linspace(0.0, t_end, cfg.n_times)
        result = evolve(
            proj.amplitudes,
            modes,
            times=times,
            snapshot_times=tuple(_canonical_times(first.t_2pi)),
            cutoff=cfg.cutoff,
        )
        for idx, (t, field) in enumerate(result.snapshots):
            kcol = np.repeat(grid.k_values, grid.n_phi)
            pcol = np.tile(grid.phi_values, grid.n_k)
            flat = field.values.ravel()
            write_csv(
                outdir / f"snapshot_{idx:02d}.csv",
                ["k", "phi", "re", "im", "density"],
                zip(kcol, pcol, flat.real, flat.imag, np.abs(flat) ** 2),
            )
            marg = k_marginal(field)
            write_csv(
                outdir / f"k_marginal_{idx:02d}.csv",
                ["k", "density"],
                zip(grid.k_values, marg),
            )
        meta["capture"] = proj.capture
    else:
        probe = fourpi_mod.evolve_fourpi(
            params,
            times=np.array([0.0]),
            n_bands=cfg.n_bands,
            cutoff=cfg.fourpi_cutoff,
            cutoff_2pi=cfg.cutoff,
        )
        t_end = cfg.t_max if cfg.t_max > 0 else 1.1 * probe.t_2pi
        times = np.linspace(0.0, t_end, cfg.n_times)
        result = fourpi_mod.evolve_fourpi(
            params,
            times=times,
            n_bands=cfg.n_bands,
            cutoff=cfg.fourpi_cutoff,
            cutoff_2pi=cfg.cutoff,
            snapshot_times=tuple(_canonical_times(probe.t_2pi)),
        )
        modes4 = fourpi_mod.solve_fourpi(params, 0.0, 3, cfg.fourpi_cutoff)
        phi = modes4.phi_values
        write_csv(
            outdir / "fourpi_modes.csv",
            ["phi_tilde", "band", "re", "im"],
            [
                (p, b, modes4.wavefunctions[b, i].real, modes4.wavefunctions[b, i].imag)
                for b in range(3)
                for i, p in enumerate(phi)
            ],
        )
        wf0 = bloch_wavefunction(params, 0.0, 0, phi[: phi.size // 2], cfg.cutoff)
        wfh = bloch_wavefunction(params, 0.5, 0, phi[: phi.size // 2], cfg.cutoff)
        rows = []
        for tag, wf in (("center", wf0), ("edge", wfh)):
            emb = fourpi_mod.embed_transmon_state(wf, phi)
            rows.extend((p, tag, v.real, v.imag) for p, v in zip(phi, emb))
        write_csv(outdir / "fourpi_targets.csv", ["phi_tilde", "target", "re", "im"], rows)
        write_csv(
            outdir / "fourpi_potential.csv",
            ["phi_tilde", "v"],
            zip(phi, -params.e_j * np.cos(phi) - params.e_4pi * np.cos(phi / 2.0)),
        )
        for idx, (t, values) in enumerate(result.snapshots):
            write_csv(
                outdir / f"snapshot_{idx:02d}.csv",
                ["phi_tilde", "re", "im", "density"],
                zip(phi, values.real, values.imag, np.abs(values) ** 2),
            )
        meta["capture"] = result.capture

    _write_trace(outdir, result)
    meta["shunt"] = cfg.shunt
    meta["t_2pi"] = result.t_2pi
    meta["t_2pi_low_pair"] = result.t_2pi_low_pair
    meta["max_residual"] = float(result.residual.max())
    meta["dominant_modes"] = list(result.dominant)
    write_json(outdir / "evolve_meta.json", meta)
    if meta["capture"] < 1.0 - 1e-5:
        print("warning: mode capture below threshold", file=sys.stderr)
        return 1
    return 0


def cmd_protocol(cfg: RunConfig, outdir: Path) -> int:
    params = cfg.params()
    ratios = [50.0, 10.0, 1.0]
    rows = []
    for ratio in ratios:
        p = CircuitParams(e_c=params.e_j / ratio, e_j=params.e_j, n_x=params.n_x)
        rows.append((ratio, params.e_j, p.e_c, z_splitting(p, cfg.cutoff)))
    free = CircuitParams(e_c=params.e_c, e_j=0.0, n_x=params.n_x)
    rows.append((0.0, 0.0, free.e_c, z_splitting(free, cfg.cutoff)))
    write_csv(
        outdir / "protocol_zsplit.csv",
        ["ej_over_ec", "ej", "ec", "z_splitting"],
        rows,
    )

    hold_rows = []
    t2 = {}
    for shunt in ("4pi", "ind"):
        sp = cfg.shunt_params(shunt)
        if shunt == "4pi":
            probe = fourpi_mod.evolve_fourpi(
                sp, times=np.array([0.0]), cutoff=cfg.fourpi_cutoff, cutoff_2pi=cfg.cutoff
            )
            t_2pi = probe.t_2pi
            holds = [t_2pi / 4, t_2pi / 2, 3 * t_2pi / 4]
            res = fourpi_mod.evolve_fourpi(
                sp, times=np.array(holds), cutoff=cfg.fourpi_cutoff, cutoff_2pi=cfg.cutoff
            )
        else:
            first = run_inductive(
                sp, ZakGrid(cfg.n_k, cfg.n_phi), cfg.n_modes, times=np.array([0.0]),
                cutoff=cfg.cutoff,
            )
            t_2pi = first.t_2pi
            holds = [t_2pi / 4, t_2pi / 2, 3 * t_2pi / 4]
            res = run_inductive(
                sp, ZakGrid(cfg.n_k, cfg.n_phi), cfg.n_modes, times=np.array(holds),
                cutoff=cfg.cutoff,
            )
        t2[shunt] = t_2pi
        for t, pc, pe, r, th in zip(
            res.times, res.p_center, res.p_edge, res.residual, res.relative_phase
        ):
            hold_rows.append((shunt, t, pc, pe, r, th, abs(pc - pe)))
    write_csv(
        outdir / "protocol_holds.csv",
        ["shunt", "t_hold", "p_center", "p_edge", "residual", "theta", "balance"],
        hold_rows,
    )

    meta = cfg.echo("protocol")
    meta["resolved_shunts"] = {
        shunt: {"el": cfg.shunt_params(shunt).e_l, "e4pi": cfg.shunt_params(shunt).e_4pi}
        for shunt in ("ind", "4pi")
    }
    meta["t_2pi_4pi"] = t2["4pi"]
    meta["t_2pi_ind"] = t2["ind"]
    splits = [r[3] for r in rows[:3]]
    meta["z_splitting_monotone"] = bool(splits[0] < splits[1] < splits[2])
    write_json(outdir / "protocol_meta.json", meta)
    return 0


_COMMANDS = {
    "bands": cmd_bands,
    "fluxonium-modes": cmd_fluxonium_modes,
    "evolve": cmd_evolve,
    "protocol": cmd_protocol,
}


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qcs",
        description="Spectral simulation of transmon circuits with transient shunts",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, default=None)
        p.add_argument("--out", type=Path, required=True)
        p.add_argument("--ec", type=float, default=None)
        p.add_argument("--ej", type=float, default=None)
        p.add_argument("--el", type=float, default=None)
        p.add_argument("--e4pi", type=float, default=None)
        p.add_argument("--nx", type=float, default=None)
        p.add_argument("--delta", type=float, default=None)
        p.add_argument("--n-k", dest="n_k", type=int, default=None)
        p.add_argument("--n-phi", dest="n_phi", type=int, default=None)
        p.add_argument("--cutoff", type=int, default=None)
        p.add_argument("--fourpi-cutoff", dest="fourpi_cutoff", type=int, default=None)
        p.add_argument("--n-bands", dest="n_bands", type=int, default=None)
        p.add_argument("--n-modes", dest="n_modes", type=int, default=None)
        p.add_argument("--n-gallery", dest="n_gallery", type=int, default=None)
        p.add_argument("--phi-max-pi", dest="phi_max_pi", type=int, default=None)
        p.add_argument("--n-grid", dest="n_grid", type=int, default=None)
        p.add_argument("--t-max", dest="t_max", type=float, default=None)
        p.add_argument("--n-times", dest="n_times", type=int, default=None)
        p.add_argument("--shunt", choices=("ind", "4pi"), default=None)
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {
        name: getattr(args, name)
        for name in _FIELD_TYPES
        if hasattr(args, name)
    }
    try:
        cfg = load_config(args.config, overrides).resolved(args.command)
        cfg.params()  # validate physical fields up front
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    outdir: Path = args.out
    outdir.mkdir(parents=True, exist_ok=True)
    try:
        return _COMMANDS[args.command](cfg, outdir)
    except Exception as exc:  # solver/self-check failure: nonzero exit
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
