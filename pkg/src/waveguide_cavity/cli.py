"""
Command-line interface for the atomic-mirror cavity simulator.

This module provides:
- simulate / fom / poles / reflectance for single computations
- sweep and compare for parameter studies and cross-method checks
- presets and reproduce for the platform table and figure recipes

Global options (--config, --out, --format, --svg, --seed, --reproducible)
go before the subcommand. Failures print a JSON error object on stderr and
exit with the error's code: 2 configuration, 3 numerical, 4 tolerance.
"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Optional

import numpy as np
import pandas as pd
import typer

from waveguide_cavity.errors import CavityError, ToleranceFailure
from waveguide_cavity.model import (
    CavityParams,
    classify_regime,
    derive_groups,
    figures_of_merit,
    presets_consistency,
    presets_document,
)
from waveguide_cavity.run_config import RunConfig, load_run_config
from waveguide_cavity.runner import (
    axis_values,
    compare,
    parse_range,
    reflectance_table,
    run,
    run_recipe,
    sweep,
)
from waveguide_cavity.spectral import macroscopic_poles
from waveguide_cavity.utils.seeding import resolve_seed
from waveguide_cavity.writers import render_table, write_svg, write_table

app = typer.Typer(add_completion=False, help="Atom in a cavity of atomic Bragg mirrors on a 1D waveguide.")

# Configure logging
logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

N_ATOMS = typer.Option(None, "--n-atoms", help="Atoms per mirror N")
TAU = typer.Option(None, "--tau", help="Delay gamma*d/v_g")
PHI = typer.Option(None, "--phi", help="Phase offset phi, |phi| < pi")
ENV_RATE = typer.Option(None, "--env-rate", help="gamma_0/gamma")
PRESET = typer.Option(None, "--preset", help="cesium, quantum_dot or superconducting")
GAMMA_RATIO = typer.Option(None, "--gamma-ratio", help="Override 2*gamma/gamma_0 of a preset")


@dataclass
class GlobalOptions:
    config: Optional[Path] = None
    out: Optional[str] = None
    fmt: Optional[str] = None
    svg: Optional[str] = None
    seed: Optional[int] = None
    reproducible: bool = False


def _fail(e: CavityError) -> None:
    typer.echo(json.dumps(e.to_dict(), sort_keys=True), err=True)
    raise SystemExit(e.exit_code) from e


def _run_config(ctx: typer.Context, **overrides: Any) -> RunConfig:
    opts: GlobalOptions = ctx.obj or GlobalOptions()
    return load_run_config(
        opts.config,
        out=opts.out,
        fmt=opts.fmt,
        svg=opts.svg,
        seed=opts.seed,
        reproducible=opts.reproducible or None,
        **overrides,
    )


def _emit(frame: pd.DataFrame, meta: dict[str, Any], cfg: RunConfig) -> None:
    if cfg.out:
        write_table(frame, cfg.out, meta, cfg.fmt, cfg.reproducible)
    else:
        typer.echo(render_table(frame, meta, cfg.fmt, cfg.reproducible), nl=False)


@app.callback()
def main(
    ctx: typer.Context,
    config: Optional[Path] = typer.Option(None, "--config", help="YAML/JSON run configuration"),
    out: Optional[str] = typer.Option(None, "--out", help="Output file (default: stdout)"),
    fmt: Optional[str] = typer.Option(None, "--format", help="csv or json"),
    svg: Optional[str] = typer.Option(None, "--svg", help="Also write an SVG plot here"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Random seed (disorder ensembles)"),
    reproducible: bool = typer.Option(False, "--reproducible", help="Omit the timestamp line"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
    quiet: bool = typer.Option(False, "--quiet", "-q"),
):
    if verbose:
        logging.getLogger().setLevel(logging.DEBUG)
    elif quiet:
        logging.getLogger().setLevel(logging.WARNING)
    ctx.obj = GlobalOptions(config, out, fmt, svg, seed, reproducible)


@app.command()
def simulate(
    ctx: typer.Context,
    n_atoms: Optional[int] = N_ATOMS,
    tau: Optional[float] = TAU,
    phi: Optional[float] = PHI,
    env_rate: Optional[float] = ENV_RATE,
    preset: Optional[str] = PRESET,
    gamma_ratio: Optional[float] = GAMMA_RATIO,
    gamma_hz: Optional[float] = typer.Option(None, "--gamma-hz", help="Physical gamma in 1/s"),
    d_m: Optional[float] = typer.Option(None, "--d-m", help="Mirror separation in m"),
    vg_over_c: Optional[float] = typer.Option(None, "--vg-over-c"),
    method: Optional[str] = typer.Option(None, "--method", help="auto, dde, series, spectral, main, approx, detuned, markov"),
    t_max: Optional[float] = typer.Option(None, "--t-max", help="Horizon in units of 1/gamma"),
    points: Optional[int] = typer.Option(None, "--points"),
    dt: Optional[float] = typer.Option(None, "--dt", help="DDE step"),
    precision: Optional[str] = typer.Option(None, "--precision", help="Series precision: auto, double, extended"),
    pole_count: Optional[int] = typer.Option(None, "--pole-count"),
):
    """Excitation amplitude of the central atom versus time."""
    try:
        cfg = _run_config(
            ctx,
            n_atoms=n_atoms,
            delay_tau=tau,
            phase_offset=phi,
            env_rate=env_rate,
            preset=preset,
            gamma_ratio=gamma_ratio,
            gamma_hz=gamma_hz,
            d_m=d_m,
            vg_over_c=vg_over_c,
            method=method,
            t_max=t_max,
            n_points=points,
            dt=dt,
            precision=precision,
            pole_count=pole_count,
        )
        result = run(cfg)
    except CavityError as e:
        _fail(e)
    if not cfg.out:
        frame = result.trajectory.decimate().to_frame()
        typer.echo(render_table(frame, result.meta, cfg.fmt, cfg.reproducible), nl=False)
    raise SystemExit(0)


@app.command()
def fom(
    ctx: typer.Context,
    n_atoms: Optional[int] = N_ATOMS,
    tau: Optional[float] = TAU,
    phi: Optional[float] = PHI,
    env_rate: Optional[float] = ENV_RATE,
    preset: Optional[str] = PRESET,
    gamma_ratio: Optional[float] = GAMMA_RATIO,
):
    """Figures of merit: kappa, Rabi frequency, N_c, cooperativity, cycles ratio."""
    try:
        cfg = _run_config(
            ctx,
            n_atoms=n_atoms,
            delay_tau=tau,
            phase_offset=phi,
            env_rate=env_rate,
            preset=preset,
            gamma_ratio=gamma_ratio,
        )
        params = cfg.params()
    except CavityError as e:
        _fail(e)
    groups = derive_groups(params)
    row = {
        "n_atoms": params.n_atoms,
        "delay_tau": params.delay_tau,
        "a": groups.a,
        "detuning": groups.detuning,
        "regime": classify_regime(groups.a),
        **figures_of_merit(params).to_dict(),
    }
    _emit(pd.DataFrame([row]), {"env_rate": params.env_rate}, cfg)
    raise SystemExit(0)


@app.command()
def poles(
    ctx: typer.Context,
    tau: float = typer.Option(..., "--tau"),
    detuning: float = typer.Option(0.0, "--detuning", help="Delta in units of gamma"),
    count: int = typer.Option(64, "--count", help="Poles per sign"),
):
    """Macroscopic-limit poles and residue weights."""
    try:
        cfg = _run_config(ctx)
        pole_set = macroscopic_poles(tau, detuning, count)
    except CavityError as e:
        _fail(e)
    frame = pd.DataFrame(
        {
            "index": pole_set.indices,
            "re_s": pole_set.poles.real,
            "im_s": pole_set.poles.imag,
            "re_weight": pole_set.weights.real,
            "im_weight": pole_set.weights.imag,
        }
    )
    meta = {"tau": tau, "detuning": detuning, "tail_bound": pole_set.tail_bound}
    _emit(frame, meta, cfg)
    raise SystemExit(0)


@app.command()
def reflectance(
    ctx: typer.Context,
    n_atoms: int = typer.Option(..., "--n-atoms"),
    delta_range: Optional[str] = typer.Option(None, "--delta-range", help="lo:hi in units of gamma"),
    points: int = typer.Option(601, "--points"),
    sigma: float = typer.Option(0.0, "--sigma", help="Position disorder (fraction of d_m)"),
    samples: int = typer.Option(1000, "--samples"),
    lorentzian: bool = typer.Option(False, "--lorentzian", help="Closed form instead of transfer matrices"),
):
    """Mirror reflectance versus detuning."""
    try:
        cfg = _run_config(ctx)
        lo, hi = parse_range(delta_range) if delta_range else (-3.0 * n_atoms, 3.0 * n_atoms)
        grid = np.linspace(lo, hi, points)
        frame, meta = reflectance_table(
            n_atoms,
            grid,
            sigma=sigma,
            samples=samples if sigma > 0 else 1,
            seed=resolve_seed(cfg.seed),
            lorentzian=lorentzian,
        )
    except CavityError as e:
        _fail(e)
    _emit(frame, meta, cfg)
    if cfg.svg:
        write_svg(
            cfg.svg,
            [(meta["source"], grid, frame["reflectance"].to_numpy())],
            xlabel=r"$\Delta/\gamma$",
            ylabel=r"$R_m$",
        )
    raise SystemExit(0)


@app.command("sweep")
def sweep_command(
    ctx: typer.Context,
    axis: str = typer.Option(..., "--axis", help="n_atoms, delay_tau, phase_offset or env_rate"),
    value_range: str = typer.Option(..., "--range", help="lo:hi"),
    count: int = typer.Option(..., "--count"),
    log: bool = typer.Option(False, "--log", help="Geometric spacing"),
    n_atoms: Optional[int] = N_ATOMS,
    tau: Optional[float] = TAU,
    phi: Optional[float] = PHI,
    env_rate: Optional[float] = ENV_RATE,
    preset: Optional[str] = PRESET,
    method: str = typer.Option("auto", "--method"),
    t_max: float = typer.Option(10.0, "--t-max"),
    points: int = typer.Option(4001, "--points"),
    workers: int = typer.Option(1, "--workers"),
):
    """Fitted envelope rate and frequency along one parameter axis (long format)."""
    try:
        cfg = _run_config(
            ctx, n_atoms=n_atoms, delay_tau=tau, phase_offset=phi, env_rate=env_rate, preset=preset
        )
        base = cfg.params()
        lo, hi = parse_range(value_range)
        table = sweep(
            base,
            axis,
            axis_values(lo, hi, count, log),
            method=method,
            t_max=t_max,
            n_points=points,
            workers=workers,
        )
    except CavityError as e:
        _fail(e)
    meta = {"axis": axis, "method": method, **{f"param_{k}": v for k, v in base.to_dict().items()}}
    _emit(table, meta, cfg)
    raise SystemExit(0)


@app.command("compare")
def compare_command(
    ctx: typer.Context,
    methods: str = typer.Option("dde,approx", "--methods", help="Comma-separated method list"),
    n_atoms: Optional[int] = N_ATOMS,
    tau: Optional[float] = TAU,
    phi: Optional[float] = PHI,
    env_rate: Optional[float] = ENV_RATE,
    preset: Optional[str] = PRESET,
    t_max: float = typer.Option(2.0, "--t-max"),
    points: int = typer.Option(2001, "--points"),
    dt: Optional[float] = typer.Option(None, "--dt"),
):
    """Pairwise sup-norm and L2 distances; exit code 4 when any pair is out of tolerance."""
    try:
        cfg = _run_config(
            ctx, n_atoms=n_atoms, delay_tau=tau, phase_offset=phi, env_rate=env_rate, preset=preset
        )
        params: CavityParams = cfg.params()
        report = compare(
            params,
            [m.strip() for m in methods.split(",") if m.strip()],
            t_max=t_max,
            n_points=points,
            dt=dt,
        )
    except CavityError as e:
        _fail(e)
    _emit(report.to_frame(), report.meta(), cfg)
    if not report.passed:
        worst = max(report.pairs, key=lambda p: p.sup_norm / p.tolerance)
        _fail(
            ToleranceFailure(
                "cross-method distance above tolerance",
                pair=[worst.method_a, worst.method_b],
                sup_norm=worst.sup_norm,
                tolerance=worst.tolerance,
            )
        )
    raise SystemExit(0)


@app.command()
def presets(ctx: typer.Context):
    """Platform presets, JSON unless --format says otherwise; the tau check goes in the metadata."""
    opts: GlobalOptions = ctx.obj or GlobalOptions()
    try:
        cfg = _run_config(ctx)
        if opts.fmt is None:
            cfg = cfg.merged(fmt="json")
    except CavityError as e:
        _fail(e)
    _emit(pd.DataFrame(presets_document()), presets_consistency(), cfg)
    raise SystemExit(0)


@app.command()
def reproduce(
    ctx: typer.Context,
    recipe: str = typer.Argument(..., help="Recipe name under config/recipes or a YAML path"),
    out_dir: Path = typer.Option(Path("artifacts"), "--out-dir"),
):
    """Run a figure recipe, writing CSV and SVG into --out-dir."""
    opts: GlobalOptions = ctx.obj or GlobalOptions()
    try:
        paths = run_recipe(recipe, out_dir, seed=opts.seed, reproducible=opts.reproducible)
    except CavityError as e:
        _fail(e)
    for path in paths:
        typer.echo(str(path))
    raise SystemExit(0)


if __name__ == "__main__":
    app()
