"""
Method dispatch, runs, sweeps, cross-method comparison and figure recipes.

This is the layer the CLI talks to. Every entry point takes validated value
types and returns pandas tables or Trajectory objects; writing files is left
to ``writers`` except for ``run`` and ``run_recipe``, which produce artifacts.
"""

from __future__ import annotations

import itertools
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Sequence

import numpy as np
import pandas as pd

from .analysis import fit_oscillation, trajectory_distance
from .constants import (
    DEFAULT_OMEGA_A,
    DEFAULT_POLE_COUNT,
    EXACT_PAIR_TOLERANCE,
    K_LIMIT,
    K_LIMIT_EXTENDED,
    MACROSCOPIC_MIN_A,
    MARKOV_MAX_A,
    RECIPES_DIR,
    REGIME_TOLERANCES,
    SMALL_DELAY_MAX_TAU,
)
from .dde_core import IntegratorConfig, integrate_cavity
from .errors import CavityError, ConfigurationError, MethodValidityError
from .laplace_series import series_c0
from .mirror_optics import (
    AtomChain,
    disorder_averaged_reflectance,
    lorentzian_reflectance,
    reflectance_spectrum,
)
from .model import CavityParams, classify_regime, figures_of_merit
from .run_config import RunConfig, _load_yaml_config
from .spectral import (
    detuned_general_c0,
    macroscopic_c0,
    main_pole_c0,
    markov_c0,
    rabi_approx,
)
from .trajectory import Trajectory, uniform_grid
from .writers import write_svg, write_table

logger = logging.getLogger(__name__)

EXACT_METHODS = frozenset({"dde", "series"})
SWEEP_AXES = ("n_atoms", "delay_tau", "phase_offset", "env_rate")
SWEEP_COLUMNS = ["axis", "axis_value", "statistic", "value", "status"]
SWEEP_STATISTICS = ("envelope_rate", "probability_rate", "frequency", "n_peaks", "kappa", "rabi_freq")
COMPARE_COLUMNS = ["method_a", "method_b", "sup_norm", "l2", "tolerance", "within"]
REFLECTANCE_COLUMNS = ["delta_over_gamma", "reflectance"]


def series_order_needed(params: CavityParams, t_max: float) -> int:
    return int(math.floor(t_max / params.delay_tau)) + 1


def resolve_method(params: CavityParams, method: str, t_max: float, precision: str = "auto") -> str:
    """
    Turn ``auto`` into a concrete method: series while the order limit allows, else dde.
    """
    if method != "auto":
        return method
    limit = K_LIMIT_EXTENDED if precision == "extended" else K_LIMIT
    resolved = "series" if series_order_needed(params, t_max) <= limit else "dde"
    logger.info("method auto resolved to %s", resolved)
    return resolved


def method_validity(params: CavityParams, method: str, t_max: float, precision: str = "auto") -> str | None:
    """Reason why ``method`` is invalid for these parameters, or None."""
    if method == "series":
        limit = K_LIMIT_EXTENDED if precision == "extended" else K_LIMIT
        needed = series_order_needed(params, t_max)
        if needed > limit:
            return f"series needs {needed} terms, above the limit {limit}; use dde"
    if method == "spectral" and params.n_atoms * params.delay_tau < MACROSCOPIC_MIN_A:
        return "spectral needs N >= 10 / tau (macroscopic regime)"
    if method in ("approx", "detuned", "main") and params.delay_tau > SMALL_DELAY_MAX_TAU:
        return f"{method} is limited to tau << 1 (tau <= {SMALL_DELAY_MAX_TAU})"
    if method == "markov" and params.a >= MARKOV_MAX_A:
        return "markov neglects the delay; valid only for a = N tau < 0.1"
    return None


def simulate(
    params: CavityParams,
    method: str,
    t_grid: Any,
    *,
    dt: float | None = None,
    precision: str = "auto",
    pole_count: int = DEFAULT_POLE_COUNT,
) -> Trajectory:
    """
    Compute c0 on ``t_grid`` with one method.

    Raises:
        MethodValidityError: for spectral outside the macroscopic regime or a
            series above its order limit
    """
    grid = np.asarray(t_grid, dtype=float)
    t_max = float(grid[-1])
    requested = method
    method = resolve_method(params, method, t_max, precision)

    if method == "dde":
        traj = integrate_cavity(params, IntegratorConfig(t_max=t_max, dt=dt), t_eval=grid)
    elif method == "series":
        traj = series_c0(params, grid, precision=precision)
    elif method == "spectral":
        reason = method_validity(params, method, t_max)
        if reason:
            raise MethodValidityError(reason, n_atoms=params.n_atoms, delay_tau=params.delay_tau)
        traj = macroscopic_c0(params.delay_tau, params.detuning, grid, pole_count)
        if params.env_rate > 0:
            traj.c0 = traj.c0 * np.exp(-0.5 * params.env_rate * grid)
    elif method == "main":
        traj = main_pole_c0(params, grid)
    elif method == "approx":
        traj = rabi_approx(params, grid)
    elif method == "detuned":
        traj = detuned_general_c0(params, grid)
    elif method == "markov":
        traj = markov_c0(params, grid)
    else:
        raise ConfigurationError(f"Unknown method: {method}")

    traj.meta.update({f"param_{k}": v for k, v in params.to_dict().items()})
    traj.meta["method"] = method
    traj.meta["method_requested"] = requested
    return traj


@dataclass
class RunResult:
    trajectory: Trajectory
    params: CavityParams
    regime: str
    meta: dict[str, Any]
    artifacts: list[Path] = field(default_factory=list)


def run(config: RunConfig) -> RunResult:
    """Simulate one configuration and write the CSV/JSON table and optional SVG."""
    params = config.params()
    grid = uniform_grid(config.t_max, config.n_points)
    traj = simulate(
        params,
        config.method,
        grid,
        dt=config.dt,
        precision=config.precision,
        pole_count=config.pole_count,
    )
    fom = figures_of_merit(params)
    regime = classify_regime(params.a)
    meta = {**traj.meta, "regime": regime, "seed": config.seed, "kappa": fom.kappa, "rabi_freq": fom.rabi_freq}
    result = RunResult(traj, params, regime, meta)
    if config.out:
        result.artifacts.append(
            write_table(traj.decimate().to_frame(), config.out, meta, config.fmt, config.reproducible)
        )
    if config.svg:
        rate = fom.kappa + params.env_rate
        result.artifacts.append(
            write_svg(
                config.svg,
                [(traj.method, traj.t_grid, traj.p0)],
                envelope=(traj.t_grid, rate),
                title=f"N={params.n_atoms}, tau={params.delay_tau:g}, {regime}",
            )
        )
    return result


def _sweep_point(task: tuple[CavityParams, str, Any, str, float, dict[str, Any]]) -> list[dict[str, Any]]:
    base, axis, value, method, t_max, options = task
    rows = []
    try:
        cast = int(round(value)) if axis == "n_atoms" else float(value)
        params = base.replace(**{axis: cast})
        traj = simulate(params, method, uniform_grid(t_max, options["n_points"]), dt=options.get("dt"))
        fit = fit_oscillation(traj)
        fom = figures_of_merit(params)
        stats = {
            "envelope_rate": fit.envelope_rate,
            "probability_rate": fit.probability_rate,
            "frequency": fit.frequency,
            "n_peaks": float(fit.n_peaks),
            "kappa": fom.kappa,
            "rabi_freq": fom.rabi_freq,
        }
        for name in SWEEP_STATISTICS:
            rows.append({"axis": axis, "axis_value": float(value), "statistic": name, "value": stats[name], "status": "ok"})
    except CavityError as e:
        logger.warning("sweep point %s=%g failed: %s", axis, value, e.message)
        rows.append(
            {"axis": axis, "axis_value": float(value), "statistic": "error", "value": math.nan, "status": e.kind}
        )
    return rows


def sweep(
    base: CavityParams,
    axis: str,
    values: Sequence[float],
    *,
    method: str = "auto",
    t_max: float = 10.0,
    n_points: int = 4001,
    dt: float | None = None,
    workers: int = 1,
) -> pd.DataFrame:
    """
    Evaluate one statistic table per axis value.

    Points run in a process pool when ``workers > 1``; rows keep the order of
    ``values``. A failing point contributes a single ``error`` row and the
    sweep continues.

    Returns:
        Long-format frame with SWEEP_COLUMNS
    """
    if axis not in SWEEP_AXES:
        raise ConfigurationError(f"Unknown sweep axis: {axis}", known=list(SWEEP_AXES))
    options = {"n_points": n_points, "dt": dt}
    tasks = [(base, axis, v, method, t_max, options) for v in values]
    if not tasks:
        return pd.DataFrame(columns=SWEEP_COLUMNS)
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_sweep_point, tasks))
    else:
        chunks = [_sweep_point(task) for task in tasks]
    return pd.DataFrame(list(itertools.chain.from_iterable(chunks)), columns=SWEEP_COLUMNS)


def parse_range(text: str) -> tuple[float, float]:
    """'lo:hi' -> (lo, hi)."""
    lo, sep, hi = text.partition(":")
    try:
        if not sep:
            raise ValueError(text)
        return float(lo), float(hi)
    except ValueError as e:
        raise ConfigurationError(f"Range must look like 'lo:hi', got {text!r}") from e


def axis_values(lo: float, hi: float, count: int, log: bool = False) -> np.ndarray:
    if count < 0:
        raise ConfigurationError("count must be >= 0", count=count)
    if count == 0:
        return np.array([])
    if log:
        if lo <= 0 or hi <= 0:
            raise ConfigurationError("log-spaced ranges need positive bounds", lo=lo, hi=hi)
        return np.geomspace(lo, hi, count)
    return np.linspace(lo, hi, count)


def regime_tolerance(params: CavityParams) -> float:
    regime = classify_regime(params.a)
    tol = REGIME_TOLERANCES[regime]
    if regime == "macroscopic":
        tol += params.delay_tau / 6.0
    return tol


@dataclass
class PairDistance:
    method_a: str
    method_b: str
    sup_norm: float
    l2: float
    tolerance: float

    @property
    def within(self) -> bool:
        return self.sup_norm <= self.tolerance


@dataclass
class CompareReport:
    """Pairwise distances between methods on one shared grid."""

    methods: list[str]
    pairs: list[PairDistance]
    skipped: dict[str, str]
    regime: str
    tolerance: float
    figures: dict[str, Any]

    @property
    def passed(self) -> bool:
        return all(p.within for p in self.pairs)

    def distance(self, a: str, b: str) -> PairDistance:
        for p in self.pairs:
            if {p.method_a, p.method_b} == {a, b}:
                return p
        raise KeyError((a, b))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {
                    "method_a": p.method_a,
                    "method_b": p.method_b,
                    "sup_norm": p.sup_norm,
                    "l2": p.l2,
                    "tolerance": p.tolerance,
                    "within": p.within,
                }
                for p in self.pairs
            ],
            columns=COMPARE_COLUMNS,
        )

    def meta(self) -> dict[str, Any]:
        return {
            "regime": self.regime,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "skipped": self.skipped,
            **{f"fom_{k}": v for k, v in self.figures.items()},
        }


def compare(
    params: CavityParams,
    methods: Sequence[str],
    *,
    t_max: float = 2.0,
    n_points: int = 2001,
    dt: float | None = None,
    precision: str = "auto",
) -> CompareReport:
    """
    Run each valid method on a shared grid and measure all pairwise distances.

    Methods outside their validity domain are skipped with a warning. Exact
    pairs (dde, series) are held to EXACT_PAIR_TOLERANCE, every other pair to
    the regime tolerance.

    Raises:
        MethodValidityError: if fewer than two methods remain
    """
    grid = uniform_grid(t_max, n_points)
    skipped: dict[str, str] = {}
    kept: list[str] = []
    for m in methods:
        resolved = resolve_method(params, m, t_max, precision)
        reason = method_validity(params, resolved, t_max, precision)
        if reason:
            logger.warning("compare: skipping %s: %s", m, reason)
            skipped[m] = reason
        else:
            kept.append(resolved)
    if len(kept) < 2:
        raise MethodValidityError("compare needs at least two valid methods", kept=kept, skipped=skipped)

    cache: dict[str, Trajectory] = {}
    for m in kept:
        if m not in cache:
            cache[m] = simulate(params, m, grid, dt=dt, precision=precision)

    regime = classify_regime(params.a)
    tol = regime_tolerance(params)
    pairs = []
    for a, b in itertools.combinations(range(len(kept)), 2):
        ma, mb = kept[a], kept[b]
        sup, l2 = trajectory_distance(cache[ma], cache[mb])
        pair_tol = EXACT_PAIR_TOLERANCE if {ma, mb} <= EXACT_METHODS else tol
        pairs.append(PairDistance(ma, mb, sup, l2, pair_tol))
    return CompareReport(kept, pairs, skipped, regime, tol, figures_of_merit(params).to_dict())


def reflectance_table(
    n_atoms: int,
    delta_grid: Any,
    *,
    sigma: float = 0.0,
    samples: int = 1,
    seed: int = 0,
    lorentzian: bool = False,
    omega_a: float = DEFAULT_OMEGA_A,
) -> tuple[pd.DataFrame, dict[str, Any]]:
    """
    Reflectance of an N-atom Bragg mirror versus detuning.

    Uses the Lorentzian closed form, the ordered transfer-matrix chain or,
    when ``sigma > 0``, the intensity-averaged disorder ensemble (adds a
    ``stderr`` column).
    """
    grid = np.asarray(delta_grid, dtype=float)
    meta: dict[str, Any] = {"n_atoms": n_atoms}
    if lorentzian:
        frame = pd.DataFrame({"delta_over_gamma": grid, "reflectance": lorentzian_reflectance(grid, n_atoms)})
        meta["source"] = "lorentzian"
        return frame, meta
    chain = AtomChain.bragg(n_atoms, omega_a)
    if sigma > 0:
        result = disorder_averaged_reflectance(
            n_atoms, chain.spacing or math.pi / omega_a, sigma, grid, samples, seed, omega_a=omega_a
        )
        frame = pd.DataFrame({"delta_over_gamma": grid, "reflectance": result.mean, "stderr": result.stderr})
        meta.update({"source": "disorder", **result.meta()})
        return frame, meta
    frame = pd.DataFrame({"delta_over_gamma": grid, "reflectance": reflectance_spectrum(chain, grid)})
    meta["source"] = "transfer_matrix"
    return frame, meta


def recipe_path(name: str) -> Path:
    candidate = Path(name)
    if candidate.suffix in (".yaml", ".yml") and candidate.exists():
        return candidate
    path = RECIPES_DIR / f"{name}.yaml"
    if not path.exists():
        known = sorted(p.stem for p in RECIPES_DIR.glob("*.yaml"))
        raise ConfigurationError(f"Unknown recipe: {name}", known=known)
    return path


def run_recipe(name: str, out_dir: str | Path, *, seed: int | None = None, reproducible: bool = False) -> list[Path]:
    """
    Run a figure recipe from ``config/recipes`` and write ``<name>.csv`` and ``<name>.svg``.

    Trajectory recipes stack one long table over their curves (column ``curve``);
    reflectance recipes put one column per curve.
    """
    recipe = _load_yaml_config(recipe_path(name))
    kind = recipe.get("kind")
    label = recipe.get("name", Path(name).stem)
    out = Path(out_dir)
    if kind == "trajectories":
        return _trajectory_recipe(recipe, label, out, seed, reproducible)
    if kind == "reflectance":
        return _reflectance_recipe(recipe, label, out, seed, reproducible)
    raise ConfigurationError(f"Unknown recipe kind: {kind}", recipe=label)


def _trajectory_recipe(
    recipe: dict[str, Any], label: str, out: Path, seed: int | None, reproducible: bool
) -> list[Path]:
    base = RunConfig.from_mapping({**recipe.get("config", {}), "seed": seed})
    params = base.params()
    grid = uniform_grid(base.t_max, base.n_points)
    frames, curves = [], []
    for curve in recipe.get("curves", []):
        traj = simulate(params, curve["method"], grid, dt=base.dt, precision=base.precision)
        name = curve.get("label", traj.method)
        frame = traj.to_frame()
        frame.insert(0, "curve", name)
        frames.append(frame)
        curves.append((name, traj.t_grid, traj.p0))
    fom = figures_of_merit(params)
    meta = {
        "recipe": label,
        "regime": classify_regime(params.a),
        "seed": base.seed,
        **{f"param_{k}": v for k, v in params.to_dict().items()},
    }
    table = pd.concat(frames, ignore_index=True) if frames else pd.DataFrame()
    paths = [write_table(table, out / f"{label}.csv", meta, "csv", reproducible)]
    envelope = (grid, fom.kappa + params.env_rate) if recipe.get("envelope", False) else None
    paths.append(write_svg(out / f"{label}.svg", curves, envelope=envelope, title=recipe.get("title")))
    return paths


def _reflectance_recipe(
    recipe: dict[str, Any], label: str, out: Path, seed: int | None, reproducible: bool
) -> list[Path]:
    n_atoms = int(recipe["n_atoms"])
    lo, hi = parse_range(str(recipe.get("delta_range", f"{-3 * n_atoms}:{3 * n_atoms}")))
    grid = np.linspace(lo, hi, int(recipe.get("points", 601)))
    table = pd.DataFrame({"delta_over_gamma": grid})
    curves = []
    meta: dict[str, Any] = {"recipe": label, "n_atoms": n_atoms}
    for curve in recipe.get("curves", []):
        source = curve.get("source", "transfer_matrix")
        frame, curve_meta = reflectance_table(
            n_atoms,
            grid,
            sigma=float(curve.get("sigma", 0.0)),
            samples=int(curve.get("samples", 1)),
            seed=int(seed if seed is not None else curve.get("seed", 0)),
            lorentzian=source == "lorentzian",
        )
        name = curve.get("label", source)
        table[name] = frame["reflectance"].to_numpy()
        curves.append((name, grid, table[name].to_numpy()))
        meta.update({f"{name}_{k}": v for k, v in curve_meta.items() if k != "n_atoms"})
    paths = [write_table(table, out / f"{label}.csv", meta, "csv", reproducible)]
    paths.append(
        write_svg(
            out / f"{label}.svg",
            curves,
            xlabel=r"$\Delta/\gamma$",
            ylabel=r"$R_m$",
            title=recipe.get("title"),
        )
    )
    return paths


__all__ = [
    "EXACT_METHODS",
    "SWEEP_AXES",
    "SWEEP_COLUMNS",
    "COMPARE_COLUMNS",
    "REFLECTANCE_COLUMNS",
    "RunResult",
    "PairDistance",
    "CompareReport",
    "resolve_method",
    "method_validity",
    "simulate",
    "run",
    "sweep",
    "parse_range",
    "axis_values",
    "regime_tolerance",
    "compare",
    "reflectance_table",
    "recipe_path",
    "run_recipe",
]
