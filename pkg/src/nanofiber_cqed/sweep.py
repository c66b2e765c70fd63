"""Scenario engine: declarative scans over atom position or probe detuning."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from datetime import datetime, timezone
from functools import lru_cache

import numpy as np

from . import __version__
from .analytic import weak_drive_solution
from .atom_field import (
    SURFACE_CUTOFF,
    AtomPosition,
    AtomSpec,
    cesium_d2,
    coupling_G,
    detuning_atom,
    total_decay_rate,
)
from .cavity import CavitySpec, DriveSpec, cavity_params, transmitted_power
from .errors import ConfigError, SolverError
from .fiber_modes import FiberSpec, GuidedModeSolution, solve_dispersion
from .liouvillian import SystemParams
from .steady_state import solve_steady

AXES = ("radial", "axial", "spectral")
SOLVERS = ("exact", "analytic", "both")
RADIAL_RANGE = (5e-9, 600e-9)
DEFAULT_POINTS = 200
SPECTRAL_HALF_WIDTH = 10.0  # in units of the natural linewidth
DETUNED_MHZ = 30.0


@dataclass(frozen=True)
class Scenario:
    """One reproducible scan.

    Scan coordinates are SI: r - a in m (radial), z in m (axial), or
    Delta_c in rad/s (spectral).  `distance` and `z` fix the coordinates that
    are not scanned; for spectral scans the drive frequency is replaced point
    by point.
    """

    name: str
    fiber: FiberSpec
    cavity: CavitySpec
    atom: AtomSpec
    drive: DriveSpec
    scan_axis: str
    scan_range: tuple
    distance: float = 200e-9
    z: float = 0.0
    solver: str = "exact"
    n_max: int | None = None

    def __post_init__(self):
        if self.scan_axis not in AXES:
            raise ConfigError(f"scan axis must be one of {AXES}, got {self.scan_axis!r}")
        if self.solver not in SOLVERS:
            raise ConfigError(f"solver must be one of {SOLVERS}, got {self.solver!r}")
        start, stop, points = self.scan_range
        if not start < stop:
            raise ConfigError(f"scan start {start} must be below stop {stop}")
        if int(points) != points or points < 2:
            raise ConfigError(f"scan needs at least 2 points, got {points}")
        if self.scan_axis == "radial" and start < SURFACE_CUTOFF * (1 - 1e-12):
            raise ConfigError(f"radial scans must start at least {SURFACE_CUTOFF:g} m above the surface")
        if self.scan_axis != "radial" and self.distance < SURFACE_CUTOFF * (1 - 1e-12):
            raise ConfigError(f"atom must sit at least {SURFACE_CUTOFF:g} m above the surface")
        if self.n_max is not None and self.n_max < 1:
            raise ConfigError("n_max must be >= 1")

    def coordinates(self):
        start, stop, points = self.scan_range
        return np.linspace(start, stop, int(points))


@dataclass(frozen=True)
class PointRecord:
    coord: float
    G: float
    gamma: float
    delta_a: float
    delta_c: float
    N_cav: float
    g2: float
    P_e: float
    P_out: float
    n_max: int
    path: str
    N_cav_analytic: float = math.nan
    P_e_analytic: float = math.nan
    error: str = ""


CSV_COLUMNS = ("coord", "G", "gamma", "delta_a", "delta_c", "N_cav", "g2", "P_e", "P_out", "n_max", "path")
ANALYTIC_COLUMNS = ("N_cav_analytic", "P_e_analytic")


@dataclass(frozen=True)
class SweepResult:
    scenario: Scenario
    records: tuple
    metadata: dict = field(default_factory=dict, compare=False)

    def column(self, name):
        return np.array([getattr(r, name) for r in self.records])

    @property
    def failures(self):
        return [r for r in self.records if r.path == "failed"]


@lru_cache(maxsize=32)
def guided_mode(fiber: FiberSpec, omega: float) -> GuidedModeSolution:
    return solve_dispersion(fiber, omega)


def point_setup(s: Scenario, coord: float):
    """SystemParams and probe frequency for one scan coordinate."""
    distance, z, drive = s.distance, s.z, s.drive
    if s.scan_axis == "radial":
        distance = coord
    elif s.scan_axis == "axial":
        z = coord
    else:
        drive = replace(drive, probe_frequency=s.cavity.resonance_frequency + coord)

    a = s.fiber.core_radius
    pos = AtomPosition.above_surface(a, distance, z)
    mode_c = guided_mode(s.fiber, s.cavity.resonance_frequency)
    mode_0 = guided_mode(s.fiber, s.atom.bare_frequency)
    cp = cavity_params(s.cavity, drive, mode_c.group_velocity)
    params = SystemParams(
        G=coupling_G(mode_c, s.cavity, s.atom, pos),
        gamma=total_decay_rate(mode_0, s.atom, pos.r),
        kappa=cp.kappa,
        eta=cp.eta,
        delta_a=detuning_atom(drive, s.atom, pos, a),
        delta_c=cp.detuning,
    )
    return params, drive.probe_frequency


def evaluate_point(s: Scenario, coord: float) -> PointRecord:
    try:
        params, omega_p = point_setup(s, coord)
    except SolverError as exc:
        return _failed(coord, None, exc)
    base = dict(
        coord=float(coord), G=params.G, gamma=params.gamma,
        delta_a=params.delta_a, delta_c=params.delta_c,
    )
    try:
        if s.solver == "analytic":
            w = weak_drive_solution(params)
            p_out = float(transmitted_power(params.kappa, omega_p, w.N_cav))
            return PointRecord(
                **base, N_cav=w.N_cav, g2=math.nan, P_e=w.P_e, P_out=p_out, n_max=0,
                path="analytic", N_cav_analytic=w.N_cav, P_e_analytic=w.P_e,
            )
        _, obs, n_used = solve_steady(params, s.n_max, probe_frequency=omega_p)
        rec = PointRecord(
            **base, N_cav=obs.N_cav, g2=obs.g2, P_e=obs.P_e, P_out=obs.P_out,
            n_max=n_used, path="exact",
        )
        if s.solver == "both":
            w = weak_drive_solution(params)
            rec = replace(rec, path="both", N_cav_analytic=w.N_cav, P_e_analytic=w.P_e)
        return rec
    except SolverError as exc:
        return _failed(coord, params, exc)


def _failed(coord, params, exc):
    nan = math.nan
    return PointRecord(
        coord=float(coord),
        G=params.G if params else nan,
        gamma=params.gamma if params else nan,
        delta_a=params.delta_a if params else nan,
        delta_c=params.delta_c if params else nan,
        N_cav=nan, g2=nan, P_e=nan, P_out=nan, n_max=0, path="failed",
        error=f"{type(exc).__name__}: {exc}",
    )


def _evaluate_star(args):
    return evaluate_point(*args)


def run_scenario(s: Scenario, workers: int = 1) -> SweepResult:
    coords = s.coordinates()
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            # map preserves input order
            records = tuple(pool.map(_evaluate_star, [(s, c) for c in coords], chunksize=8))
    else:
        records = tuple(evaluate_point(s, c) for c in coords)
    from .config import scenario_to_config

    metadata = {
        "code_version": __version__,
        "timestamp": datetime.now(timezone.utc).isoformat(timespec="seconds"),
        "units": "rates and detunings in rad/s (angular); coord in m for radial (r-a) and axial (z), rad/s for spectral (Delta_c); P_out in W",
        "frequency_convention": "config frequencies are ordinary frequencies in MHz, converted with 2*pi",
        **{f"scenario.{k}": v for k, v in scenario_to_config(s).items()},
    }
    return SweepResult(s, records, metadata)


def standing_wave_period(fiber: FiberSpec, omega_c: float) -> float:
    """Axial period pi/beta of every observable (G flips sign, G^2 repeats)."""
    return math.pi / guided_mode(fiber, omega_c).beta


def _figure3_base(atom=None) -> Scenario:
    atom = atom or cesium_d2()
    w0 = atom.bare_frequency
    return Scenario(
        name="fig3",
        fiber=FiberSpec(core_radius=200e-9, core_index=1.45, clad_index=1.0),
        cavity=CavitySpec.from_power_reflectivity(0.9, 0.1, w0, resonance_order=0),
        atom=atom,
        drive=DriveSpec(probe_frequency=w0, input_power=10e-12),
        scan_axis="radial",
        scan_range=(*RADIAL_RANGE, DEFAULT_POINTS),
        distance=200e-9,
        z=0.0,
        solver="exact",
    )


def _axial(s: Scenario, name) -> Scenario:
    period = standing_wave_period(s.fiber, s.cavity.resonance_frequency)
    return replace(s, name=name, scan_axis="axial", scan_range=(0.0, period, DEFAULT_POINTS), distance=200e-9)


def _spectral(s: Scenario, name) -> Scenario:
    half = SPECTRAL_HALF_WIDTH * s.atom.natural_linewidth
    return replace(s, name=name, scan_axis="spectral", scan_range=(-half, half, DEFAULT_POINTS), distance=200e-9)


def _detuned(s: Scenario, name) -> Scenario:
    wp = s.cavity.resonance_frequency + 2 * math.pi * DETUNED_MHZ * 1e6
    return replace(s, name=name, drive=replace(s.drive, probe_frequency=wp))


def _short(s: Scenario, name) -> Scenario:
    return replace(s, name=name, cavity=replace(s.cavity, length=1e-3))


def builtin_scenarios() -> dict:
    fig3 = _figure3_base()
    fig2 = replace(fig3, name="fig2", drive=replace(fig3.drive, input_power=1e-12), solver="both")
    fig4 = _axial(fig3, "fig4")
    fig5 = _spectral(fig3, "fig5")
    catalog = {
        "fig2": fig2,
        "fig3": fig3,
        "fig4": fig4,
        "fig5": fig5,
        "fig6": _detuned(fig3, "fig6"),
        "fig7": _detuned(fig4, "fig7"),
        "fig8": _short(fig3, "fig8"),
        "fig9": _short(fig4, "fig9"),
        "fig10": _short(fig5, "fig10"),
    }
    return catalog


# fig2 at its two drive powers
PANEL_ALIASES = {"fig2a": ("fig2", 1e-12), "fig2b": ("fig2", 5e-12)}


def lookup_scenario(name: str) -> Scenario:
    catalog = builtin_scenarios()
    if name in catalog:
        return catalog[name]
    if name in PANEL_ALIASES:
        base, power = PANEL_ALIASES[name]
        s = catalog[base]
        return replace(s, name=name, drive=replace(s.drive, input_power=power))
    raise ConfigError(f"unknown scenario {name!r}; known: {', '.join(catalog)} (+ {', '.join(PANEL_ALIASES)})")


def max_relative_gap(result: SweepResult):
    """Largest |exact - analytic| / exact over the scan, for N_cav and P_e."""
    ok = [r for r in result.records if r.path == "both"]
    if not ok:
        raise ValueError("scenario was not run with solver='both'")
    n_gap = max(abs(r.N_cav - r.N_cav_analytic) / r.N_cav for r in ok)
    p_gap = max(abs(r.P_e - r.P_e_analytic) / r.P_e for r in ok if r.P_e > 0)
    return n_gap, p_gap
