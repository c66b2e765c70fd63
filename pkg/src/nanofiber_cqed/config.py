"""
key=value scenario configuration.

One key per line, dotted keys for nesting, `#` starts a comment.  Values are
in user-facing units (nm, MHz as ordinary frequency, pW, kHz um^3); they are
converted to SI / angular units when the Scenario is built.  `scenario=NAME`
selects a builtin to overlay onto; without it every key is required.
"""

from __future__ import annotations

import math
from dataclasses import replace

from scipy.constants import c

from .atom_field import KHZ_UM3, AtomSpec
from .cavity import CavitySpec, DriveSpec
from .errors import ConfigError
from .fiber_modes import FiberSpec
from .sweep import AXES, SOLVERS, Scenario, lookup_scenario, standing_wave_period

TWO_PI = 2 * math.pi


def _positive(x):
    return x > 0


def _nonneg(x):
    return x >= 0


def _any(x):
    return True


def _unit_interval(x):
    return 0 < x < 1


def _index(x):
    return x >= 1


def _points(x):
    return x >= 2


# key -> (kind, constraint, description)
KEYS = {
    "name": ("str", None, "scenario label"),
    "solver": ("choice", SOLVERS, "exact | analytic | both"),
    "n_max": ("auto_int", _index, "photon cutoff, or auto"),
    "fiber.core_radius_nm": ("float", _positive, "must be > 0"),
    "fiber.core_index": ("float", _index, "must be >= 1"),
    "fiber.clad_index": ("float", _index, "must be >= 1"),
    "cavity.reflectivity_sq": ("float", _unit_interval, "|R|^2 must lie in (0, 1)"),
    "cavity.length_m": ("float", _positive, "must be > 0"),
    "cavity.resonance_order": ("int", None, "integer"),
    "cavity.reflection_phase_rad": ("float", _any, "finite"),
    "cavity.resonance_offset_MHz": ("float", _any, "finite"),
    "atom.wavelength_nm": ("float", _positive, "must be > 0"),
    "atom.linewidth_MHz": ("float", _positive, "must be > 0"),
    "atom.C3g_kHz_um3": ("float", _positive, "must be > 0"),
    "atom.C3e_kHz_um3": ("float", _positive, "must be > 0"),
    "drive.power_pW": ("float", _nonneg, "must be >= 0"),
    "drive.detuning_MHz": ("float", _any, "finite"),
    "position.r_minus_a_nm": ("float", _positive, "must be > 0"),
    "position.z_nm": ("float", _any, "finite"),
    "scan.axis": ("choice", AXES, "radial | axial | spectral"),
    "scan.start": ("auto_float", _any, "finite, or auto"),
    "scan.stop": ("auto_float", _any, "finite, or auto"),
    "scan.points": ("int", _points, "must be >= 2"),
}


def fmt(x) -> str:
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float):
        return repr(x) if x == 0 or not math.isfinite(x) else f"{x:.17g}"
    return str(x)


def _scan_to_si(axis, x):
    # scan.start/stop are nm for radial and axial, MHz for spectral
    return x / 1e9 if axis in ("radial", "axial") else _freq_to_si(x)


def _exact_user_value(guess, to_si, target):
    """Shortest decimal near `guess` that `to_si` maps back onto `target` bit-exactly.

    Keeps a run reproducible from its echoed metadata: the mode solver's
    finite-difference group velocity amplifies one-ulp input changes.
    """
    if not math.isfinite(guess):
        return guess
    for digits in range(1, 18):
        cand = float(f"{guess:.{digits}g}")
        if to_si(cand) == target:
            return cand
    return guess


def _freq_to_si(mhz):
    return TWO_PI * (mhz * 1e6)


def scenario_to_config(s: Scenario) -> dict:
    w0 = s.atom.bare_frequency
    wc = s.cavity.resonance_frequency
    start, stop, points = s.scan_range
    if s.scan_axis == "spectral":
        def scan_si(x):
            return _freq_to_si(x)
        scan_user = 1.0 / (TWO_PI * 1e6)
    else:
        def scan_si(x):
            return x / 1e9
        scan_user = 1e9

    def nm(x):
        return _exact_user_value(x * 1e9, lambda v: v / 1e9, x)

    def mhz_offset(base, target):
        return _exact_user_value((target - base) / TWO_PI / 1e6, lambda v: base + _freq_to_si(v), target)

    wavelength_nm = _exact_user_value(TWO_PI * c / w0 * 1e9, lambda v: _wavelength_to_omega(v), w0)
    values = {
        "name": s.name,
        "solver": s.solver,
        "n_max": "auto" if s.n_max is None else int(s.n_max),
        "fiber.core_radius_nm": nm(s.fiber.core_radius),
        "fiber.core_index": s.fiber.core_index,
        "fiber.clad_index": s.fiber.clad_index,
        "cavity.reflectivity_sq": _exact_user_value(
            s.cavity.reflectivity**2, math.sqrt, s.cavity.reflectivity
        ),
        "cavity.length_m": s.cavity.length,
        "cavity.resonance_order": int(s.cavity.resonance_order),
        "cavity.reflection_phase_rad": s.cavity.reflection_phase,
        "cavity.resonance_offset_MHz": mhz_offset(w0, wc),
        "atom.wavelength_nm": wavelength_nm,
        "atom.linewidth_MHz": _exact_user_value(
            s.atom.natural_linewidth / TWO_PI / 1e6, _freq_to_si, s.atom.natural_linewidth
        ),
        "atom.C3g_kHz_um3": _exact_user_value(s.atom.c3_ground / KHZ_UM3, lambda v: v * KHZ_UM3, s.atom.c3_ground),
        "atom.C3e_kHz_um3": _exact_user_value(s.atom.c3_excited / KHZ_UM3, lambda v: v * KHZ_UM3, s.atom.c3_excited),
        "drive.power_pW": _exact_user_value(s.drive.input_power * 1e12, lambda v: v / 1e12, s.drive.input_power),
        "drive.detuning_MHz": mhz_offset(wc, s.drive.probe_frequency),
        "position.r_minus_a_nm": nm(s.distance),
        "position.z_nm": nm(s.z),
        "scan.axis": s.scan_axis,
        "scan.start": _exact_user_value(start * scan_user, scan_si, start),
        "scan.stop": _exact_user_value(stop * scan_user, scan_si, stop),
        "scan.points": int(points),
    }
    return {k: fmt(v) for k, v in values.items()}


def _wavelength_to_omega(nm):
    return TWO_PI * c / (nm / 1e9)


def _parse_value(key, raw, line):
    kind, check, desc = KEYS[key]
    if kind == "str":
        return raw
    if kind == "choice":
        if raw not in check:
            raise ConfigError(f"{key}: expected one of {', '.join(check)}, got {raw!r}", line)
        return raw
    if kind.startswith("auto_") and raw == "auto":
        return None
    try:
        value = int(raw) if kind in ("int", "auto_int") else float(raw)
    except ValueError:
        raise ConfigError(f"{key}: cannot parse {raw!r} as a number", line) from None
    if isinstance(value, float) and not math.isfinite(value):
        raise ConfigError(f"{key}: value must be finite", line)
    if check is not None and not check(value):
        raise ConfigError(f"{key}: {desc}, got {raw}", line)
    return value


def parse_lines(text: str):
    """Yield (line_number, key, raw_value) for each assignment."""
    for lineno, raw_line in enumerate(text.splitlines(), start=1):
        line = raw_line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected key=value, got {raw_line.strip()!r}", lineno)
        key, value = (part.strip() for part in line.split("=", 1))
        yield lineno, key, value


def parse_config(text: str, overrides=(), base=None) -> Scenario:
    """Build a Scenario from config text plus `key=value` override strings.

    `base` names a builtin to start from; a `scenario=` line in the text wins.
    """
    entries = list(parse_lines(text))
    for i, item in enumerate(overrides, start=1):
        entries.extend((f"--set #{i}", k, v) for _, k, v in parse_lines(item))

    base_name = base
    assigned = {}
    for lineno, key, raw in entries:
        if key == "scenario":
            base_name = raw
            continue
        if key not in KEYS:
            raise ConfigError(f"unknown key {key!r}", lineno)
        assigned[key] = (_parse_value(key, raw, lineno), lineno)

    if base_name is not None:
        try:
            base = lookup_scenario(base_name)
        except ConfigError as exc:
            raise ConfigError(str(exc), _line_of(entries, "scenario")) from None
        if not assigned:
            return base
        values = {k: _parse_value(k, v, None) for k, v in scenario_to_config(base).items()}
    else:
        missing = [k for k in KEYS if k not in assigned]
        if missing:
            raise ConfigError(f"missing required key(s) without a base scenario: {', '.join(missing)}")
        values = {}
    for key, (value, _) in assigned.items():
        values[key] = value
    try:
        return _build(values, base_name, assigned)
    except ConfigError as exc:
        raise ConfigError(str(exc), _first_line(assigned)) from None


def _line_of(entries, key):
    return next((ln for ln, k, _ in entries if k == key), None)


def _first_line(assigned):
    lines = [ln for _, ln in assigned.values() if isinstance(ln, int)]
    return min(lines) if lines else None


def _build(v: dict, base_name, assigned) -> Scenario:
    w0 = _wavelength_to_omega(v["atom.wavelength_nm"])
    atom = AtomSpec(
        bare_frequency=w0,
        natural_linewidth=_freq_to_si(v["atom.linewidth_MHz"]),
        c3_ground=v["atom.C3g_kHz_um3"] * KHZ_UM3,
        c3_excited=v["atom.C3e_kHz_um3"] * KHZ_UM3,
    )
    wc = w0 + _freq_to_si(v["cavity.resonance_offset_MHz"])
    fiber = FiberSpec(v["fiber.core_radius_nm"] / 1e9, v["fiber.core_index"], v["fiber.clad_index"])
    cavity = CavitySpec.from_power_reflectivity(
        v["cavity.reflectivity_sq"], v["cavity.length_m"], wc,
        resonance_order=v["cavity.resonance_order"],
        reflection_phase=v["cavity.reflection_phase_rad"],
    )
    drive = DriveSpec(wc + _freq_to_si(v["drive.detuning_MHz"]), v["drive.power_pW"] / 1e12)
    axis = v["scan.axis"]
    start, stop = v["scan.start"], v["scan.stop"]
    auto_start, auto_stop = _auto_range(axis, fiber, wc, atom)
    start = auto_start if start is None else _scan_to_si(axis, start)
    stop = auto_stop if stop is None else _scan_to_si(axis, stop)
    return Scenario(
        name=v["name"] if "name" in assigned or base_name is None else f"{v['name']}+custom",
        fiber=fiber,
        cavity=cavity,
        atom=atom,
        drive=drive,
        scan_axis=axis,
        scan_range=(start, stop, v["scan.points"]),
        distance=v["position.r_minus_a_nm"] / 1e9,
        z=v["position.z_nm"] / 1e9,
        solver=v["solver"],
        n_max=v["n_max"],
    )


def _auto_range(axis, fiber, wc, atom):
    from .sweep import RADIAL_RANGE, SPECTRAL_HALF_WIDTH

    if axis == "radial":
        return RADIAL_RANGE
    if axis == "axial":
        return 0.0, standing_wave_period(fiber, wc)
    half = SPECTRAL_HALF_WIDTH * atom.natural_linewidth
    return -half, half


def same_physics(a: Scenario, b: Scenario, rel=1e-12) -> bool:
    """Field-by-field comparison ignoring the name, floats to relative tolerance."""
    ca, cb = scenario_to_config(replace(a, name="")), scenario_to_config(replace(b, name=""))
    for key in ca:
        x, y = ca[key], cb[key]
        try:
            fx, fy = float(x), float(y)
        except ValueError:
            if x != y:
                return False
            continue
        if not math.isclose(fx, fy, rel_tol=rel, abs_tol=1e-9 * rel):
            return False
    return True
