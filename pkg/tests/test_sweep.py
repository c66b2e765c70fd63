import math
from dataclasses import replace

import numpy as np
import pytest

from nanofiber_cqed.config import scenario_to_config
from nanofiber_cqed.errors import ConfigError
from nanofiber_cqed.sweep import (
    CSV_COLUMNS,
    builtin_scenarios,
    lookup_scenario,
    run_scenario,
    standing_wave_period,
)

NAMES = {"fig2", "fig3", "fig4", "fig5", "fig6", "fig7", "fig8", "fig9", "fig10"}


def _diff(a, b):
    ca, cb = scenario_to_config(a), scenario_to_config(b)
    return {k for k in ca if ca[k] != cb[k]} - {"name"}


def _interior_extrema(y, kind):
    d = np.diff(y)
    if kind == "min":
        return np.flatnonzero((d[:-1] < 0) & (d[1:] > 0)) + 1
    return np.flatnonzero((d[:-1] > 0) & (d[1:] < 0)) + 1


@pytest.fixture(scope="module")
def catalog():
    return builtin_scenarios()


def test_catalog_names(catalog):
    assert set(catalog) == NAMES


@pytest.mark.parametrize("short, base", [("fig8", "fig3"), ("fig9", "fig4"), ("fig10", "fig5")])
def test_short_cavity_variants(catalog, short, base):
    assert _diff(catalog[short], catalog[base]) == {"cavity.length_m"}
    assert catalog[short].cavity.length == 1e-3


@pytest.mark.parametrize("detuned, base", [("fig6", "fig3"), ("fig7", "fig4")])
def test_detuned_variants(catalog, detuned, base):
    assert _diff(catalog[detuned], catalog[base]) == {"drive.detuning_MHz"}
    s = catalog[detuned]
    assert s.drive.probe_frequency - s.cavity.resonance_frequency == pytest.approx(2 * math.pi * 30e6, rel=1e-6)


def test_builtin_parameters(catalog):
    s = catalog["fig3"]
    assert s.cavity.length == 0.1
    assert s.cavity.reflectivity**2 == pytest.approx(0.9)
    assert s.drive.input_power == 10e-12
    assert catalog["fig2"].drive.input_power == 1e-12
    assert lookup_scenario("fig2b").drive.input_power == 5e-12
    assert catalog["fig5"].distance == 200e-9
    assert catalog["fig4"].scan_range[1] == pytest.approx(standing_wave_period(s.fiber, s.cavity.resonance_frequency))


def test_unknown_scenario():
    with pytest.raises(ConfigError):
        lookup_scenario("fig11")


def test_invalid_scenarios(catalog):
    s = catalog["fig3"]
    with pytest.raises(ConfigError):
        replace(s, scan_range=(600e-9, 5e-9, 10))
    with pytest.raises(ConfigError):
        replace(s, scan_range=(1e-9, 600e-9, 10))
    with pytest.raises(ConfigError):
        replace(s, scan_range=(5e-9, 600e-9, 1))
    with pytest.raises(ConfigError):
        replace(s, solver="magic")


def _bits(result):
    cols = [c for c in CSV_COLUMNS if c != "path"]
    return np.array([[getattr(r, c) for c in cols] for r in result.records], dtype=float).tobytes()


def test_determinism_and_workers(catalog):
    s = replace(catalog["fig3"], scan_range=(5e-9, 600e-9, 12))
    r1, r2 = run_scenario(s), run_scenario(s)
    r3 = run_scenario(s, workers=2)
    assert _bits(r1) == _bits(r2) == _bits(r3)
    assert [r.path for r in r1.records] == [r.path for r in r3.records]


def test_record_count_and_columns(catalog):
    s = replace(catalog["fig2"], scan_range=(5e-9, 600e-9, 7))
    res = run_scenario(s)
    assert len(res.records) == 7
    for rec in res.records:
        assert rec.path == "both"
        for col in CSV_COLUMNS[:-2] + ("N_cav_analytic", "P_e_analytic"):
            assert not math.isnan(getattr(rec, col))


def test_axial_periodicity(catalog):
    s = catalog["fig4"]
    period = s.scan_range[1]
    res = run_scenario(replace(s, scan_range=(0.0, 2 * period, 41)))
    for col in ("N_cav", "P_e", "g2", "gamma", "delta_a"):
        y = res.column(col)
        np.testing.assert_allclose(y[:21], y[20:], rtol=1e-8, atol=1e-14)
    G = res.column("G")
    np.testing.assert_allclose(G[:21] ** 2, G[20:] ** 2, rtol=1e-8, atol=1e-6 * np.max(np.abs(G)))


def test_fig4_minima_at_antinodes(catalog):
    s = catalog["fig4"]
    period = s.scan_range[1]
    res = run_scenario(replace(s, scan_range=(0.0, period, 41)))
    n = res.column("N_cav")
    assert np.argmin(n) in (0, 40)
    assert np.argmax(n) == 20


def test_fig2_monotone_segments(catalog):
    res = run_scenario(catalog["fig2"])
    n, pe, coord = res.column("N_cav"), res.column("P_e"), res.column("coord")
    n_min, pe_max = _interior_extrema(n, "min"), _interior_extrema(pe, "max")
    assert len(n_min) == 1 and len(pe_max) == 1
    assert coord[n_min[0]] < coord[pe_max[0]]


def test_failed_points_are_flagged(catalog):
    # strong drive: near resonance the weak-drive truncation cap is exceeded
    s = replace(
        catalog["fig5"],
        drive=replace(catalog["fig5"].drive, input_power=1e-10),
        scan_range=(-60 * 2 * math.pi * 5.25e6, 60 * 2 * math.pi * 5.25e6, 9),
    )
    res = run_scenario(s)
    assert len(res.records) == 9
    failed = res.failures
    assert 0 < len(failed) < 9
    assert all(r.error and math.isnan(r.N_cav) for r in failed)
    assert res.records[0].path == "exact"
