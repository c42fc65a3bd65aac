import math
import random

import numpy as np
import pytest

from ssrscreen.freqscan import (
    NumericalError, ScanError, ScanResult, ScanScenario, SlipPoleError, branch_impedance,
    driving_point_impedance, frequency_scan, network_admittance, rotor_branch_impedance,
    sensitivity_sweep, wind_farm_impedance,
)
from ssrscreen.model import Branch, Bus, Machine, NetworkModel, ShuntDevice, WindFarmParams

from conftest import ctg
from dense import dense_zpoi

CTG1_BEFORE = ("ST1-ST8/1", "ST5-ST7/1", "ST5-ST6/1")


def series_model(r=0.05, x=0.5, xc=0.125, kv=100.0, grid=True):
    buses = (Bus("POI", kv, "poi"), Bus("G", kv, "external-grid"))
    machines = (Machine("G", "infinite-grid", 10000.0, 0.1),) if grid else ()
    return NetworkModel("rlc", 100.0, buses, (Branch("POI", "G", "1", r, x, xc=xc),), (), machines)


def ideal(f):
    return 0j


# --- admittance ----------------------------------------------------------

def test_unit_reactance():
    m = series_model(r=0.0, x=1.0, xc=0.0)
    Y = network_admittance(m, 60.0).matrix.toarray()
    assert abs(Y[0, 1]) == pytest.approx(1.0)
    assert Y[0, 1] == pytest.approx(-(1 / 1j))


def test_perfect_compensation_at_fundamental():
    br = Branch("A", "B", "1", 0.0, 0.5, xc=0.5)
    assert branch_impedance(br, 60.0) == 0j


def test_rlc_resonance_at_30hz():
    br = Branch("A", "B", "1", 0.0, 0.5, xc=0.125)
    assert 60 * math.sqrt(0.125 / 0.5) == 30.0
    assert abs(branch_impedance(br, 30.0).imag) < 1e-15


def test_y_symmetric(before):
    for f in (5.0, 17.3, 42.0, 59.0):
        Y = network_admittance(before, f).matrix.toarray()
        assert np.allclose(Y, Y.T, rtol=0, atol=0)


def test_isolated_bus_named():
    m = NetworkModel("iso", 100.0, (Bus("A", 100.0), Bus("B", 100.0), Bus("C", 100.0)),
                     (Branch("A", "B", "1", 0.01, 0.1),))
    with pytest.raises(NumericalError, match="'C'"):
        network_admittance(m, 30.0)


def test_floating_island():
    with pytest.raises(NumericalError, match="island"):
        driving_point_impedance(series_model(grid=False), "POI", 30.0)


# --- driving point ---------------------------------------------------------

def test_series_rlc_driving_point():
    z = driving_point_impedance(series_model(), "POI", 30.0)
    assert z.real == pytest.approx(5.0, rel=1e-9)
    assert abs(z.imag) < 1e-3


def test_parallel_branches_closed_form():
    r1, x1, r2, x2 = 0.02, 0.3, 0.05, 0.7
    buses = (Bus("POI", 100.0, "poi"), Bus("G", 100.0, "external-grid"))
    m = NetworkModel("par", 100.0, buses,
                     (Branch("POI", "G", "1", r1, x1), Branch("POI", "G", "2", r2, x2)),
                     (), (Machine("G", "infinite-grid", 10000.0, 0.1),))
    for f in (10.0, 37.0, 55.0):
        h = f / 60
        z1, z2 = complex(r1, x1 * h), complex(r2, x2 * h)
        want = (z1 * z2 / (z1 + z2) + 1 / -1e6j) * 100.0
        assert driving_point_impedance(m, "POI", f) == pytest.approx(want, rel=1e-9)


def test_fixture_at_60hz_inductive_and_matches_dense(before):
    z = driving_point_impedance(before, "ST3", 60.0)
    assert np.isfinite(z) and z.imag > 0
    assert z == pytest.approx(dense_zpoi(before, "ST3", 60.0), rel=1e-9)


def test_dense_oracle_small_sample():
    rng = random.Random(3)
    for _ in range(20):
        m = random_network(rng)
        for f in (rng.uniform(1, 59) for _ in range(3)):
            assert driving_point_impedance(m, "B0", f) == pytest.approx(dense_zpoi(m, "B0", f), rel=1e-9)


def random_network(rng, n_max=6):
    n = rng.randint(2, n_max)
    buses = tuple(Bus(f"B{i}", rng.choice([69.0, 138.0, 345.0])) for i in range(n))
    branches = []
    for i in range(1, n):
        branches.append(Branch(f"B{rng.randrange(i)}", f"B{i}", "1", rng.uniform(0.001, 0.05),
                               rng.uniform(0.01, 0.5), rng.uniform(0, 0.3),
                               rng.choice([0.0, rng.uniform(0.01, 0.2)]),
                               r_freq_exponent=rng.choice([0.0, 0.5])))
    for _ in range(rng.randint(0, 3)):
        a, b = rng.sample(range(n), 2)
        branches.append(Branch(f"B{a}", f"B{b}", str(len(branches) + 2), rng.uniform(0.001, 0.05),
                               rng.uniform(0.01, 0.5), rng.uniform(0, 0.3)))
    shunts = tuple(ShuntDevice(f"B{rng.randrange(n)}", rng.uniform(-1, 1)) for _ in range(rng.randint(0, 2)))
    machines = [Machine(f"B{rng.randrange(1, n)}", "infinite-grid", 1000.0, 0.1)]
    if rng.random() < 0.5:
        machines.append(Machine(f"B{rng.randrange(n)}", "conventional", rng.uniform(50, 500), rng.uniform(0.1, 0.3)))
    return NetworkModel("rand", 100.0, buses, tuple(branches), shunts, tuple(machines))


# --- wind farm -------------------------------------------------------------

PARAMS = WindFarmParams(50, 0.01, 0.1, 3.0, 0.01, 0.1, ((0.0, 59.0), (1.0, 59.0)))


def test_ige_sign():
    for f in (5.0, 20.0, 58.9):
        assert rotor_branch_impedance(PARAMS, f, 59.0).real < 0
    assert rotor_branch_impedance(PARAMS, 59.5, 59.0).real > 0


def test_zero_slip_is_pole():
    with pytest.raises(SlipPoleError):
        rotor_branch_impedance(PARAMS, 59.0, 59.0)


def test_halving_turbines_doubles_impedance():
    full = wind_farm_impedance(PARAMS, ScanScenario(1.0), 20.0, 34.5, 100.0)
    half = wind_farm_impedance(PARAMS, ScanScenario(0.5), 20.0, 34.5, 100.0)
    assert half == pytest.approx(2 * full, rel=1e-12)


def test_wind_farm_direct_formula():
    f, fr = 20.0, 59.0
    s = (f - fr) / f
    h = f / 60
    zr = 0.01 / s + 0.1j * h
    zm = 3.0j * h
    zt = 0.01 + 0.1j * h + 1 / (1 / zm + 1 / zr)
    # farm rated 100 MVA at 34.5 kV, 50 turbines in parallel
    want = zt * 34.5 ** 2 * 50 / 100.0 / 50
    assert wind_farm_impedance(PARAMS, ScanScenario(), f, 34.5, 100.0) == pytest.approx(want, rel=1e-12)


# --- scans -------------------------------------------------------------------

def test_rlc_scan():
    res = frequency_scan(series_model(), "POI", None, ScanScenario(), 5.0, 59.0, 0.1, farm=ideal)
    assert len(res.crossovers) == 1
    c = res.crossovers[0]
    assert c.frequency == pytest.approx(30.0, abs=0.01)
    assert c.r_cum == pytest.approx(5.0, rel=1e-6)
    assert c.classification == "damped"


def test_flat_negative_farm():
    res = frequency_scan(series_model(), "POI", None, ScanScenario(), 5.0, 59.0, 0.1, farm=lambda f: -8 + 0j)
    assert res.damping.r_cum == pytest.approx(-3.0, rel=1e-6)
    assert res.damping.classification == "undamped"


def test_samples_and_crossover_bracketing():
    res = frequency_scan(series_model(), "POI", None, ScanScenario(), 5.0, 59.0, 0.5, farm=ideal)
    f = res.samples[:, 0]
    assert np.all(np.diff(f) > 0)
    for c in res.crossovers:
        i = np.searchsorted(f, c.frequency)
        assert res.samples[i - 1, 4] < 0 <= res.samples[i, 4]


def test_no_crossover_in_band():
    res = frequency_scan(series_model(), "POI", None, ScanScenario(), 40.0, 59.0, 0.1, farm=ideal)
    assert res.crossovers == [] and res.damping is None


@pytest.mark.parametrize("x,xc", [(0.5, 0.125), (0.4, 0.02), (0.8, 0.5), (0.3, 0.25)])
def test_analytic_resonance(x, xc):
    step = 0.1
    res = frequency_scan(series_model(r=0.037, x=x, xc=xc), "POI", None, ScanScenario(), 5.0, 59.0, step,
                         farm=ideal)
    assert res.damping.frequency == pytest.approx(60 * math.sqrt(xc / x), abs=2 * step)
    assert res.damping.r_cum == pytest.approx(3.7, rel=1e-6)


def test_monotone_compensation():
    # f_x = 60 sqrt(xc / x) rises with the compensation level
    fx = [frequency_scan(series_model(xc=xc), "POI", None, ScanScenario(), 5.0, 59.0, 0.1,
                         farm=ideal).damping.frequency for xc in np.linspace(0.02, 0.4, 12)]
    assert all(b > a for a, b in zip(fx, fx[1:]))


def test_zero_slip_sample_skipped(before):
    # rotor frequency 53.4 Hz at 10% dispatch lands on the grid
    res = frequency_scan(before, "ST3", None, ScanScenario(1.0, 0.1), 50.0, 55.0, 0.1)
    assert res.skipped and abs(res.skipped[0] - 53.4) < 1e-9
    assert not np.any(np.isclose(res.samples[:, 0], 53.4))


def six_scenarios(contingency):
    return [ScanScenario(t, d, sh, contingency) for t, d in ((1.0, 1.0), (1.0, 0.1), (0.1, 1.0))
            for sh in ("none", "all")]


def test_sweep_six_rows(before):
    res = sensitivity_sweep(before, "ST3", None, six_scenarios(ctg("CTG#1", *CTG1_BEFORE)))
    assert len(res) == 6 and all(isinstance(r, ScanResult) for r in res)
    assert [r.scenario.name for r in res][:2] == ["100% turbines at 100% Dispatch / No Shunt",
                                                  "100% turbines at 100% Dispatch / All Shunt"]
    for r in res:
        assert r.damping is not None and r.damping.r_cum < 0


def test_sweep_single():
    assert len(sensitivity_sweep(series_model(), "POI", None, [ScanScenario()], farm=ideal)) == 1


def test_sweep_error_isolated(before):
    bad = ScanScenario(1.0, 1.0, "none", ctg("bad", "ST1-ST9/1"), name="bad")
    good = ScanScenario()
    res = sensitivity_sweep(before, "ST3", None, [bad, good])
    assert isinstance(res[0], ScanError) and "unknown branch" in res[0].message
    assert isinstance(res[1], ScanResult)


def test_csv_layout():
    res = frequency_scan(series_model(), "POI", None, ScanScenario(), 5.0, 6.0, 0.5, farm=ideal)
    lines = res.to_csv().splitlines()
    assert lines[0] == "f_hz,r_net_ohm,x_net_ohm,r_cum_ohm,x_cum_ohm"
    assert len(lines) == 4


def test_bad_band():
    with pytest.raises(ValueError):
        frequency_scan(series_model(), "POI", None, ScanScenario(), 5.0, 61.0, 0.1, farm=ideal)
