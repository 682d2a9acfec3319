import numpy as np
import pytest
from scipy.integrate import solve_ivp

import topochain as tc
from topochain.errors import (
    FitDiverged,
    InsufficientSignal,
    InvalidParams,
    LosslessUnsupported,
    WindowOutOfRange,
)
from topochain.transient import (
    TransientTrace,
    default_source_nodes,
    fastest_time_constant,
)

from conftest import assert_close, row_params


def test_setup_defaults_frozen():
    s = tc.TransientSetup(row_params(1, n_cells=2), drive_frequency=3.0)
    assert s.source_nodes == (1, 2)
    # fastest time constant is R2*C2 = 0.0765, over the safety factor 20
    assert s.dt == pytest.approx(0.003825, rel=1e-12)
    assert s.switch_open_time == pytest.approx(20.943951023931955, rel=1e-12)
    assert s.t_end == pytest.approx(73.30382858376183, rel=1e-12)


def test_default_source_nodes_thirds():
    assert default_source_nodes(row_params(1, n_cells=2)) == (1, 2)
    assert default_source_nodes(row_params(1, n_cells=30)) == (20, 39)


def test_fastest_time_constant_picks_minimum():
    p = row_params(1)
    tau = fastest_time_constant(p, 3.0)
    assert tau == pytest.approx(p.r2 * p.c2)
    assert fastest_time_constant(p, 1e4) == pytest.approx(2.0 * np.pi / 1e4)


@pytest.mark.parametrize("kw", [
    {"drive_frequency": 0.0},
    {"drive_frequency": 3.0, "dt": 0.01},
    {"drive_frequency": 3.0, "switch_open_time": 3.0},
    {"drive_frequency": 3.0, "switch_open_time": 21.0, "t_end": 21.0},
    {"drive_frequency": 3.0, "source_nodes": (0, 4)},
    {"drive_frequency": 3.0, "source_nodes": (1, 1)},
])
def test_setup_rejects_bad_values(kw):
    with pytest.raises(InvalidParams):
        tc.TransientSetup(row_params(1, n_cells=2), **kw)


def test_lossless_chain_unsupported():
    p = tc.CircuitParams(0.0, 0.0, 1.0, 0.5, 1.0, n_cells=2)
    s = tc.TransientSetup(p, drive_frequency=1.0)
    with pytest.raises(LosslessUnsupported):
        tc.assemble_state_space(s)


def test_state_space_shapes():
    s = tc.TransientSetup(row_params(4, n_cells=4), drive_frequency=3.77)
    space = tc.assemble_state_space(s)
    # open chain: 2N-1 RC branches plus 2N grounded inductors
    assert space.n_branches == 7
    assert space.n_nodes == 8
    assert space.a_driven.shape == (15, 15)
    assert space.a_free.shape == (15, 15)
    assert space.v_map_free.shape == (8, 15)


def test_state_matrix_eigenvalues_match_natural_frequencies():
    """Free-phase state matrix of a periodic chain vs the polynomial roots.

    Every eigenvalue sits on i*z for some root z at a quantized wavenumber
    or at the conserved-charge zero; conversely every physical root is an
    eigenvalue.  Oracle run froze 1.3e-14 / 8.3e-15.
    """
    n = 8
    p = row_params(4, n_cells=n, boundary=tc.Boundary.PERIODIC)
    space = tc.assemble_state_space(tc.TransientSetup(p, drive_frequency=1.0))
    evals = np.linalg.eigvals(space.a_free)

    candidates = [0.0]
    physical = []
    for m in range(n):
        fr = tc.natural_frequencies(p, 2.0 * np.pi * m / n)
        candidates.extend(1j * z for z in fr.roots)
        physical.extend(1j * z for z in fr.physical_roots)
    candidates = np.array(candidates)
    physical = np.array(physical)

    fwd = max(np.abs(candidates - z).min() / max(1.0, abs(z)) for z in evals)
    bwd = max(np.abs(evals - z).min() / max(1.0, abs(z)) for z in physical)
    assert fwd < 1e-12
    assert bwd < 1e-12


def test_trapezoid_against_adaptive_rk45():
    """Node voltages from the cached-propagator trapezoid stepper agree with
    scipy RK45 at tight tolerance near the end of the driven phase; the
    frozen deviation is 1.07e-6."""
    s = tc.TransientSetup(row_params(4, n_cells=6), drive_frequency=3.77,
                          switch_open_time=17.0, t_end=19.0)
    trace = tc.simulate(s, max_samples=4000)
    space = tc.assemble_state_space(s)

    mid = np.searchsorted(trace.times, s.switch_open_time) - 2
    t_mid = trace.times[mid]
    sol = solve_ivp(
        lambda t, x: space.a_driven @ x
        + space.b_driven * np.sin(s.drive_frequency * t),
        (0.0, t_mid), np.zeros(space.a_driven.shape[0]),
        rtol=1e-11, atol=1e-13)
    v_ref = space.v_map_driven @ sol.y[:, -1] \
        + space.v_src_driven * np.sin(s.drive_frequency * t_mid)
    assert np.abs(v_ref - trace.node_voltages[mid]).max() < 3e-6


@pytest.fixture(scope="module")
def short_trace():
    s = tc.TransientSetup(row_params(4, n_cells=4), drive_frequency=3.77,
                          switch_open_time=17.0, t_end=40.0)
    return tc.simulate(s, max_samples=6000)


def test_trace_layout(short_trace):
    tr = short_trace
    n_nodes = 8
    assert tr.node_voltages.shape == (len(tr.times), n_nodes)
    assert tr.ground_currents.shape == (len(tr.times), n_nodes)
    # the switch instant is recorded twice, before and after the release
    # projection; otherwise times strictly increase
    gaps = np.diff(tr.times)
    assert np.all(gaps >= 0)
    assert np.count_nonzero(gaps == 0) == 1
    assert tr.times[np.argmin(gaps)] == tr.switch_time
    assert tr.times[0] == 0.0
    assert tr.switch_time >= tr.metadata.switch_open_time
    fin = tr.final_state()
    assert fin.dimension == 7 + 8


def test_clamped_nodes_follow_drive(short_trace):
    tr = short_trace
    s = tr.metadata
    driven = tr.times < tr.switch_time
    u = s.source_amplitude * np.sin(s.drive_frequency * tr.times[driven])
    for node in s.source_nodes:
        assert_close(tr.node_voltages[driven, node], u, 1e-12,
                     f"clamped node {node}")


def test_energy_monotone_after_release(short_trace):
    tr = short_trace
    post = tr.energy[tr.times >= tr.switch_time]
    assert post[0] > 0.0
    assert np.all(np.diff(post) <= 1e-9 * post[0])
    assert post[-1] < post[0]


def test_free_phase_conserves_total_charge(short_trace):
    tr = short_trace
    free = tr.times > tr.switch_time
    sums = tr.ground_currents[free].sum(axis=1)
    # roundoff accumulates over ~3e5 trapezoid steps; the invariant is exact
    # in exact arithmetic
    assert np.abs(sums).max() < 1e-11 * np.abs(tr.ground_currents).max()


def test_simulate_rejects_bad_max_samples():
    s = tc.TransientSetup(row_params(4, n_cells=2), drive_frequency=3.77)
    with pytest.raises(InvalidParams):
        tc.simulate(s, max_samples=0)


def test_ground_current_profile(short_trace):
    tr = short_trace
    t0 = tr.switch_time + 3.5 * tr.metadata.drive_period
    prof = tc.ground_current_profile(tr, (t0, tr.times[-1]))
    assert prof.shape == (8,)
    assert prof.sum() == pytest.approx(1.0, rel=1e-12)
    assert np.all(prof >= 0.0)


def test_ground_current_profile_window_checks(short_trace):
    tr = short_trace
    t_ok = tr.switch_time + 3.5 * tr.metadata.drive_period
    with pytest.raises(WindowOutOfRange):
        tc.ground_current_profile(tr, (tr.switch_time, tr.times[-1]))
    with pytest.raises(WindowOutOfRange):
        tc.ground_current_profile(tr, (t_ok, tr.times[-1] + 50.0))
    with pytest.raises(WindowOutOfRange):
        tc.ground_current_profile(tr, (t_ok, t_ok + 1e-6))


def test_ground_current_profile_zero_signal(short_trace):
    tr = short_trace
    dead = TransientTrace(
        times=tr.times, node_voltages=tr.node_voltages,
        ground_currents=np.zeros_like(tr.ground_currents),
        energy=tr.energy, switch_time=tr.switch_time,
        metadata=tr.metadata, _cap=tr._cap)
    t0 = tr.switch_time + 3.5 * tr.metadata.drive_period
    with pytest.raises(InsufficientSignal):
        tc.ground_current_profile(dead, (t0, tr.times[-1]))


def test_fit_recovers_synthetic_mode():
    t = np.linspace(0.0, 40.0, 4000)
    truth = dict(amplitude=0.73, omega_r=3.78, omega_i=0.011, phase=0.4)
    s = truth["amplitude"] * np.exp(-truth["omega_i"] * (t - 5.0)) \
        * np.cos(truth["omega_r"] * (t - 5.0) + truth["phase"])
    fit = tc.fit_damped_oscillation(t, s, 5.0)
    assert fit.omega_r == pytest.approx(truth["omega_r"], rel=1e-9)
    assert fit.omega_i == pytest.approx(truth["omega_i"], rel=1e-9)
    assert fit.amplitude == pytest.approx(truth["amplitude"], rel=1e-9)
    assert fit.phase == pytest.approx(truth["phase"], rel=1e-9)
    assert fit.rms_residual < 1e-9


def test_fit_recovers_under_noise():
    rng = np.random.default_rng(11)
    t = np.linspace(0.0, 60.0, 6000)
    s = 1.0 * np.exp(-0.02 * t) * np.cos(2.5 * t - 1.0) \
        + 1e-3 * rng.standard_normal(len(t))
    fit = tc.fit_damped_oscillation(t, s, 0.0)
    assert fit.omega_r == pytest.approx(2.5, rel=1e-4)
    assert fit.omega_i == pytest.approx(0.02, rel=2e-2)


def test_fit_error_paths():
    t = np.linspace(0.0, 10.0, 1000)
    with pytest.raises(InsufficientSignal):
        tc.fit_damped_oscillation(t, np.cos(3.0 * t), 9.99)
    with pytest.raises(InsufficientSignal):
        tc.fit_damped_oscillation(t, np.zeros_like(t), 0.0)
    with pytest.raises(FitDiverged):
        tc.fit_damped_oscillation(t, np.exp(-0.3 * t), 0.0)
