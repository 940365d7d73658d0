"""Device model: states, frame Hamiltonians, drive terms, noise channels."""

import math

import numpy as np
import pytest

from aqecsim import model, solver
from aqecsim.operators import (
    FULL_DIMS,
    LabeledOperator,
    basis_index,
    basis_state,
    expectation,
    ket_projector,
)

TWOPI = 2.0 * math.pi


# ---------------------------------------------------------------------------
# states

def test_logical_state_amplitudes():
    s = 1.0 / math.sqrt(2.0)
    l0 = model.logical_state("L0").amplitudes
    assert l0[basis_index(FULL_DIMS, "gf00")] == pytest.approx(s)
    assert l0[basis_index(FULL_DIMS, "fg00")] == pytest.approx(-s)
    assert np.count_nonzero(l0) == 2
    l1 = model.logical_state("L1").amplitudes
    assert l1[basis_index(FULL_DIMS, "gg00")] == pytest.approx(s)
    assert l1[basis_index(FULL_DIMS, "ff00")] == pytest.approx(-s)


def test_superposition_state_is_balanced_combination():
    l0 = model.logical_state("L0").amplitudes
    l1 = model.logical_state("L1").amplitudes
    lx = model.logical_state("Lx").amplitudes
    assert np.allclose(lx, (l0 - l1) / math.sqrt(2.0))


def test_error_states_and_projectors():
    for label, basis in model.ERROR_STATES.items():
        state = model.logical_state(label)
        assert state.amplitudes[basis_index(FULL_DIMS, basis + "00")] == 1.0
    rho = model.logical_state("E01").to_density()
    assert expectation(rho, model.error_projector("L0")).real == pytest.approx(1.0)
    assert expectation(rho, model.error_projector("L1")).real == pytest.approx(0.0)
    assert expectation(rho, model.error_projector("Lx")).real == pytest.approx(1.0)
    with pytest.raises(ValueError):
        model.logical_state("L7")
    with pytest.raises(ValueError):
        model.error_projector("E01")


def test_logical_states_hold_two_excitations(device):
    n_tot = model.transmon_number(1) + model.transmon_number(2)
    for label in ("L0", "L1", "Lx"):
        rho = model.logical_state(label).to_density()
        assert expectation(rho, n_tot).real == pytest.approx(2.0)


# ---------------------------------------------------------------------------
# parameter validation

def test_device_params_validation():
    with pytest.raises(ValueError):
        model.DeviceParams(omega_q1=3000, omega_q2=3600, alpha_1=100.0,
                           alpha_2=-150.0, omega_r1=5000, omega_r2=5400)
    with pytest.raises(ValueError):
        model.DeviceParams(omega_q1=3000, omega_q2=3600, alpha_1=-100.0,
                           alpha_2=-150.0, omega_r1=2000, omega_r2=5400)


def test_drive_config_validation():
    with pytest.raises(ValueError):
        model.DriveConfig(w_r=-1.0)
    with pytest.raises(ValueError):
        model.DriveConfig(phases=(0.0, 0.0))


def test_noise_model_validation():
    with pytest.raises(ValueError):
        model.NoiseModel(t1_ge=(0.0, 10.0))
    with pytest.raises(ValueError):
        model.NoiseModel(kappa=(-0.1, 0.0))
    with pytest.raises(ValueError):
        model.NoiseModel(n_res=1.0)
    with pytest.raises(ValueError):
        model.NoiseModel(t_phi_ff=0.0)


# ---------------------------------------------------------------------------
# Hamiltonians

def test_static_hamiltonian_hermitian_at_random_times(device_with_shifts, full_drive):
    h = model.build_full_hamiltonian(device_with_shifts, full_drive)
    assert h.time_dependent
    rng = np.random.default_rng(11)
    for t in rng.uniform(0.0, 30.0, size=100):
        m = h.at(float(t))
        assert np.max(np.abs(m - m.conj().T)) <= 1e-10


def test_rotating_frame_diagonal_energies(device):
    drive = model.DriveConfig(w_r=1.0, w_b=1.0, nu_r=0.8, nu_b=-0.9)
    h = model.build_rotating_hamiltonian(device, drive).constant.data
    def diag(label):
        i = basis_index(FULL_DIMS, label)
        return h[i, i].real / TWOPI
    # logical levels sit at the negated pair detunings
    assert diag("gf00") == pytest.approx(-0.8)
    assert diag("fg00") == pytest.approx(-0.8)
    assert diag("gg00") == pytest.approx(0.9)
    assert diag("ff00") == pytest.approx(0.9)
    # single-excitation error levels add -alpha/2
    assert diag("eg00") == pytest.approx(-0.8 + 116.4 / 2.0)
    assert diag("ge00") == pytest.approx(-0.8 + 159.6 / 2.0)
    # one resonator photon costs -alpha/2
    assert diag("gg10") - diag("gg00") == pytest.approx(116.4 / 2.0)


def test_rotating_frame_drive_matrix_elements(device):
    drive = model.DriveConfig(w_r=1.45, w_b=1.25, nu_r=0.8, nu_b=-0.9,
                              omega_qr1=0.39, omega_qr2=0.39)
    h = model.build_rotating_hamiltonian(device, drive).constant.data
    def elem(to, frm):
        return h[basis_index(FULL_DIMS, to), basis_index(FULL_DIMS, frm)] / TWOPI
    # all four pair drives couple through the doubly excited state at W/2
    assert elem("ee00", "gf00") == pytest.approx(1.45 / 2.0)
    assert elem("ee00", "fg00") == pytest.approx(1.45 / 2.0)
    assert elem("ee00", "gg00") == pytest.approx(1.25 / 2.0)
    assert elem("ee00", "ff00") == pytest.approx(1.25 / 2.0)
    # correcting sidebands |e0> -> |f1> at Omega/2, for both logical branches
    assert elem("fg10", "eg00") == pytest.approx(0.39 / 2.0)
    assert elem("ff10", "ef00") == pytest.approx(0.39 / 2.0)
    assert elem("gf01", "ge00") == pytest.approx(0.39 / 2.0)
    assert elem("ff01", "fe00") == pytest.approx(0.39 / 2.0)


def test_drive_phases_enter_coupling_elements(device):
    drive = model.DriveConfig(w_r=1.0, phases=(math.pi / 2.0, 0.0, 0.0, 0.0))
    h = model.build_rotating_hamiltonian(device, drive).constant.data
    val = h[basis_index(FULL_DIMS, "ee00"), basis_index(FULL_DIMS, "gf00")] / TWOPI
    assert val == pytest.approx(0.5j)


def test_dispersive_terms_elements(device_with_shifts):
    d = model.dispersive_terms(device_with_shifts).data
    def diag(label):
        i = basis_index(FULL_DIMS, label)
        return d[i, i].real / TWOPI
    assert diag("ef00") == pytest.approx(-0.6)
    assert diag("fe00") == pytest.approx(-2.2)
    assert diag("ff00") == pytest.approx(0.0)
    # chi n_q n_r: one transmon photon and one resonator photon
    assert diag("eg10") == pytest.approx(-0.2)
    assert diag("fg10") == pytest.approx(-0.4)


def test_correction_transition_mismatch_identity(device_with_shifts, full_drive):
    """|ef> <-> |ff> must sit zz_ff1 away from |eg> <-> |fg|, and the mirrored
    pair zz_ff2 away, in the full time-independent frame."""
    h = model.build_rotating_full_hamiltonian(device_with_shifts, full_drive)
    m = h.constant.data
    def diag(label):
        i = basis_index(FULL_DIMS, label)
        return m[i, i].real / TWOPI
    mismatch1 = (diag("ff00") - diag("ef00")) - (diag("fg00") - diag("eg00"))
    mismatch2 = (diag("ff00") - diag("fe00")) - (diag("gf00") - diag("ge00"))
    assert mismatch1 == pytest.approx(device_with_shifts.zz_ff1)
    assert mismatch2 == pytest.approx(device_with_shifts.zz_ff2)


def test_logical_manifold_is_dark(device):
    """The antisymmetric logical state has no matrix element to |ee> under the
    combined pair drives and is stationary without the correcting sidebands."""
    drive = model.DriveConfig(w_r=1.45, w_b=1.25, nu_r=0.8, nu_b=-0.9)
    h = model.build_rotating_hamiltonian(device, drive)
    psi = model.logical_state("L0")
    coupling = h.constant.data @ psi.amplitudes
    assert abs(coupling[basis_index(FULL_DIMS, "ee00")]) < 1e-12
    proj = LabeledOperator(FULL_DIMS, psi.to_density().data)
    traj = solver.evolve(h, [], psi.to_density(), np.linspace(0.0, 10.0, 21))
    fidelity = min(expectation(traj.state(i), proj).real for i in range(len(traj)))
    assert 1.0 - fidelity < 1e-6


def test_rotating_and_static_frames_agree(device_with_shifts, full_drive):
    """The two frames differ by a diagonal phase rotation, so every density
    matrix element magnitude must agree along the trajectory."""
    h_rot = model.build_rotating_full_hamiltonian(device_with_shifts, full_drive)
    h_stat = model.build_full_hamiltonian(device_with_shifts, full_drive)
    assert not h_rot.time_dependent and h_stat.time_dependent
    times = np.linspace(0.0, 5.0, 11)
    rho0 = model.logical_state("L0").to_density()
    tr = solver.evolve(h_rot, [], rho0, times)
    ts = solver.evolve(h_stat, [], rho0, times)
    worst = max(np.max(np.abs(np.abs(tr.states[i]) - np.abs(ts.states[i])))
                for i in range(len(times)))
    assert worst <= 1e-6


def test_lab_frame_resonant_sideband_rabi(device):
    """A lab-frame correcting sideband drives |eg00> <-> |fg10> at its rate.

    The carrier frequencies are scaled down to keep the integration tractable;
    the tone stays resonant because the anharmonicity enters both the tone
    frequency and the level energies identically.
    """
    drive = model.DriveConfig(omega_qr1=1.0)
    h = model.build_lab_hamiltonian(device, drive, scale=0.02)
    times = np.linspace(0.0, 4.0, 321)
    rho0 = basis_state(FULL_DIMS, "eg00").to_density()
    traj = solver.evolve(h, [], rho0, times, max_step=1e-3)
    p = solver.observable_series(traj, [ket_projector(FULL_DIMS, "fg10")])[:, 0]
    assert p.max() > 0.9
    fringe = solver.fringe_frequency(times, p)
    assert fringe == pytest.approx(1.0, rel=0.1)


def test_lab_frame_scale_validation(device, full_drive):
    with pytest.raises(ValueError):
        model.build_lab_hamiltonian(device, full_drive, scale=0.0)
    with pytest.raises(ValueError):
        model.build_lab_hamiltonian(device, full_drive, scale=1.5)


def test_flux_waveform_initial_amplitude(device):
    drive = model.DriveConfig(w_r=1.45, w_b=1.25, nu_r=0.8, nu_b=-0.9)
    expected = 2.0 * 1.45 / math.sqrt(2.0) + 1.25 + 1.25 / 2.0
    assert model.qq_drive_amplitude(device, drive, 0.0) == pytest.approx(expected)


# ---------------------------------------------------------------------------
# noise channels

def test_collapse_operator_counts():
    aqec = model.NoiseModel(t1_ge=(21, 9), t1_ef=(23, 23), t_phi=(23, 23),
                            t1_up=(600, 600), t_phi_ff=80.0,
                            kappa=(0.53, 0.48), n_res=0.03)
    free = model.NoiseModel(t1_ge=(18, 8), t1_ef=(33, 33), t_phi=(15, 15),
                            t_phi_ff=4.4, kappa=(0.53, 0.48))
    assert len(model.collapse_operators(aqec)) == 17
    assert len(model.collapse_operators(free)) == 11
    assert model.collapse_operators(model.NoiseModel()) == []


def test_collapse_operator_rates():
    noise = model.NoiseModel(t1_ge=(21.0, math.inf))
    (op,) = model.collapse_operators(noise)
    # sqrt(1/T1) |g><e| on transmon 1
    i_g = basis_index(FULL_DIMS, "gg00")
    i_e = basis_index(FULL_DIMS, "eg00")
    assert op.data[i_g, i_e] == pytest.approx(math.sqrt(1.0 / 21.0))
    kap = model.NoiseModel(kappa=(0.5, 0.0), n_res=0.1)
    a_down, a_up = model.collapse_operators(kap)
    i0 = basis_index(FULL_DIMS, "gg00")
    i1 = basis_index(FULL_DIMS, "gg10")
    assert a_down.data[i0, i1] == pytest.approx(math.sqrt(TWOPI * 0.5))
    assert a_up.data[i1, i0] == pytest.approx(math.sqrt(TWOPI * 0.5 * 0.1))
