import math
import os
import subprocess

import pytest

phi4ion = pytest.importorskip("_phi4ion")


def test_special_functions():
    assert phi4ion.elliptic_k(0.0) == pytest.approx(math.pi / 2, rel=1e-14)
    assert phi4ion.polygamma1(1.0) == pytest.approx(math.pi**2 / 6, rel=1e-13)
    assert phi4ion.truncated_zeta(3.0, 100000) == pytest.approx(1.2020569, rel=1e-6)
    assert phi4ion.truncated_eta(1.0, 15) == pytest.approx(
        sum((-1) ** (r + 1) / r for r in range(1, 16)), rel=1e-14
    )


def test_continuum_critical_ratio():
    assert phi4ion.critical_ratio_continuum() == pytest.approx(20.1055, abs=1e-3)


def test_gap_equation_free_theory():
    sol = phi4ion.solve_gap(0.7, 0.0, 0.5, n_sites=30)
    assert sol.mu_sq == 0.7
    assert sol.iterations == 1
    pm = phi4ion.physical_mass(sol.mu_sq, 0.0, 0.5, n_sites=30)
    assert pm.mp_sq == 0.7
    assert pm.z == 1.0


def test_gap_equation_interacting():
    sol = phi4ion.solve_gap(-0.4, 2.0, 0.7, n_sites=30)
    assert sol.mu_sq > 0
    shift = phi4ion.tadpole_shift(sol.mu_sq, 0.7, 2.0, n_sites=30)
    assert sol.mu_sq == pytest.approx(-0.4 + shift, abs=1e-9)


def test_critical_line_ordering():
    cold = phi4ion.trace_critical_line(0.5, 0.1, 5.0, 8, n_sites=30)
    hot = phi4ion.trace_critical_line(1.0, 0.1, 5.0, 8, n_sites=30)
    for (_, lam_c, _), (_, lam_h, _) in zip(cold, hot):
        assert lam_h < lam_c


def test_ion_equilibrium():
    eq = phi4ion.solve_equilibrium("40Ca+", 2, 127e3, 2.93e6, 2.89e6)
    assert eq.positions[1] == pytest.approx(0.25 ** (1 / 3), abs=1e-10)
    assert eq.residual_norm <= 1e-12


def test_zigzag_mode_and_couplings():
    freqs = phi4ion.transverse_mode_freqs_hz("40Ca+", 30, 127e3, 2.93e6, 2.89e6)
    assert freqs[-1] == pytest.approx(2.456e6, rel=1e-3)
    j = phi4ion.exact_spin_couplings_hz(
        "40Ca+", 30, 127e3, 2.93e6, 2.89e6, rabi_hz=1e6, detuning_hz=2.21e6
    )
    assert j[14, 15] == pytest.approx(1400.0, rel=0.15)
    assert j[14, 15] == pytest.approx(j[15, 14], rel=1e-15)


def test_run_preset_roundtrip():
    tables = phi4ion.run_preset("fig5", overrides=["mu2_points=4", "mu2_max_lattice=1"])
    assert len(tables) == 2
    main = dict(tables)[""]
    header = [l for l in main.splitlines() if not l.startswith("#")][0]
    assert header == "t_lattice,mu2_lattice,lambda0_lattice,m0_2_lattice"


def test_cli_binary_runs():
    cli = os.environ.get("PHI4ION_CLI")
    if not cli:
        pytest.skip("PHI4ION_CLI not set")
    out = subprocess.run(
        [cli, "critical-ratio", "--preset", "fig4", "--set", "n_sites=200",
         "--set", "n1_sweep=200", "--set", "mu2_min_lattice=1e-3",
         "--set", "mu2_max_lattice=1e-2"],
        capture_output=True, text=True, timeout=300,
    )
    assert out.returncode == 0
    assert "continuum_polygamma" in out.stdout
