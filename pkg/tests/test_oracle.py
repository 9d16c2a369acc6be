"""Package against the brute-force oracle in ``dense_oracle``.

The oracle builds its operators independently from Kronecker products.
Comparisons use basis-independent quantities: spectra, Gibbs expectations
of site-local observables, Duhamel functions and ``m_LRO``.
"""

import json
from pathlib import Path

import numpy as np
import pytest

from dense_oracle import Oracle, duhamel as o_duhamel, expect, m_lro, trial_energy as o_trial
from rpbcs.fock import build_basis, gamma_op, local_order_op, staggered_sum
from rpbcs.hamiltonian import ModelParams, build_full
from rpbcs.lattice import build_lattice
from rpbcs.thermal import diagonalize, duhamel, lro, thermal_expectation, trial_energy

TOL = 1e-10

# Frozen from the oracle (dense eigh over the 4096-dim space; too slow to rerun).
TRIAL_D1_L3 = {0.25: 1.6362133563441996, 0.0: 1.5177903309125045}
LRO_D1_L1 = {0.5: 0.5785095429974925, 1.0: 0.6947404818673955, 2.0: 0.9161995943345215,
             4.0: 0.9981618350251747}


@pytest.fixture(scope="module")
def oracle_1_1():
    return Oracle(1, 1)


def random_points(n, seed=2024):
    rng = np.random.default_rng(seed)
    pts = []
    for _ in range(n):
        pts.append((ModelParams(float(rng.uniform(-1, 1)), float(rng.uniform(0.2, 1.5)),
                                float(rng.uniform(0, 1)), float(rng.uniform(-0.5, 0.5))),
                    float(rng.uniform(0.1, 3.0))))
    return pts


def compare_point(o, b, p, beta):
    """Largest deviation between package and oracle at one point."""
    Ho = o.hamiltonian(p.kappa, p.g, p.gprime, p.B)
    sd = diagonalize(build_full(b, p), b)
    dev = {"spectrum": float(np.max(np.abs(np.sort(sd.energies()) - np.linalg.eigvalsh(Ho))))}
    lat = b.lattice
    worst = 0.0
    for i, x in enumerate(lat.sites):
        j = o.index[tuple(x)]
        for kind in (1, 2, 3):
            a = thermal_expectation(sd, gamma_op(b, i, kind), beta)
            worst = max(worst, abs(a - expect(Ho, o.gamma(j, kind), beta)))
    dev["gibbs"] = worst
    A_pkg = staggered_sum(b, 1)
    A_o = sum(o.sign(x) * o.gamma(i, 1) for i, x in enumerate(o.sites))
    dev["duhamel"] = abs(duhamel(sd, A_pkg, A_pkg, beta) - o_duhamel(Ho, A_o, A_o, beta))
    dev["m_lro"] = abs(lro(sd, beta) - m_lro(o, Ho, beta))
    return dev


def test_random_points_d1_l1(oracle_1_1, basis_1_1):
    for p, beta in random_points(5):
        dev = compare_point(oracle_1_1, basis_1_1, p, beta)
        assert max(dev.values()) < TOL, (p, beta, dev)


def test_order_parameter_matches(oracle_1_1, basis_1_1):
    b = basis_1_1
    sd = diagonalize(build_full(b, ModelParams(0.3, 1.0, 0.0, 0.2)), b)
    Ho = oracle_1_1.hamiltonian(0.3, 1.0, 0.0, 0.2)
    a = thermal_expectation(sd, staggered_sum(b, 2), 1.0)
    assert abs(a - expect(Ho, oracle_1_1.order_param(), 1.0)) < TOL


def test_spectrum_file(oracle_1_1):
    with open(Path(__file__).parent / "data" / "oracle_spectrum_d1_L1.json") as fh:
        ref = json.load(fh)
    Ho = oracle_1_1.hamiltonian(ref["kappa"], ref["g"], ref["gprime"], ref["B"])
    assert np.max(np.abs(np.linalg.eigvalsh(Ho) - ref["eigenvalues"])) < 1e-12


def test_ground_state_unique_pair_dimer(basis_1_1):
    sd = diagonalize(build_full(basis_1_1, ModelParams(0.0, 1.0)), basis_1_1)
    assert sd.q == 1
    assert abs(sd.E0 + 2.0) < 1e-12


def test_lro_frozen(basis_1_1):
    sd = diagonalize(build_full(basis_1_1, ModelParams(0.0, 1.0)), basis_1_1)
    vals = [lro(sd, beta) for beta in sorted(LRO_D1_L1)]
    for beta, v in zip(sorted(LRO_D1_L1), vals):
        assert abs(v - LRO_D1_L1[beta]) < TOL
    assert all(np.diff(vals) >= 0)


def test_lro_beta_zero(basis_1_1):
    sd = diagonalize(build_full(basis_1_1, ModelParams(0.4, 1.0, 0.3, 0.1)), basis_1_1)
    # infinite temperature: <Gamma1_x Gamma1_y> = delta_xy / 2
    assert abs(lro(sd, 0.0) ** 2 - 0.5 / basis_1_1.lattice.n_sites) < 1e-14


def test_hop_spectrum(basis_1_1):
    sd = diagonalize(build_full(basis_1_1, ModelParams(1.0, 0.0)), basis_1_1)
    expected = sorted([-4, 4] + [-2] * 4 + [2] * 4 + [0] * 6)
    assert np.max(np.abs(np.sort(sd.energies()) - expected)) < 1e-12


def test_d1_l2_point(basis_1_2):
    o = Oracle(1, 2)
    p = ModelParams(0.05, 1.0, 0.2, 0.1)
    dev = compare_point(o, basis_1_2, p, 1.5)
    assert max(dev.values()) < TOL, dev
    sd = diagonalize(build_full(basis_1_2, p), basis_1_2)
    Ho = o.hamiltonian(p.kappa, p.g, p.gprime, p.B)
    for eps in (0.0, 0.25):
        assert abs(trial_energy(sd, local_order_op(basis_1_2, 1), eps) - o_trial(o, Ho, 1, eps)) < TOL


def test_trial_energy_frozen_d1_l3(lab_1_3):
    p = ModelParams(0.05, 1.0, 0.2, 0.1)
    sd = lab_1_3.spectrum(p, "antiperiodic")
    A = local_order_op(sd.basis, 1)
    for eps, ref in TRIAL_D1_L3.items():
        assert abs(trial_energy(sd, A, eps) - ref) < TOL
