import numpy as np
import pytest

from rpbcs.fock import UP, build_basis, commutator, gamma_op, number_op, sz_op
from rpbcs.hamiltonian import (FieldConfig, ModelParams, build_full, build_hop, build_int, build_int_fields,
                               build_int_gamma12, build_order_param, build_repul_fields, coulomb_sum,
                               gamma3_weighted, pairing_sum, ramp, random_fields)
from rpbcs.lattice import ConfigError, GeometryError, build_lattice
from rpbcs.thermal import block_spectrum
from rpbcs.transforms import conjugate, particle_hole
from rpbcs.verify import variational_state

# many-body spectra from the dense oracle (tests/dense_oracle.py) on d=1, L=1
HOP_K1_SPECTRUM = [-4.0] + [-2.0] * 4 + [0.0] * 6 + [2.0] * 4 + [4.0]
ORDER_SPECTRUM = [-2.0] + [-1.0] * 4 + [0.0] * 6 + [1.0] * 4 + [2.0]


def test_zero_couplings(basis_1_2):
    b = basis_1_2
    assert build_hop(b, 0.0).nnz == 0
    assert build_int(b, 0.0, 0.0).nnz == 0
    assert build_full(b, ModelParams(0.0, 0.0, 0.0, 0.0)).nnz == 0


def test_hop_single_particle(basis_1_1):
    b = basis_1_1
    H = build_hop(b, 1.0)
    one_up = [s for s in range(b.dim) if s in (1 << b.mode(0, UP), 1 << b.mode(1, UP))]
    block = H.mat[one_up][:, one_up].toarray()
    assert np.allclose(np.linalg.eigvalsh(block), [-2.0, 2.0], atol=1e-14)
    assert np.allclose(block_spectrum(H, b), HOP_K1_SPECTRUM, atol=1e-13)


def test_hop_direction_and_spin_split(basis_2_1):
    b = basis_2_1
    H = build_hop(b, 0.3)
    parts = build_hop(b, 0.3, direction=1) + build_hop(b, 0.3, direction=2)
    assert H.distance(parts) < 1e-15
    spins = build_hop(b, 0.3, spins=(0,)) + build_hop(b, 0.3, spins=(1,))
    assert H.distance(spins) < 1e-15


def test_int_gamma12_form(basis_1_2):
    b = basis_1_2
    assert build_int(b, 1.3).distance(build_int_gamma12(b, 1.3)) <= 1e-13


def test_variational_int_energy():
    b = build_basis(build_lattice(1, 2))
    v = variational_state(b)
    H = build_int(b, 1.0)
    assert abs(np.vdot(v, H.mat @ v) - (-0.5 * 4)) < 1e-12


def test_order_param(basis_1_1):
    b = basis_1_1
    O = build_order_param(b)
    assert O.hermiticity_error() == 0.0
    assert np.allclose(np.linalg.eigvalsh(O.toarray()), ORDER_SPECTRUM, atol=1e-13)
    U = particle_hole(b)
    assert conjugate(O, U).distance(O) == 0.0


def test_full_conserves_sz(basis_1_1):
    b = basis_1_1
    H = build_full(b, ModelParams(0.2, 1.0, 0.3, 0.4))
    assert commutator(H, sz_op(b)).nnz == 0


def test_int_fields_zero_and_expansion(basis_1_2, rng):
    b = basis_1_2
    lat = b.lattice
    zero = np.zeros((lat.n_sites, lat.d))
    assert build_int_fields(b, 1.0, zero).distance(build_int(b, 1.0)) <= 1e-13
    c = 0.7
    h = np.full((lat.n_sites, lat.d), c)
    diff = build_int_fields(b, 1.0, h) - build_int_fields(b, 1.0, None)
    expect = b.zero()
    for i, x in enumerate(lat.sites):
        j = lat.index(lat.shift(x, 0))
        expect = expect + (0.5 * lat.sign(i) * c) * (gamma_op(b, i, 1) + gamma_op(b, j, 1))
    expect = expect + (0.25 * c * c * lat.n_sites) * b.identity()
    assert diff.distance(expect) < 1e-14


def test_repul_fields(basis_1_2, rng):
    b = basis_1_2
    lat = b.lattice
    assert build_repul_fields(b, 0.4, None).distance(0.4 * coulomb_sum(b)) < 1e-14
    hp = random_fields(lat, rng)
    H = build_repul_fields(b, 0.4, hp)
    total3 = sum((gamma_op(b, i, 3) for i in range(1, lat.n_sites)), gamma_op(b, 0, 3))
    assert commutator(H, total3).nnz == 0


def test_ramp_profile():
    lat = build_lattice(1, 3)
    fc = ramp(lat, 1)
    hp = {lat.sites[i]: fc.hprime[i, 0] for i in range(lat.n_sites)}
    assert hp[(2,)] == 1.0 and hp[(-2,)] == 1.0
    assert hp[(3,)] == 0.0
    lat5 = build_lattice(1, 5)
    fc5 = ramp(lat5, 2)
    hp5 = {lat5.sites[i]: fc5.hprime[i, 0] for i in range(lat5.n_sites)}
    assert hp5[(3,)] == 1.0 and hp5[(4,)] == 0.5 and hp5[(5,)] == 0.0
    assert fc.htilde[lat.index((0,))] == 2.0
    with pytest.raises(GeometryError):
        ramp(build_lattice(1, 2), 1)


def test_gamma3_weighted(basis_1_1):
    b = basis_1_1
    C = gamma3_weighted(b, [2.0, -1.0])
    assert C.distance(2 * gamma_op(b, 0, 3) - gamma_op(b, 1, 3)) == 0.0


def test_params_validation():
    with pytest.raises(ConfigError):
        ModelParams(kappa=float("nan"))
    with pytest.raises(ConfigError):
        ModelParams(gprime=-1.0)
    with pytest.raises(ConfigError):
        FieldConfig._check(build_lattice(1, 1), np.zeros(3), "h")


def test_pairing_sum_multiplicity(basis_1_1):
    """At L = 1 both directed edges join the same pair; each contributes once."""
    b = basis_1_1
    one = (gamma_op(b, 0, "+") @ gamma_op(b, 1, "-")) + (gamma_op(b, 0, "-") @ gamma_op(b, 1, "+"))
    assert pairing_sum(b).distance(2 * one) < 1e-15


def test_full_periodic_differs(basis_1_2):
    p = ModelParams(0.2, 1.0)
    a = build_full(basis_1_2, p)
    c = build_full(basis_1_2, p, boundary="periodic")
    assert a.distance(c) > 0.1
    assert number_op(basis_1_2, 0, UP).hermitian
