import numpy as np
import pytest

from rpbcs.fock import DOWN, UP, annihilation_op, build_basis, creation_op, gamma_op, majorana_op
from rpbcs.hamiltonian import ModelParams, build_full
from rpbcs.lattice import ConfigError, build_lattice
from rpbcs.transforms import (ModeMap, axis_swap, boundary_shift, build_unitary, conjugate, odd_swap, reflection, rotation,
                              spin_reflection, translation)


def test_rotation_zero_is_identity(basis_1_1):
    assert rotation(basis_1_1, 0.0).distance(basis_1_1.identity()) == 0.0


def test_conjugate_by_identity(basis_1_2):
    H = build_full(basis_1_2, ModelParams(0.1, 1.0, 0.2, 0.05))
    eye = build_unitary(basis_1_2, "U_rot", 0.0)
    assert conjugate(H, eye).distance(H) == 0.0


def test_quarter_rotation(basis_1_1):
    b = basis_1_1
    U = rotation(b, np.pi / 2)
    for x in range(2):
        assert conjugate(gamma_op(b, x, 1), U).distance(gamma_op(b, x, 2)) < 1e-15
        assert conjugate(gamma_op(b, x, 2), U).distance(-gamma_op(b, x, 1)) < 1e-15


def test_mode_swap(basis_1_1):
    b = basis_1_1
    u = build_unitary(b, "u", 1, DOWN)
    assert u.unitarity_error() == 0.0
    assert conjugate(annihilation_op(b, 1, DOWN), u).distance(creation_op(b, 1, DOWN)) == 0.0
    for x, s in b.mode_order:
        if (x, s) != (1, DOWN):
            assert conjugate(annihilation_op(b, x, s), u).distance(annihilation_op(b, x, s)) == 0.0


def test_odd_swap_majorana(basis_1_2):
    b = basis_1_2
    U = odd_swap(b)
    lat = b.lattice
    for i in range(lat.n_sites):
        for s in (UP, DOWN):
            xi, eta = majorana_op(b, i, s, "xi"), majorana_op(b, i, s, "eta")
            assert conjugate(xi, U).distance(xi) == 0.0
            assert conjugate(eta, U).distance(lat.sign(i) * eta) == 0.0


def test_reflection(basis_1_2):
    b = basis_1_2
    lat = b.lattice
    th = reflection(b)
    x0, x1 = lat.index((0,)), lat.index((1,))
    assert th.apply(majorana_op(b, x0, UP, "xi")).distance(majorana_op(b, x1, UP, "xi")) == 0.0
    assert th.apply(majorana_op(b, x0, UP, "eta")).distance(-majorana_op(b, x1, UP, "eta")) == 0.0
    assert th.apply(gamma_op(b, x0, 2)).distance(-gamma_op(b, x1, 2)) == 0.0
    A = 0.3j * creation_op(b, 2, DOWN) @ annihilation_op(b, 0, UP) + gamma_op(b, 3, 1)
    assert th.apply(th.apply(A)).distance(A) == 0.0


def test_spin_reflection_swaps_spins(basis_1_1):
    b = basis_1_1
    ts = spin_reflection(b)
    assert ts.apply(creation_op(b, 0, UP)).distance(creation_op(b, 0, DOWN)) == 0.0
    assert ts.apply(1j * creation_op(b, 0, UP)).distance(-1j * creation_op(b, 0, DOWN)) == 0.0


def test_translation_and_axis_swap(basis_2_1):
    b = basis_2_1
    lat = b.lattice
    T = translation(b, 1, 1)
    src, dst = lat.index((0, 1)), lat.index((1, 1))
    assert T.apply(creation_op(b, src, UP)).distance(creation_op(b, dst, UP)) == 0.0
    P = axis_swap(b, 1, 2)
    assert P.apply(annihilation_op(b, lat.index((0, 1)), DOWN)).distance(
        annihilation_op(b, lat.index((1, 0)), DOWN)) == 0.0
    H = build_full(b, ModelParams(0.0, 1.0, 0.2, 0.0))
    assert P.apply(H).distance(H) < 1e-14


def test_translation_by_two_moves_the_cut():
    b = build_basis(build_lattice(1, 2))
    H = build_full(b, ModelParams(0.2, 1.0, 0.2, 0.05))
    moved = translation(b, 1, 2).apply(H)
    assert moved.distance(H) > 0.1
    assert moved.distance(conjugate(H, boundary_shift(b, 1, 1))) < 1e-14


def test_errors(basis_1_1, basis_1_2):
    with pytest.raises(ConfigError):
        build_unitary(basis_1_1, "U_nope")
    with pytest.raises(ValueError):
        conjugate(basis_1_2.identity(), rotation(basis_1_1, 0.1))
    with pytest.raises(ConfigError):
        build_unitary(basis_1_1, "U_BC", 2, 0)
    with pytest.raises(ConfigError):
        ModeMap(basis_1_1, [0, 0])


@pytest.mark.parametrize("label,args", [("U_BC", (1, 1)), ("U_1tilde", ()), ("U_odd", ()), ("U_odd_half", ()),
                                        ("U_PH", ()), ("U_rot", (0.7,)), ("u", (0, UP)), ("U_1", ())])
def test_all_unitary(basis_1_2, label, args):
    assert build_unitary(basis_1_2, label, *args).unitarity_error() < 1e-14
