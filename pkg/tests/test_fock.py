import numpy as np
import pytest

from rpbcs.fock import (DOWN, UP, CapError, anticommutator, build_basis, commutator, creation_op, annihilation_op,
                        dump_operator, gamma_op, load_operator, local_order_op, majorana_op, momentum_gamma,
                        number_op, staggered_sum)
from rpbcs.lattice import ConfigError, GeometryError, build_lattice


@pytest.mark.parametrize("d,L,dim", [(1, 1, 16), (2, 1, 256), (1, 2, 256)])
def test_dimension(d, L, dim):
    assert build_basis(build_lattice(d, L)).dim == dim


def test_vacuum_sector(basis_1_2):
    sec = basis_1_2.sectors()
    assert 0 in sec[(0, 0)]
    assert sum(len(v) for v in sec.values()) == 256


def test_cap_error_names_cap():
    with pytest.raises(CapError, match="65536"):
        build_basis(build_lattice(2, 2))
    with pytest.raises(CapError, match="cap 8"):
        build_basis(build_lattice(1, 1), cap=8)


def test_mode_order_validation():
    lat = build_lattice(1, 1)
    with pytest.raises(ConfigError):
        build_basis(lat, mode_order=[(0, UP), (0, UP), (1, UP), (1, DOWN)])


def test_car_and_nilpotency(basis_1_1):
    b = basis_1_1
    eye = b.identity()
    for x, s in b.mode_order:
        cd = creation_op(b, x, s)
        assert (cd @ cd).nnz == 0
        for y, t in b.mode_order:
            ac = anticommutator(annihilation_op(b, x, s), creation_op(b, y, t))
            assert ac.distance(eye if (x, s) == (y, t) else b.zero()) == 0.0


def test_vacuum_phase(basis_1_1):
    b = basis_1_1
    v = creation_op(b, 0, UP).mat @ b.vacuum()
    assert v[1 << b.mode(0, UP)] == 1.0
    assert np.count_nonzero(v) == 1


def test_gamma_algebra(basis_1_1):
    b = basis_1_1
    g1, g2, g3 = (gamma_op(b, 0, k) for k in (1, 2, 3))
    assert commutator(g1, g2).distance(2j * g3) == 0.0
    nu, nd = number_op(b, 0, UP), number_op(b, 0, DOWN)
    assert (g1 @ g1).distance(2 * (nu @ nd) - nu - nd + b.identity()) == 0.0
    for k in (1, 2, 3):
        assert gamma_op(b, 0, k).hermiticity_error() == 0.0
    with pytest.raises(ConfigError):
        gamma_op(b, 0, 4)


def test_gamma1_eigenstates(basis_1_1):
    b = basis_1_1
    vac = b.vacuum()
    pair = gamma_op(b, 0, "+").mat @ vac
    g1 = gamma_op(b, 0, 1).mat
    assert np.allclose(g1 @ (vac + pair), vac + pair, atol=0)
    assert np.allclose(g1 @ (vac - pair), -(vac - pair), atol=0)


def test_majorana(basis_1_1):
    b = basis_1_1
    xi, eta = majorana_op(b, 1, DOWN, "xi"), majorana_op(b, 1, DOWN, "eta")
    assert anticommutator(xi, xi).distance(2 * b.identity()) == 0.0
    assert anticommutator(xi, eta).nnz == 0
    assert annihilation_op(b, 1, DOWN).distance(0.5 * (xi + 1j * eta)) == 0.0
    with pytest.raises(ConfigError):
        majorana_op(b, 0, UP, "zeta")


def test_momentum_gamma_at_zero(basis_1_1):
    b = basis_1_1
    g0 = momentum_gamma(b, (0.0,))
    expect = (gamma_op(b, 0, 1) + gamma_op(b, 1, 1)) / np.sqrt(2)
    assert g0.distance(expect) < 1e-15
    gp = momentum_gamma(b, (np.pi,))
    assert gp.H.distance(momentum_gamma(b, (-np.pi,))) < 1e-15


def test_momentum_completeness(basis_1_1):
    b = basis_1_1
    total = b.zero()
    for p in ((0.0,), (np.pi,)):
        total = total + momentum_gamma(b, p) @ momentum_gamma(b, tuple(-np.asarray(p)))
    local = gamma_op(b, 0, 1) @ gamma_op(b, 0, 1) + gamma_op(b, 1, 1) @ gamma_op(b, 1, 1)
    assert total.distance(local) < 1e-14


def test_momentum_off_grid(basis_1_1):
    with pytest.raises(ConfigError):
        momentum_gamma(basis_1_1, (0.5,))


def test_local_order_op():
    b = build_basis(build_lattice(1, 3))
    A = local_order_op(b, 1)
    lat = b.lattice
    box = [lat.index((x,)) for x in (-1, 0, 1)]
    expect = sum((lat.sign(i) * gamma_op(b, i, 1) for i in box[1:]), lat.sign(box[0]) * gamma_op(b, box[0], 1)) / 3
    assert A.distance(expect) < 1e-15
    assert A.hermiticity_error() == 0.0
    with pytest.raises(GeometryError):
        local_order_op(build_basis(build_lattice(1, 1)), 1)


def test_staggered_sum(basis_1_1):
    b = basis_1_1
    assert staggered_sum(b, 2).distance(gamma_op(b, 0, 2) - gamma_op(b, 1, 2)) == 0.0


def test_operator_roundtrip(tmp_path, basis_1_1):
    op = gamma_op(basis_1_1, 0, 2) + 0.1234567890123456789 * number_op(basis_1_1, 1, UP)
    path = tmp_path / "op.txt"
    dump_operator(op, path)
    assert load_operator(path).distance(op) == 0.0


def test_operator_arithmetic_flags(basis_1_1):
    b = basis_1_1
    a = creation_op(b, 0, UP)
    assert a.parity == "odd"
    assert (a @ a.H).parity == "even"
    assert (a + gamma_op(b, 0, 1)).parity == "mixed"
    assert not (1j * gamma_op(b, 0, 1)).hermitian
    with pytest.raises(ValueError):
        a.as_hermitian()
    with pytest.raises(ValueError):
        a @ build_basis(build_lattice(1, 2)).identity()
