"""Unitary and anti-unitary maps on the Fock space.

Phase unitaries ``prod_x exp(i theta_x n_x)`` are diagonal in the occupation
basis.  The single-mode particle-hole swap ``u_{x,s}`` is ``a^dag + a`` with a
parity string on all other modes.  Lattice maps (reflection, translation,
axis permutation, spin swap) act as signed permutations of basis states; the
reflections are anti-linear and additionally conjugate matrix entries.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .fock import UP, DOWN, OperatorMatrix, majorana_op
from .lattice import ConfigError


class UnitaryMatrix(OperatorMatrix):
    __slots__ = ("label",)

    def __init__(self, mat, label):
        super().__init__(mat, False, "mixed")
        self.label = label

    def __repr__(self):
        return f"UnitaryMatrix({self.label!r}, dim={self.dim})"

    def unitarity_error(self):
        eye = sp.identity(self.dim, dtype=complex, format="csr")
        diff = (self.mat.conj().T @ self.mat - eye).tocoo()
        return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0


def _site_numbers(b):
    """``(dim, n_sites)`` array of ``n_up + n_down`` per site."""
    lat = b.lattice
    out = np.zeros((b.dim, lat.n_sites), dtype=np.int64)
    for i in range(lat.n_sites):
        out[:, i] = b.occupation(i, UP) + b.occupation(i, DOWN)
    return out


def phase_unitary(b, theta, label):
    """``prod_x exp(i theta_x (n_{x,up} + n_{x,down}))`` for per-site angles."""
    theta = np.asarray(theta, dtype=float)
    ph = np.exp(1j * (_site_numbers(b) @ theta))
    # snap to exact units where the angle is a multiple of pi/2
    snapped = np.round(ph.real) + 1j * np.round(ph.imag)
    exact = np.abs(ph - snapped) < 1e-14
    ph = np.where(exact, snapped, ph)
    return UnitaryMatrix(sp.diags(ph, format="csr"), label)


def _site_angles(lat, pred, angle):
    return np.array([angle if pred(x) else 0.0 for x in lat.sites])


def boundary_shift(b, i, ell):
    """Sign flip of all modes on the slab ``ell <= x_i <= L`` (``i`` 1-based)."""
    lat = b.lattice
    if not 1 <= i <= lat.d or not -lat.L + 1 <= ell <= lat.L:
        raise ConfigError(f"bad boundary shift arguments i={i}, ell={ell}")
    th = _site_angles(lat, lambda x: ell <= x[i - 1] <= lat.L, np.pi)
    return phase_unitary(b, th, f"U_BC({i},{ell})")


def amplitude_interchange(b, i, j):
    """Sign flip on sites where ``x_i`` and ``x_j`` are both odd."""
    lat = b.lattice
    th = _site_angles(lat, lambda x: x[i - 1] % 2 == 1 and x[j - 1] % 2 == 1, np.pi)
    return phase_unitary(b, th, f"U_HA({i},{j})")


def amplitude_interchange_chain(b, j):
    """``prod_{i<j} U_HA(j, i)``: moves the flux factor of axis ``j`` onto axis 1."""
    lat = b.lattice
    th = np.zeros(lat.n_sites)
    for i in range(1, j):
        th += _site_angles(lat, lambda x, i=i: x[i - 1] % 2 == 1 and x[j - 1] % 2 == 1, np.pi)
    return phase_unitary(b, th, f"U_HA({j}->1)")


def quarter_phase(b, j):
    """Multiply every mode by ``i`` on sites with even ``x_j``."""
    th = _site_angles(b.lattice, lambda x: x[j - 1] % 2 == 0, np.pi / 2)
    return phase_unitary(b, th, f"U_1,{j}")


def quarter_phase_all(b):
    """``prod_{j=2..d}`` of ``quarter_phase``."""
    lat = b.lattice
    th = np.zeros(lat.n_sites)
    for j in range(2, lat.d + 1):
        th += _site_angles(lat, lambda x, j=j: x[j - 1] % 2 == 0, np.pi / 2)
    return phase_unitary(b, th, "U_1")


def odd_quarter_phase(b):
    """Multiply every mode by ``i`` on odd sites."""
    th = _site_angles(b.lattice, lambda x: sum(x) % 2 == 1, np.pi / 2)
    return phase_unitary(b, th, "U_odd,pi/2")


def rotation(b, theta):
    """``prod_x exp(i theta Gamma^(3)_x / 2)``."""
    lat = b.lattice
    ph = np.exp(0.5j * theta * (lat.n_sites - _site_numbers(b).sum(axis=1)))
    return UnitaryMatrix(sp.diags(ph, format="csr"), f"U_rot({theta:.17g})")


def mode_swap(b, x, sigma):
    """``u_{x,s}``: ``a^dag + a`` on one mode times ``(-1)**n`` on all others."""
    k = b.mode(x, sigma)
    others = np.bitwise_count(b.states & ~np.int64(1 << k)).astype(np.int64) & 1
    string = sp.diags((1.0 - 2.0 * others).astype(complex), format="csr")
    return UnitaryMatrix(string @ majorana_op(b, x, sigma, "xi").mat, f"u({b.lattice.index(x)},{sigma})")


def _product(b, us, label):
    mat = sp.identity(b.dim, dtype=complex, format="csr")
    for u in us:
        mat = mat @ u.mat
    return UnitaryMatrix(mat, label)


def odd_swap(b):
    """``prod_{x odd, s} u_{x,s}`` in mode order."""
    lat = b.lattice
    us = [mode_swap(b, s, sig) for s, sig in b.mode_order if lat.sign(s) == -1]
    return _product(b, us, "U_odd")


def particle_hole(b):
    """``prod_{all modes} u_{x,s}`` in mode order."""
    return _product(b, [mode_swap(b, s, sig) for s, sig in b.mode_order], "U_PH")


def gauge_majorana(b):
    """``U_1 U_odd``."""
    return UnitaryMatrix(quarter_phase_all(b).mat @ odd_swap(b).mat, "U1~")


_BUILDERS = {
    "U_BC": lambda b, i, ell: boundary_shift(b, i, ell),
    "U_HA": lambda b, i, j: amplitude_interchange(b, i, j),
    "U_HA_chain": lambda b, j: amplitude_interchange_chain(b, j),
    "U_1j": lambda b, j: quarter_phase(b, j),
    "U_1": lambda b: quarter_phase_all(b),
    "u": lambda b, x, sigma: mode_swap(b, x, sigma),
    "U_odd": lambda b: odd_swap(b),
    "U_1tilde": lambda b: gauge_majorana(b),
    "U_odd_half": lambda b: odd_quarter_phase(b),
    "U_PH": lambda b: particle_hole(b),
    "U_rot": lambda b, theta: rotation(b, theta),
}


def build_unitary(b, label, *args):
    """Dispatch by label; see ``_BUILDERS`` for the accepted names."""
    try:
        fn = _BUILDERS[label]
    except KeyError:
        raise ConfigError(f"unknown unitary {label!r}; known: {sorted(_BUILDERS)}") from None
    return fn(b, *args)


def conjugate(A, U):
    """``U^dagger A U``."""
    if A.dim != U.dim:
        raise ValueError(f"dimension mismatch {A.dim} vs {U.dim}")
    out = OperatorMatrix(U.mat.conj().T @ A.mat @ U.mat, A.hermitian, A.parity)
    return out


class ModeMap:
    """Automorphism ``a_m -> a_{pi(m)}`` induced by a permutation of modes.

    Realized as ``A -> W A W^dagger`` with ``W`` a signed permutation of
    occupation states.  With ``antilinear=True`` the entries of ``A`` are
    complex conjugated first; since every ``a_m`` is a real matrix this gives
    the anti-linear map fixing the ``a``'s.
    """

    def __init__(self, b, site_map, spin_map=(UP, DOWN), antilinear=False, label=""):
        perm = np.empty(b.n_modes, dtype=np.int64)
        for k, (s, sig) in enumerate(b.mode_order):
            perm[k] = b.position[(int(site_map[s]), spin_map[sig])]
        if sorted(perm.tolist()) != list(range(b.n_modes)):
            raise ConfigError("site/spin map is not a bijection")
        states = b.states
        target = np.zeros_like(states)
        for k in range(b.n_modes):
            target |= ((states >> k) & 1) << perm[k]
        inversions = np.zeros(b.dim, dtype=np.int64)
        for k in range(b.n_modes):
            for k2 in range(k + 1, b.n_modes):
                if perm[k] > perm[k2]:
                    inversions += ((states >> k) & 1) & ((states >> k2) & 1)
        sign = (1 - 2 * (inversions & 1)).astype(complex)
        self.W = sp.csr_matrix((sign, (target, states)), shape=(b.dim, b.dim))
        self.antilinear = antilinear
        self.label = label

    def apply(self, A):
        m = A.mat.conj() if self.antilinear else A.mat
        return OperatorMatrix(self.W @ m @ self.W.conj().T, A.hermitian, A.parity)

    def apply_vector(self, v):
        return self.W @ (np.conj(v) if self.antilinear else v)


def reflection(b):
    """Anti-linear reflection ``x_1 -> 1 - x_1`` (cut between 0|1 and the wrap)."""
    lat = b.lattice
    smap = [lat.index((1 - x[0],) + tuple(x[1:])) for x in lat.sites]
    return ModeMap(b, smap, antilinear=True, label="theta")


def spin_reflection(b):
    """Anti-linear exchange of spin up and spin down on every site."""
    return ModeMap(b, list(range(b.lattice.n_sites)), (DOWN, UP), antilinear=True, label="theta_spin")


def translation(b, m, step=2):
    """Linear translation by ``step`` along 1-based axis ``m``."""
    lat = b.lattice
    smap = [lat.index(lat.shift(x, m - 1, step)) for x in lat.sites]
    return ModeMap(b, smap, label=f"T{m}^{step}")


def axis_swap(b, i, j):
    """Linear map exchanging coordinates ``i`` and ``j`` (1-based)."""
    lat = b.lattice

    def swap(x):
        y = list(x)
        y[i - 1], y[j - 1] = y[j - 1], y[i - 1]
        return tuple(y)

    smap = [lat.index(swap(x)) for x in lat.sites]
    return ModeMap(b, smap, label=f"P({i},{j})")
