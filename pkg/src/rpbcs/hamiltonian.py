"""Hamiltonians of the pi-flux pairing model.

``H(B) = H_hop + H_int - B * O`` where ``H_hop`` is the nearest-neighbour
hopping with pi flux per plaquette and anti-periodic boundary, ``H_int`` is a
nearest-neighbour pair hopping plus an optional ``Gamma^(3) Gamma^(3)``
repulsion, and ``O`` is the staggered ``Gamma^(2)`` order parameter.

Neighbour sums run over the directed edges ``x -> x + e_m`` with periodic
wrap.  On a side-2 lattice (``L = 1``) each neighbour pair is therefore
counted twice, matching the doubled hopping bonds.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fock import UP, DOWN, annihilation_op, creation_op, gamma_op, staggered_sum
from .lattice import ConfigError, GeometryError, enumerate_bonds, neighbour_edges

PAIR_MULTIPLICITY = "directed-edges"


@dataclass(frozen=True)
class ModelParams:
    kappa: float = 0.0
    g: float = 1.0
    gprime: float = 0.0
    B: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        for name in ("kappa", "g", "gprime", "B", "beta"):
            v = getattr(self, name)
            if not np.isfinite(v):
                raise ConfigError(f"{name} must be finite, got {v!r}")
        if self.gprime < 0:
            raise ConfigError("gprime must be >= 0")
        if self.beta < 0:
            raise ConfigError("beta must be >= 0")


@dataclass
class FieldConfig:
    """Real fields on (site, axis); arrays of shape ``(n_sites, d)``."""

    h: np.ndarray | None = None
    hprime: np.ndarray | None = None
    htilde: np.ndarray | None = field(default=None, repr=False)

    @staticmethod
    def _check(lat, a, name):
        if a is None:
            return None
        a = np.asarray(a, dtype=float)
        if a.shape != (lat.n_sites, lat.d) or not np.all(np.isfinite(a)):
            raise ConfigError(f"{name} must be a finite array of shape {(lat.n_sites, lat.d)}")
        return a


def random_fields(lat, rng, amplitude=2.0):
    """i.i.d. uniform draws on ``[-amplitude, amplitude]`` per (site, axis)."""
    return rng.uniform(-amplitude, amplitude, size=(lat.n_sites, lat.d))


def _hop_from_bonds(b, bonds, kappa, spins=(UP, DOWN)):
    out = b.zero()
    if kappa == 0:
        return out
    for bond in bonds:
        for sigma in spins:
            t = creation_op(b, bond.source, sigma) @ annihilation_op(b, bond.target, sigma)
            out = out + kappa * bond.hop_phase * t + np.conj(kappa * bond.hop_phase) * t.H
    out.hermitian = True
    out.parity = "even"
    return out


def build_hop(b, kappa, boundary="antiperiodic", direction=None, bonds=None, spins=(UP, DOWN)):
    """Hopping term ``sum_bonds i kappa s (a^dag_x a_y - a^dag_y a_x)`` over both spins.

    ``direction`` (1-based) restricts to one axis.  ``bonds`` overrides the
    bond list, which lets gauge-transformed variants be assembled directly.
    ``spins`` restricts to one spin species.
    """
    if bonds is None:
        bonds = enumerate_bonds(b.lattice, boundary)
    if direction is not None:
        bonds = [bd for bd in bonds if bd.direction == direction]
    return _hop_from_bonds(b, bonds, kappa, spins)


def pairing_sum(b, direction=None):
    """``sum_edges (G+_x G-_y + G-_x G+_y)``."""
    out = b.zero()
    for i, j, m in neighbour_edges(b.lattice):
        if direction is not None and m + 1 != direction:
            continue
        out = out + gamma_op(b, i, "+") @ gamma_op(b, j, "-") + gamma_op(b, i, "-") @ gamma_op(b, j, "+")
    out.hermitian = True
    out.parity = "even"
    return out


def coulomb_sum(b):
    """``sum_edges Gamma^(3)_x Gamma^(3)_y``."""
    out = b.zero()
    for i, j, _ in neighbour_edges(b.lattice):
        out = out + gamma_op(b, i, 3) @ gamma_op(b, j, 3)
    out.hermitian = True
    out.parity = "even"
    return out


def build_int(b, g, gprime=0.0):
    """Pair hopping ``g * pairing_sum`` plus repulsion ``gprime * coulomb_sum``."""
    out = g * pairing_sum(b)
    if gprime:
        out = out + gprime * coulomb_sum(b)
    out.hermitian = True
    return out


def build_int_gamma12(b, g):
    """``(g/2) sum_edges (G1_x G1_y + G2_x G2_y)``; equals ``build_int(b, g, 0)``."""
    out = b.zero()
    for i, j, _ in neighbour_edges(b.lattice):
        out = out + gamma_op(b, i, 1) @ gamma_op(b, j, 1) + gamma_op(b, i, 2) @ gamma_op(b, j, 2)
    out = (g / 2) * out
    out.hermitian = True
    out.parity = "even"
    return out


def build_order_param(b):
    """Staggered ``sum_x (-1)**|x| i (a^dag_up a^dag_down - a_down a_up)``."""
    lat = b.lattice
    out = b.zero()
    for i in range(lat.n_sites):
        pair = creation_op(b, i, UP) @ creation_op(b, i, DOWN)
        unpair = annihilation_op(b, i, DOWN) @ annihilation_op(b, i, UP)
        out = out + (1j * lat.sign(i)) * (pair - unpair)
    out.hermitian = True
    out.parity = "even"
    return out


def build_int_fields(b, g, h, direction=None):
    """Completed-square pairing term in a staggered field ``h``.

    ``(g/4) sum_{x,m} [G1_x + G1_{x+e_m} + s(x) h_m(x)]^2
    - (g/4) sum_{x,m} [G2_x - G2_{x+e_m}]^2 - (d g / 2) sum_x (G1_x^2 - G2_x^2)``
    with ``s(x)`` the sublattice sign.  ``h = None`` means zero field.
    ``direction`` (1-based) keeps only the two squares along one axis and
    drops the diagonal tail.
    """
    lat = b.lattice
    h = FieldConfig._check(lat, h, "h")
    eye = b.identity()
    out = b.zero()
    for i, j, m in neighbour_edges(lat):
        if direction is not None and m + 1 != direction:
            continue
        s = gamma_op(b, i, 1) + gamma_op(b, j, 1)
        if h is not None and h[i, m]:
            s = s + (lat.sign(i) * h[i, m]) * eye
        dlt = gamma_op(b, i, 2) - gamma_op(b, j, 2)
        out = out + (g / 4) * (s @ s) - (g / 4) * (dlt @ dlt)
    if direction is None:
        for i in range(lat.n_sites):
            g1, g2 = gamma_op(b, i, 1), gamma_op(b, i, 2)
            out = out - (lat.d * g / 2) * (g1 @ g1 - g2 @ g2)
    out.hermitian = True
    out.parity = "even"
    return out


def build_repul_fields(b, gprime, hprime):
    """Completed-square repulsion in a field ``h'`` (no staggering).

    ``(g'/2) sum_{x,m} [G3_x + G3_{x+e_m} + h'_m(x)]^2 - d g' sum_x G3_x^2``.
    At ``h' = 0`` this equals ``g' * coulomb_sum`` exactly.
    """
    lat = b.lattice
    hprime = FieldConfig._check(lat, hprime, "hprime")
    eye = b.identity()
    out = b.zero()
    for i, j, m in neighbour_edges(lat):
        s = gamma_op(b, i, 3) + gamma_op(b, j, 3)
        if hprime is not None and hprime[i, m]:
            s = s + hprime[i, m] * eye
        out = out + (gprime / 2) * (s @ s)
    for i in range(lat.n_sites):
        g3 = gamma_op(b, i, 3)
        out = out - (lat.d * gprime) * (g3 @ g3)
    out.hermitian = True
    out.parity = "even"
    return out


def build_full(b, params, fields=None, boundary="antiperiodic"):
    """``H_hop + H_int - B O`` with optional field deformations.

    With ``fields.h`` the pairing part is replaced by ``build_int_fields``;
    with ``fields.hprime`` the repulsion is replaced by
    ``build_repul_fields``.  Unset fields reproduce the plain terms.
    """
    h = None if fields is None else fields.h
    hp = None if fields is None else fields.hprime
    out = build_hop(b, params.kappa, boundary=boundary)
    if h is None:
        out = out + params.g * pairing_sum(b)
    else:
        out = out + build_int_fields(b, params.g, h)
    if hp is not None:
        out = out + build_repul_fields(b, params.gprime, hp)
    elif params.gprime:
        out = out + params.gprime * coulomb_sum(b)
    if params.B:
        out = out - params.B * build_order_param(b)
    out.hermitian = True
    out.parity = "even"
    return out


def ramp(lat, R):
    """Ramp field ``h'`` and its edge sum ``h~'``.

    ``h'(x) = 1`` for ``|x|_inf <= R+1``, ``1 - (|x|_inf - R - 1)/R`` up to
    ``2R`` and 0 beyond; it sits on axis 1 only.  ``h~'(x) = sum_m [h'_m(x) +
    h'_m(x - e_m)]``.  Returns a ``FieldConfig`` with ``hprime`` and
    ``htilde`` set.
    """
    if R < 1 or 4 * R + 1 > 2 * lat.L:
        raise GeometryError(f"ramp of radius {R} needs 4R+1 <= 2L (L={lat.L})")
    hp = np.zeros((lat.n_sites, lat.d))
    for i, x in enumerate(lat.sites):
        r = max(abs(c) for c in x)
        if r <= R + 1:
            hp[i, 0] = 1.0
        elif r <= 2 * R:
            hp[i, 0] = 1.0 - (r - R - 1) / R
    ht = np.zeros(lat.n_sites)
    for i, x in enumerate(lat.sites):
        for m in range(lat.d):
            ht[i] += hp[i, m] + hp[lat.index(lat.shift(x, m, -1)), m]
    return FieldConfig(hprime=hp, htilde=ht)


def gamma3_weighted(b, weights):
    """``sum_x w(x) Gamma^(3)_x``."""
    out = b.zero()
    for i, w in enumerate(weights):
        if w:
            out = out + float(w) * gamma_op(b, i, 3)
    out.hermitian = True
    out.parity = "even"
    return out


def order_sum(b, kind=2):
    """``sum_x (-1)**|x| Gamma^(kind)_x``."""
    out = staggered_sum(b, kind)
    out.hermitian = True
    out.parity = "even"
    return out
