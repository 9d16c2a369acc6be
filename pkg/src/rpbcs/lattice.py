"""Finite hypercubic lattice with pi-flux hopping phases.

The lattice is ``{-L+1, ..., L}^d`` with sites ordered lexicographically,
first coordinate slowest.  Hopping bonds carry the phase
``(-1)**(x_1 + ... + x_{m-1})`` in direction ``m`` and an extra minus sign on
the bond that wraps around the boundary (anti-periodic boundary condition).
"""

from __future__ import annotations

import itertools
import numbers
from dataclasses import dataclass, field

import numpy as np


class ConfigError(ValueError):
    """Invalid user-supplied configuration."""


class GeometryError(ValueError):
    """A region does not fit inside the lattice."""


def sublattice_sign(x):
    """Return ``(-1)**(x_1 + ... + x_d)``."""
    return -1 if sum(x) % 2 else 1


@dataclass(frozen=True)
class Bond:
    """Directed hopping bond ``source -> target`` in direction ``direction``.

    ``hop_phase`` is the coefficient of ``kappa * a^dagger_source a_target``;
    the Hermitian conjugate term is added when the Hamiltonian is assembled.
    ``direction`` is 1-based.
    """

    source: int
    target: int
    direction: int
    hop_phase: complex
    is_boundary: bool


@dataclass(frozen=True)
class LatticeSpec:
    d: int
    L: int
    sites: tuple = field(repr=False)
    site_index: dict = field(repr=False, compare=False)

    @property
    def n_sites(self):
        return len(self.sites)

    @property
    def side(self):
        return 2 * self.L

    def index(self, x):
        """Site index of ``x``; integers are passed through after a range check."""
        if isinstance(x, numbers.Integral):
            if not 0 <= x < self.n_sites:
                raise GeometryError(f"site index {x} outside lattice")
            return x
        try:
            return self.site_index[tuple(int(c) for c in x)]
        except KeyError:
            raise GeometryError(f"site {tuple(x)} outside lattice") from None

    def coords(self, i):
        return self.sites[i]

    def wrap(self, c):
        """Fold an integer coordinate back into ``{-L+1, ..., L}``."""
        return (c + self.L - 1) % self.side - self.L + 1

    def shift(self, x, m, step=1):
        """Periodic translate of ``x`` by ``step`` along 0-based axis ``m``."""
        y = list(self.coords(x) if isinstance(x, numbers.Integral) else x)
        y[m] = self.wrap(y[m] + step)
        return tuple(y)

    def sign(self, x):
        return sublattice_sign(self.coords(x) if isinstance(x, numbers.Integral) else x)

    def contains(self, x):
        return all(-self.L + 1 <= c <= self.L for c in x)


def build_lattice(d, L):
    """Build ``{-L+1, ..., L}^d``.

    >>> build_lattice(2, 1).n_sites
    4
    """
    if not isinstance(d, numbers.Integral) or not isinstance(L, numbers.Integral) or d < 1 or L < 1:
        raise ConfigError(f"need integer d >= 1 and L >= 1, got d={d!r}, L={L!r}")
    d, L = int(d), int(L)
    rng = range(-L + 1, L + 1)
    sites = tuple(itertools.product(rng, repeat=d))
    return LatticeSpec(d=d, L=L, sites=sites, site_index={x: i for i, x in enumerate(sites)})


def flux_factor(x, m):
    """``(-1)**(x_1 + ... + x_{m-1})`` for 0-based axis ``m``."""
    return -1 if sum(x[:m]) % 2 else 1


def enumerate_bonds(lat, boundary="antiperiodic"):
    """All hopping bonds of ``lat``.

    Bulk bonds point from ``x`` to ``x + e_m`` for ``x_m != L``.  The wrap bond
    points from ``x_m = L`` to ``x_m = -L+1``; with ``boundary="antiperiodic"``
    it carries the opposite sign of the flux factor, with ``"periodic"`` the
    same sign.  For ``L = 1`` both bonds join the same pair and both are kept.
    """
    if boundary not in ("antiperiodic", "periodic"):
        raise ConfigError(f"unknown boundary {boundary!r}")
    wrap_sign = -1 if boundary == "antiperiodic" else 1
    bonds = []
    for i, x in enumerate(lat.sites):
        for m in range(lat.d):
            j = lat.index(lat.shift(x, m))
            s = flux_factor(x, m)
            edge = x[m] == lat.L
            if edge:
                s *= wrap_sign
            bonds.append(Bond(i, j, m + 1, 1j * s, edge))
    return bonds


def neighbour_edges(lat):
    """Directed nearest-neighbour edges ``(x, x + e_m, m)`` with periodic wrap.

    There are ``d * |Lambda|`` edges.  For ``2L >= 3`` each unordered
    neighbour pair appears once; for ``2L = 2`` each pair appears twice, once
    per connecting edge.  ``m`` is 0-based.
    """
    return [(i, lat.index(lat.shift(x, m)), m) for i, x in enumerate(lat.sites) for m in range(lat.d)]


def omega_sites(lat, R):
    """Sites with ``|x|_inf <= R``; raises if the box leaves the lattice."""
    if R < 0 or R > lat.L - 1:
        raise GeometryError(f"box of radius {R} does not fit in L={lat.L}")
    return [i for i, x in enumerate(lat.sites) if max(abs(c) for c in x) <= R]


def dual_grid(lat):
    """Momenta ``2 pi k / (2L)`` folded into ``(-pi, pi]`` on every axis."""
    ks = [np.pi * k / lat.L for k in range(-lat.L + 1, lat.L + 1)]
    return [tuple(p) for p in itertools.product(ks, repeat=lat.d)]


def on_dual_grid(lat, p, tol=1e-12):
    """Return ``p`` snapped onto the dual grid or raise ``ConfigError``.

    Components are folded into ``(-pi, pi]`` modulo ``2 pi``.
    """
    p = np.asarray(p, dtype=float)
    if p.shape != (lat.d,):
        raise ConfigError(f"momentum must have {lat.d} components")
    k = p * lat.L / np.pi
    kr = np.round(k)
    if np.any(np.abs(k - kr) > tol * max(1.0, float(np.max(np.abs(k))))):
        raise ConfigError(f"momentum {tuple(p)} is not on the dual grid of L={lat.L}")
    kr = (kr + lat.L - 1) % (2 * lat.L) - lat.L + 1
    return tuple(np.pi * kr / lat.L)
