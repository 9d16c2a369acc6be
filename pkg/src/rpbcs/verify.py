"""Named identity and inequality checks with margins.

Every check produces a margin that is ``>= 0`` when the relation holds:

* identity ``LHS = RHS``: ``-max |LHS - RHS|``;
* inequality ``LHS <= RHS``: ``(RHS - LHS) / max(1, |RHS|)``, minimized over
  all instances (momenta, draws, site pairs) covered by the check.

A check passes iff ``margin >= -tolerance``.  Checks that cannot run on the
requested lattice are reported as ``skipped`` with a reason; exploratory
quantities are ``informational`` and never fail.
"""

from __future__ import annotations

import math
import os
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from . import bzconst
from .fock import (DEFAULT_OPERATOR_CAP, DOWN, UP, annihilation_op, anticommutator, build_basis,
                   commutator, creation_op, gamma_op, local_order_op, majorana_op, momentum_gamma,
                   number_op, parity_op, staggered_sum, sz_op)
from .hamiltonian import (PAIR_MULTIPLICITY, FieldConfig, ModelParams, build_full, build_hop, build_int,
                          build_int_fields, build_int_gamma12, build_order_param, build_repul_fields,
                          coulomb_sum, gamma3_weighted, order_sum, pairing_sum, ramp, random_fields)
from .lattice import ConfigError, GeometryError, build_lattice, dual_grid, enumerate_bonds, omega_sites
from .thermal import (DEFAULT_DENSE_CAP, ThermalState, block_spectrum, bump, diagonalize, duhamel,
                      gbc_table, ground_spectral_moment, filter_vectors, log_trace_exp,
                      mean_energies, operator_norm, thermal_expectation, trial_energy)
from .transforms import (amplitude_interchange, amplitude_interchange_chain, boundary_shift, conjugate,
                         gauge_majorana, mode_swap, odd_quarter_phase, odd_swap, particle_hole, quarter_phase,
                         quarter_phase_all, reflection, rotation, spin_reflection)

SUITES = ("ALGEBRA", "GAUGE", "DOMINATION", "CORRELATION", "INFRARED", "VARIATIONAL", "NGMODE")

TOL_IDENTITY = 1e-12
TOL_THERMAL = 1e-10
TOL_INFRARED = 1e-9
TOL_NORM = 1e-8

DEFAULT_POINTS = (
    ModelParams(kappa=0.0, g=1.0, gprime=0.0, B=0.0),
    ModelParams(kappa=0.1, g=1.0, gprime=0.0, B=0.0),
    ModelParams(kappa=0.1, g=1.0, gprime=0.2, B=0.0),
    ModelParams(kappa=0.1, g=1.0, gprime=0.2, B=0.05),
)
DOMINATION_POINTS = (ModelParams(kappa=0.2, g=1.0, gprime=0.2, B=0.05),)
NGMODE_POINTS = (ModelParams(kappa=0.05, g=1.0, gprime=0.2, B=0.1),)
REFERENCE = ModelParams(kappa=0.2, g=1.0, gprime=0.2, B=0.05)
DEFAULT_BETAS = (0.5, 2.0)


@dataclass
class Check:
    name: str
    relation: str
    params: dict
    margin: float | None
    tolerance: float
    status: str
    kind: str
    detail: str = ""

    @property
    def failed(self):
        return self.status == "fail"


def _status(margin, tol):
    return "pass" if margin >= -tol else "fail"


def identity(name, relation, params, diff, tol=TOL_IDENTITY, detail=""):
    margin = -float(diff)
    return Check(name, relation, params, margin, tol, _status(margin, tol), "identity", detail)


def inequality(name, relation, params, lhs, rhs, tol, detail=""):
    lhs = np.atleast_1d(np.asarray(lhs, dtype=float))
    rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
    margin = float(np.min((rhs - lhs) / np.maximum(1.0, np.abs(rhs))))
    return Check(name, relation, params, margin, tol, _status(margin, tol), "inequality", detail)


def skipped(name, relation, params, reason):
    return Check(name, relation, params, None, 0.0, "skipped", "skipped", reason)


def informational(name, relation, params, value, detail=""):
    return Check(name, relation, params, float(value), 0.0, "informational", "informational", detail)


@dataclass
class VerificationReport:
    suite: str
    seed: int
    lattice: dict
    points: list
    betas: list
    checks: list = field(default_factory=list)

    @property
    def summary(self):
        out = {"total": len(self.checks)}
        for key in ("pass", "fail", "skipped", "informational"):
            out[key] = sum(c.status == key for c in self.checks)
        return out

    @property
    def ok(self):
        return not any(c.failed for c in self.checks)

    def by_name(self, name):
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def select(self, prefix):
        return [c for c in self.checks if c.name.startswith(prefix)]

    def to_dict(self):
        return {
            "suite": self.suite,
            "seed": self.seed,
            "lattice": self.lattice,
            "pair_multiplicity": PAIR_MULTIPLICITY,
            "points": self.points,
            "betas": self.betas,
            "summary": self.summary,
            "checks": [asdict(c) for c in self.checks],
        }


class Lab:
    """Lattice, Fock basis and a cache of diagonalized Hamiltonians."""

    def __init__(self, d, L, dense_cap=DEFAULT_DENSE_CAP, operator_cap=DEFAULT_OPERATOR_CAP):
        self.lattice = build_lattice(d, L)
        self.basis = build_basis(self.lattice, cap=operator_cap)
        self.dense_cap = dense_cap
        self._spectra = {}
        self._lock = threading.Lock()

    @property
    def tag(self):
        return {"d": self.lattice.d, "L": self.lattice.L}

    def spectrum(self, params, boundary="antiperiodic"):
        key = (params, boundary)
        with self._lock:
            sd = self._spectra.get(key)
        if sd is None:
            sd = diagonalize(build_full(self.basis, params, boundary=boundary), self.basis, self.dense_cap)
            with self._lock:
                self._spectra[key] = sd
        return sd

    def ramp_fits(self, R):
        return 4 * R + 1 <= 2 * self.lattice.L


def _point_dict(params, beta=None):
    out = {"kappa": params.kappa, "g": params.g, "gprime": params.gprime, "B": params.B}
    if beta is not None:
        out["beta"] = float(beta)
    return out


def _tag(params, beta=None):
    s = f"kappa={params.kappa:g},g={params.g:g},gprime={params.gprime:g},B={params.B:g}"
    return s if beta is None else f"{s};beta={beta:g}"


def _max_abs(op):
    op.mat.eliminate_zeros()
    return float(np.max(np.abs(op.mat.data))) if op.mat.nnz else 0.0


def _rng(seed, *stream):
    return np.random.default_rng([int(seed), *stream])


# ---------------------------------------------------------------- ALGEBRA


def algebra_checks(lab, seed=0, R=1):
    b, lat = lab.basis, lab.lattice
    P = lab.tag
    out = []

    eye = b.identity()
    car = 0.0
    for i, (x, s) in enumerate(b.mode_order):
        ai = annihilation_op(b, x, s)
        for (y, t) in b.mode_order[i:]:
            target = eye if (x, s) == (y, t) else b.zero()
            car = max(car, anticommutator(ai, creation_op(b, y, t)).distance(target),
                      _max_abs(anticommutator(ai, annihilation_op(b, y, t))))
    out.append(identity("algebra.car", "{a_m, a_n^dag} = delta_mn, {a_m, a_n} = 0", P, car))

    nil = max(_max_abs(creation_op(b, x, s) @ creation_op(b, x, s)) for x, s in b.mode_order)
    vac = b.vacuum()
    phase = max(abs((creation_op(b, x, s).mat @ vac)[1 << b.mode(x, s)] - 1) for x, s in b.mode_order)
    out.append(identity("algebra.creation_nilpotent", "(a^dag)^2 = 0", P, nil))
    out.append(identity("algebra.vacuum_phase", "a^dag_m |0> = +|1_m>", P, phase))

    worst = 0.0
    for i in range(lat.n_sites):
        g1, g2, g3 = (gamma_op(b, i, k) for k in (1, 2, 3))
        worst = max(worst, commutator(g1, g2).distance(2j * g3), commutator(g2, g3).distance(2j * g1),
                    commutator(g3, g1).distance(2j * g2))
        for j in range(i + 1, lat.n_sites):
            for k in (1, 2, 3):
                for m in (1, 2, 3):
                    worst = max(worst, _max_abs(commutator(gamma_op(b, i, k), gamma_op(b, j, m))))
    out.append(identity("algebra.gamma_commutators", "[G1, G2] = 2i G3 and cyclic; distinct sites commute", P, worst))

    worst = 0.0
    for i in range(lat.n_sites):
        nu, nd = number_op(b, i, UP), number_op(b, i, DOWN)
        g1 = gamma_op(b, i, 1)
        worst = max(worst, (g1 @ g1).distance(2 * (nu @ nd) - nu - nd + eye))
    out.append(identity("algebra.gamma1_square", "G1^2 = 2 n_up n_down - n_up - n_down + 1", P, worst))

    worst = 0.0
    recon = 0.0
    for i, (x, s) in enumerate(b.mode_order):
        xi, eta = majorana_op(b, x, s, "xi"), majorana_op(b, x, s, "eta")
        recon = max(recon, annihilation_op(b, x, s).distance(0.5 * (xi + 1j * eta)))
        for (y, t) in b.mode_order[i:]:
            xj, ej = majorana_op(b, y, t, "xi"), majorana_op(b, y, t, "eta")
            target = 2 * eye if (x, s) == (y, t) else b.zero()
            worst = max(worst, anticommutator(xi, xj).distance(target), anticommutator(eta, ej).distance(target),
                        _max_abs(anticommutator(xi, ej)), _max_abs(anticommutator(eta, xj)))
    out.append(identity("algebra.majorana_anticommutators", "{xi, xi'} = {eta, eta'} = 2 delta, {xi, eta'} = 0", P, worst))
    out.append(identity("algebra.majorana_reconstruction", "a = (xi + i eta) / 2", P, recon))

    worst = 0.0
    for theta in (0.0, np.pi / 4, np.pi / 2, np.pi):
        U = rotation(b, theta)
        c, s = np.cos(theta), np.sin(theta)
        worst = max(worst, U.unitarity_error())
        if theta == 0.0:
            worst = max(worst, U.distance(eye))
        for i in range(lat.n_sites):
            g1, g2, g3 = (gamma_op(b, i, k) for k in (1, 2, 3))
            worst = max(worst, conjugate(g1, U).distance(c * g1 + s * g2),
                        conjugate(g2, U).distance(c * g2 - s * g1), conjugate(g3, U).distance(g3))
    out.append(identity("algebra.rotation", "U_rot(t)^dag (G1, G2) U_rot(t) = (cG1 + sG2, cG2 - sG1)", P, worst))

    worst_e, worst_x = 0.0, 0.0
    for i in range(lat.n_sites):
        gp = gamma_op(b, i, "+").mat @ vac
        plus, minus = vac + gp, vac - gp
        g1, g2 = gamma_op(b, i, 1).mat, gamma_op(b, i, 2).mat
        worst_e = max(worst_e, np.max(np.abs(g1 @ plus - plus)), np.max(np.abs(g1 @ minus + minus)))
        worst_x = max(worst_x, np.max(np.abs(g2 @ plus + 1j * minus)), np.max(np.abs(g2 @ minus - 1j * plus)))
    out.append(identity("algebra.gamma1_eigenstates", "G1 (1 +- G+)|0> = +-(1 +- G+)|0>", P, worst_e))
    out.append(identity("algebra.gamma2_exchange", "G2 (1 +- G+)|0> = -+i (1 -+ G+)|0>", P, worst_x))

    total = b.zero()
    adj = 0.0
    for p in dual_grid(lat):
        gp = momentum_gamma(b, p)
        gm = momentum_gamma(b, _neg(lat, p))
        adj = max(adj, gp.H.distance(gm))
        total = total + gp @ gm
    local = b.zero()
    for i in range(lat.n_sites):
        local = local + gamma_op(b, i, 1) @ gamma_op(b, i, 1)
    out.append(identity("algebra.momentum_completeness", "sum_p G^_p G^_-p = sum_x G1_x^2", P, total.distance(local)))
    out.append(identity("algebra.momentum_adjoint", "(G^_p)^dag = G^_-p", P, adj))

    pr = REFERENCE
    rng = _rng(seed, 1)
    h = random_fields(lat, rng)
    hp = random_fields(lat, rng)
    out.append(identity("algebra.pairing_gamma12_form", "g sum (G+G- + G-G+) = (g/2) sum (G1G1 + G2G2)", P,
                        build_int(b, pr.g).distance(build_int_gamma12(b, pr.g))))
    out.append(identity("algebra.int_fields_zero", "H_int(h=0) = H_int", P,
                        build_int_fields(b, pr.g, np.zeros((lat.n_sites, lat.d))).distance(pr.g * pairing_sum(b))))
    expand = b.zero()
    for i, x in enumerate(lat.sites):
        for m in range(lat.d):
            j = lat.index(lat.shift(x, m))
            expand = expand + (pr.g / 2 * lat.sign(i) * h[i, m]) * (gamma_op(b, i, 1) + gamma_op(b, j, 1))
    expand = expand + (pr.g / 4 * float(np.sum(h ** 2))) * eye
    diff = build_int_fields(b, pr.g, h) - build_int_fields(b, pr.g, None)
    out.append(identity("algebra.int_fields_expansion",
                        "H_int(h) - H_int(0) = (g/2) sum s h (G1_x + G1_y) + (g/4) sum h^2", P,
                        diff.distance(expand)))
    out.append(identity("algebra.repul_fields_zero", "H_repul(g', 0) = g' sum G3 G3", P,
                        build_repul_fields(b, pr.gprime, None).distance(pr.gprime * coulomb_sum(b))))
    n3 = b.zero()
    for i in range(lat.n_sites):
        n3 = n3 + gamma_op(b, i, 3)
    out.append(identity("algebra.repul_u1", "[H_repul(g', h'), sum G3] = 0", P,
                        _max_abs(commutator(build_repul_fields(b, pr.gprime, hp), n3))))
    out.append(identity("algebra.order_param_form", "O = sum_x s(x) G2_x", P,
                        build_order_param(b).distance(order_sum(b, 2))))

    fields = FieldConfig(h=h, hprime=hp)
    H = build_full(b, pr, fields)
    sec = max(_max_abs(commutator(H, sz_op(b))), _max_abs(commutator(H, parity_op(b))))
    out.append(identity("algebra.sector_commutation", "[H(B, h, h'), S_z] = [H(B, h, h'), (-1)^N] = 0", P, sec))
    herm = max(op.hermiticity_error() for op in (H, build_full(b, pr), build_hop(b, pr.kappa),
                                                 build_int(b, pr.g, pr.gprime), build_order_param(b)))
    out.append(identity("algebra.hermiticity", "H = H^dag for every Hamiltonian variant", P, herm, tol=1e-13))

    if lat.d >= 2:
        worst = 0.0
        bonds = {(bd.source, bd.direction): bd for bd in enumerate_bonds(lat) if not bd.is_boundary}
        for i, x in enumerate(lat.sites):
            for m in range(lat.d):
                for n in range(m + 1, lat.d):
                    if x[m] == lat.L or x[n] == lat.L:
                        continue
                    xm = lat.index(lat.shift(x, m))
                    xn = lat.index(lat.shift(x, n))
                    if lat.sites[xm][n] == lat.L:
                        continue
                    s1 = bonds[(i, m + 1)].hop_phase
                    s2 = bonds[(xm, n + 1)].hop_phase
                    s3 = bonds[(xn, m + 1)].hop_phase
                    s4 = bonds[(i, n + 1)].hop_phase
                    worst = max(worst, abs(s1 * s2 * np.conj(s3) * np.conj(s4) + 1))
        out.append(identity("algebra.plaquette_flux", "product of hop phases around a plaquette = -1", P, worst))
    else:
        out.append(skipped("algebra.plaquette_flux", "product of hop phases around a plaquette = -1", P,
                           "no plaquettes in d = 1"))

    rel = "[G3[h~'], A_R] = (4i/|Omega_R|) sum_{Omega_R} s(x) G2_x"
    if lab.ramp_fits(R):
        fc = ramp(lat, R)
        C = gamma3_weighted(b, fc.htilde)
        box = omega_sites(lat, R)
        rhs = (4j / len(box)) * staggered_sum(b, 2, box)
        out.append(identity("algebra.magnetization_commutator", rel, {**P, "R": R},
                            commutator(C, local_order_op(b, R)).distance(rhs)))
    else:
        out.append(skipped("algebra.magnetization_commutator", rel, {**P, "R": R},
                           f"ramp of radius {R} needs 4R+1 <= 2L"))
    return out


def _neg(lat, p):
    """``-p`` folded back onto the dual grid ``(-pi, pi]``."""
    q = -np.asarray(p, dtype=float)
    q = np.where(q <= -np.pi + 1e-12, q + 2 * np.pi, q)
    return tuple(q)


# ---------------------------------------------------------------- GAUGE


def _relocated_bonds(lat, bonds, i, ell):
    if ell == -lat.L + 1:
        return list(bonds)
    out = []
    for bd in bonds:
        flip = bd.direction == i and (bd.is_boundary or lat.sites[bd.source][i - 1] == ell - 1)
        out.append(replace(bd, hop_phase=-bd.hop_phase) if flip else bd)
    return out


def _square_form(b, g, direction, s1, s2, shift):
    """``(g/4) sum [G1_x + s1 G1_y + c(x)]^2 - (g/4) sum [G2_x + s2 G2_y]^2`` along one axis."""
    lat = b.lattice
    eye = b.identity()
    out = b.zero()
    for i, x in enumerate(lat.sites):
        j = lat.index(lat.shift(x, direction - 1))
        a = gamma_op(b, i, 1) + s1 * gamma_op(b, j, 1) + shift[i] * eye
        c = gamma_op(b, i, 2) + s2 * gamma_op(b, j, 2)
        out = out + (g / 4) * (a @ a) - (g / 4) * (c @ c)
    return out


def gauge_checks(lab, seed=0):
    b, lat = lab.basis, lab.lattice
    P = lab.tag
    pr = REFERENCE
    out = []
    H = build_full(b, pr)
    hop = build_hop(b, pr.kappa)
    rest = H - hop
    bonds = enumerate_bonds(lat)

    unitaries = [rotation(b, 0.3), gauge_majorana(b), odd_swap(b), particle_hole(b), odd_quarter_phase(b),
                 quarter_phase_all(b)]
    unitaries += [boundary_shift(b, i, ell) for i in range(1, lat.d + 1) for ell in range(-lat.L + 1, lat.L + 1)]
    unitaries += [amplitude_interchange(b, i, j) for i in range(1, lat.d + 1) for j in range(i + 1, lat.d + 1)]
    unitaries += [amplitude_interchange_chain(b, j) for j in range(2, lat.d + 1)]
    unitaries += [mode_swap(b, x, s) for x, s in b.mode_order]
    out.append(identity("gauge.unitarity", "U^dag U = 1 for every gauge unitary", P,
                        max(u.unitarity_error() for u in unitaries), tol=1e-13))

    worst = 0.0
    for i in range(1, lat.d + 1):
        for ell in range(-lat.L + 1, lat.L + 1):
            target = rest + build_hop(b, pr.kappa, bonds=_relocated_bonds(lat, bonds, i, ell))
            worst = max(worst, conjugate(H, boundary_shift(b, i, ell)).distance(target))
    out.append(identity("gauge.boundary_relocation",
                        "U_BC(i, ell)^dag H U_BC(i, ell) = H with the negative bonds moved to the cut ell", P, worst))

    rel_terms = "U_HA(i,j)^dag [hop along i] U_HA(i,j) = (-1)^{x_j} [hop along i], and i <-> j"
    rel_chain = "U_HA(j->1)^dag H U_HA(j->1) = H with the flux factor moved from axis j onto the others"
    if lat.d >= 2:
        worst = 0.0
        for i in range(1, lat.d + 1):
            for j in range(i + 1, lat.d + 1):
                U = amplitude_interchange(b, i, j)
                for bd in bonds:
                    term = build_hop(b, 1.0, bonds=[bd])
                    x = lat.sites[bd.source]
                    if bd.direction == i:
                        fac = -1 if x[j - 1] % 2 else 1
                    elif bd.direction == j:
                        fac = -1 if x[i - 1] % 2 else 1
                    else:
                        fac = 1
                    worst = max(worst, conjugate(term, U).distance(fac * term))
        out.append(identity("gauge.amplitude_interchange_terms", rel_terms, P, worst))
        worst = 0.0
        for j in range(2, lat.d + 1):
            moved = []
            for bd in bonds:
                x = lat.sites[bd.source]
                if bd.direction == j:
                    fac = -1 if sum(x[:j - 1]) % 2 else 1
                elif bd.direction < j:
                    fac = -1 if x[j - 1] % 2 else 1
                else:
                    fac = 1
                moved.append(replace(bd, hop_phase=fac * bd.hop_phase))
            target = rest + build_hop(b, pr.kappa, bonds=moved)
            worst = max(worst, conjugate(H, amplitude_interchange_chain(b, j)).distance(target))
        out.append(identity("gauge.amplitude_interchange_chain", rel_chain, P, worst))
    else:
        out.append(skipped("gauge.amplitude_interchange_terms", rel_terms, P, "needs d >= 2"))
        out.append(skipped("gauge.amplitude_interchange_chain", rel_chain, P, "needs d >= 2"))

    Ut = gauge_majorana(b)
    maj = b.zero()
    for bd in bonds:
        if bd.direction != 1:
            continue
        s = (bd.hop_phase / 1j).real
        for sig in (UP, DOWN):
            xs = majorana_op(b, bd.source, sig, "xi") @ majorana_op(b, bd.target, sig, "xi")
            es = majorana_op(b, bd.source, sig, "eta") @ majorana_op(b, bd.target, sig, "eta")
            maj = maj + (0.5j * pr.kappa * s) * (xs - es)
    out.append(identity("gauge.majorana_hop1",
                        "U1~^dag H_hop,1 U1~ = (i kappa/2) sum s (xi xi' - eta eta')", P,
                        conjugate(build_hop(b, pr.kappa, direction=1), Ut).distance(maj)))

    h = random_fields(lat, _rng(seed, 2))
    sgn = (-1) ** (lat.d - 1)
    worst = 0.0
    for j in range(1, lat.d + 1):
        shift = np.array([sgn * (-1) ** (sum(x[1:]) % 2) * h[i, j - 1] for i, x in enumerate(lat.sites)])
        if j == 1:
            target = _square_form(b, pr.g, 1, -1, -1, shift)
        else:
            target = _square_form(b, pr.g, j, 1, 1, shift)
        worst = max(worst, conjugate(build_int_fields(b, pr.g, h, direction=j), Ut).distance(target))
    out.append(identity("gauge.majorana_int_fields",
                        "U1~^dag H_int,j(h) U1~ = completed squares with flipped G signs", P, worst))

    worst = 0.0
    for j in range(2, lat.d + 1):
        U = quarter_phase(b, j)
        for i, x in enumerate(lat.sites):
            fac = -1 if x[j - 1] % 2 == 0 else 1
            for k in (1, 2):
                worst = max(worst, conjugate(gamma_op(b, i, k), U).distance(fac * gamma_op(b, i, k)))
    if lat.d >= 2:
        out.append(identity("gauge.quarter_phase_gamma", "U_1j^dag G_x U_1j = -(-1)^{x_j} G_x", P, worst))
    else:
        out.append(skipped("gauge.quarter_phase_gamma", "U_1j^dag G_x U_1j = -(-1)^{x_j} G_x", P, "needs d >= 2"))

    Uo = odd_swap(b)
    worst = 0.0
    for x, s in b.mode_order:
        xi, eta = majorana_op(b, x, s, "xi"), majorana_op(b, x, s, "eta")
        worst = max(worst, conjugate(xi, Uo).distance(xi), conjugate(eta, Uo).distance(lat.sign(x) * eta))
    out.append(identity("gauge.odd_swap_majorana", "U_odd^dag xi U_odd = xi, U_odd^dag eta_x U_odd = s(x) eta_x", P, worst))

    worst = 0.0
    for x, s in b.mode_order:
        u = mode_swap(b, x, s)
        for y, t in b.mode_order:
            a = annihilation_op(b, y, t)
            target = creation_op(b, y, t) if (x, s) == (y, t) else a
            worst = max(worst, conjugate(a, u).distance(target))
    out.append(identity("gauge.mode_swap", "u^dag a u = a^dag on its mode and a elsewhere", P, worst))

    out.append(identity("gauge.odd_quarter_pairing", "U_odd,pi/2^dag H_int U_odd,pi/2 = -g sum (G+G- + G-G+)", P,
                        conjugate(build_int(b, pr.g), odd_quarter_phase(b)).distance(-pr.g * pairing_sum(b))))

    th_s = spin_reflection(b)
    worst = 0.0
    for x in range(lat.n_sites):
        for y in range(lat.n_sites):
            lhs = (creation_op(b, x, UP) @ creation_op(b, x, DOWN) @ annihilation_op(b, y, DOWN)
                   @ annihilation_op(b, y, UP))
            hop_up = creation_op(b, x, UP) @ annihilation_op(b, y, UP)
            worst = max(worst, lhs.distance(hop_up @ th_s.apply(hop_up)))
    out.append(identity("gauge.spin_reflection_factorization",
                        "a+_xu a+_xd a_yd a_yu = (a+_xu a_yu) theta_spin(a+_xu a_yu)", P, worst))

    Up = particle_hole(b)
    worst = conjugate(H, Up).distance(H)
    worst = max(worst, conjugate(build_order_param(b), Up).distance(build_order_param(b)))
    for i in range(lat.n_sites):
        worst = max(worst, conjugate(gamma_op(b, i, 3), Up).distance(-gamma_op(b, i, 3)))
    out.append(identity("gauge.particle_hole", "U_PH^dag (H, O, G3) U_PH = (H, O, -G3)", P, worst))

    th = reflection(b)
    worst = 0.0
    for i, x in enumerate(lat.sites):
        rx = lat.index((1 - x[0],) + tuple(x[1:]))
        for s in (UP, DOWN):
            worst = max(worst, th.apply(majorana_op(b, i, s, "xi")).distance(majorana_op(b, rx, s, "xi")),
                        th.apply(majorana_op(b, i, s, "eta")).distance(-majorana_op(b, rx, s, "eta")))
        if x[0] == 0:
            worst = max(worst, th.apply(gamma_op(b, i, 2)).distance(-gamma_op(b, rx, 2)))
    out.append(identity("gauge.reflection_majorana",
                        "theta(xi_x) = xi_rx, theta(eta_x) = -eta_rx, theta(G2_x0) = -G2_x1", P, worst))

    rng = _rng(seed, 3)
    worst = 0.0
    for _ in range(3):
        A = _random_operator(b, rng)
        B = _random_operator(b, rng)
        c = complex(rng.normal(), rng.normal())
        worst = max(worst, th.apply(A @ B).distance(th.apply(A) @ th.apply(B)),
                    th.apply(th.apply(A)).distance(A),
                    th.apply(c * A).distance(np.conj(c) * th.apply(A)))
    out.append(identity("gauge.reflection_antilinear",
                        "theta(AB) = theta(A) theta(B), theta^2 = id, theta(cA) = c* theta(A)", P, worst))
    return out


def _random_operator(b, rng):
    modes = b.mode_order
    pick = lambda: modes[int(rng.integers(len(modes)))]
    out = b.zero()
    for _ in range(3):
        (x, s), (y, t) = pick(), pick()
        c = complex(rng.normal(), rng.normal())
        out = out + c * (creation_op(b, x, s) @ annihilation_op(b, y, t))
    x, s = pick()
    out = out + complex(rng.normal(), rng.normal()) * annihilation_op(b, x, s)
    out = out + complex(rng.normal(), rng.normal()) * gamma_op(b, int(rng.integers(b.lattice.n_sites)), 1)
    return out


# ---------------------------------------------------------------- DOMINATION


def domination_checks(lab, params, betas, seed=0, n_draws=200, stream=0):
    b, lat = lab.basis, lab.lattice
    hop = build_hop(b, params.kappa)
    field_term = params.B * build_order_param(b)
    plain = hop + params.g * pairing_sum(b) + params.gprime * coulomb_sum(b) - field_term
    e_plain = block_spectrum(plain, b)
    ref = {beta: log_trace_exp(e_plain, beta) for beta in betas}

    base_h = hop + params.gprime * coulomb_sum(b) - field_term
    base_hp = hop + params.g * pairing_sum(b) - field_term
    zero = np.zeros((lat.n_sites, lat.d))
    e_h0 = block_spectrum(base_h + build_int_fields(b, params.g, zero), b)
    e_hp0 = block_spectrum(base_hp + build_repul_fields(b, params.gprime, zero), b)

    rng_h = _rng(seed, 10, stream)
    rng_hp = _rng(seed, 11, stream)
    worst_h = {beta: -np.inf for beta in betas}
    worst_hp = {beta: -np.inf for beta in betas}
    for _ in range(n_draws):
        e = block_spectrum(base_h + build_int_fields(b, params.g, random_fields(lat, rng_h)), b)
        ep = block_spectrum(base_hp + build_repul_fields(b, params.gprime, random_fields(lat, rng_hp)), b)
        for beta in betas:
            worst_h[beta] = max(worst_h[beta], log_trace_exp(e, beta) - ref[beta])
            worst_hp[beta] = max(worst_hp[beta], log_trace_exp(ep, beta) - ref[beta])

    out = []
    for beta in betas:
        P = {**lab.tag, **_point_dict(params, beta), "draws": n_draws, "amplitude": 2.0}
        t = _tag(params, beta)
        out.append(inequality(f"domination.pairing_field[{t}]",
                              "log Tr e^{-beta H(B, h)} - log Tr e^{-beta H(B, 0)} <= 0", P,
                              worst_h[beta], 0.0, TOL_THERMAL))
        out.append(inequality(f"domination.repulsion_field[{t}]",
                              "log Tr e^{-beta H(B, 0, g', h')} - log Tr e^{-beta H(B, 0, g', 0)} <= 0", P,
                              worst_hp[beta], 0.0, TOL_THERMAL))
        out.append(identity(f"domination.pairing_field_zero[{t}]", "completed square at h = 0 reproduces Tr e^{-beta H}",
                            P, abs(log_trace_exp(e_h0, beta) - ref[beta])))
        out.append(identity(f"domination.repulsion_field_zero[{t}]",
                            "completed square at h' = 0 reproduces Tr e^{-beta H}", P,
                            abs(log_trace_exp(e_hp0, beta) - ref[beta])))
    return out


# ---------------------------------------------------------------- CORRELATION


def correlation_checks(lab, params, betas, seed=0, n_zeta=50, stream=0):
    b, lat = lab.basis, lab.lattice
    sd = lab.spectrum(params)
    out = []
    edges = [(i, lat.index(lat.shift(x, m)), m) for i, x in enumerate(lat.sites) for m in range(lat.d)]
    zetas = _rng(seed, 20, stream).uniform(-2, 2, size=(n_zeta, 2)) @ np.array([1, 1j])
    for beta in betas:
        st = ThermalState(sd, beta)
        P = {**lab.tag, **_point_dict(params, beta)}
        t = _tag(params, beta)

        nn = [st.expect(gamma_op(b, i, k) @ gamma_op(b, j, k)).real for i, j, _ in edges for k in (1, 2)]
        out.append(inequality(f"correlation.neighbour_sign[{t}]", "<G1_x G1_y>, <G2_x G2_y> <= 0 for |x-y| = 1",
                              P, nn, 0.0, TOL_THERMAL))

        pairs = []
        for x in range(lat.n_sites):
            for y in range(lat.n_sites):
                op = (creation_op(b, x, UP) @ creation_op(b, x, DOWN) @ annihilation_op(b, y, DOWN)
                      @ annihilation_op(b, y, UP))
                pairs.append(lat.sign(x) * lat.sign(y) * st.expect(op).real)
        out.append(inequality(f"correlation.pair_sign[{t}]", "s(x) s(y) <a+_xu a+_xd a_yd a_yu> >= 0",
                              P, 0.0, pairs, TOL_THERMAL))

        dens, docc, g1sq, zeta_vals = [], [], [], []
        for i in range(lat.n_sites):
            nu, nd = number_op(b, i, UP), number_op(b, i, DOWN)
            eu, ed = st.expect(nu), st.expect(nd)
            dens += [abs(eu - 0.5), abs(ed - 0.5)]
            eud = st.expect(nu @ nd)
            docc.append(eud.real)
            g1sq.append(st.expect(gamma_op(b, i, 1) @ gamma_op(b, i, 1)).real)
            for z in zetas:
                zeta_vals.append((eud - np.conj(z) * eu - z * ed + abs(z) ** 2).real)
        out.append(identity(f"correlation.half_filling[{t}]", "<n_x,s> = 1/2", P, max(dens), tol=TOL_THERMAL))
        out.append(inequality(f"correlation.double_occupancy[{t}]", "<n_up n_down> >= 1/4", P,
                              0.25, docc, TOL_THERMAL))
        out.append(inequality(f"correlation.gamma1_square[{t}]", "<G1_x^2> >= 1/2", P, 0.5, g1sq, TOL_THERMAL))
        out.append(inequality(f"correlation.density_zeta[{t}]", "<(n_up - z)(n_down - z*)> >= 0 for random complex z",
                              {**P, "n_zeta": n_zeta}, 0.0, zeta_vals, TOL_THERMAL))

        rel1 = "<G_x> = <G_{x + 2 e_m}> and <G_x G_y> = <G_{x+2e_m} G_{y+2e_m}>"
        if lat.L >= 2:
            worst = 0.0
            for m in range(lat.d):
                tr = [lat.index(lat.shift(x, m, 2)) for x in lat.sites]
                for k in (1, 2, 3):
                    one = [st.expect(gamma_op(b, i, k)) for i in range(lat.n_sites)]
                    worst = max(worst, max(abs(one[i] - one[tr[i]]) for i in range(lat.n_sites)))
                    for x in range(lat.n_sites):
                        for y in range(x + 1, lat.n_sites):
                            v = st.expect(gamma_op(b, x, k) @ gamma_op(b, y, k))
                            w = st.expect(gamma_op(b, tr[x], k) @ gamma_op(b, tr[y], k))
                            worst = max(worst, abs(v - w))
            out.append(identity(f"correlation.translation[{t}]", rel1, P, worst, tol=TOL_THERMAL))
        else:
            out.append(skipped(f"correlation.translation[{t}]", rel1, P, "needs 2L >= 4"))

        rel2 = "sum_x <G1_x G1_{x+e_1}> = sum_x <G1_x G1_{x+e_j}>"
        if lat.d >= 2:
            sums = []
            for m in range(lat.d):
                sums.append(sum(st.expect(gamma_op(b, i, 1) @ gamma_op(b, lat.index(lat.shift(x, m)), 1))
                                for i, x in enumerate(lat.sites)))
            out.append(identity(f"correlation.direction_independence[{t}]", rel2, P,
                                max(abs(s - sums[0]) for s in sums), tol=TOL_THERMAL))
        else:
            out.append(skipped(f"correlation.direction_independence[{t}]", rel2, P, "needs d >= 2"))

        e1 = mean_energies(sd, beta)["E1"]
        out.append(informational(f"correlation.xy_bond_energy[{t}]", "E1 <= sqrt(d(d+1))/2 (expected, not proven)",
                                 P, math.sqrt(lat.d * (lat.d + 1)) / 2 - e1, detail=f"E1={float(e1)!r}"))
    return out


# ---------------------------------------------------------------- INFRARED


def _e_shift(p):
    return float(bzconst.e_p(np.asarray(p) + np.pi))


def infrared_checks(lab, params, betas, R=1):
    b, lat = lab.basis, lab.lattice
    d = lat.d
    sd = lab.spectrum(params)
    out = []
    grid = dual_grid(lat)
    n = lat.n_sites
    hop = build_hop(b, params.kappa)
    Pp = {**lab.tag, **_point_dict(params)}
    tp = _tag(params)

    dc = [operator_norm(commutator(momentum_gamma(b, _neg(lat, p)), commutator(hop, momentum_gamma(b, p))),
                        lab.dense_cap) for p in grid]
    out.append(inequality(f"infrared.hop_double_commutator[{tp}]",
                          "||[G^_-p, [H_hop, G^_p]]|| <= 8 d |kappa|", Pp, max(dc), 8 * d * abs(params.kappa),
                          TOL_NORM))
    out += _ramp_commutator_checks(lab, params, R)

    for beta in betas:
        P = {**lab.tag, **_point_dict(params, beta)}
        t = _tag(params, beta)
        table = gbc_table(sd, beta)
        imag = max(max(abs(g.imag), abs(bb.imag), abs(c.imag)) for _, g, bb, c in table)
        out.append(identity(f"infrared.gbc_real[{t}]", "Im g_p = Im b_p = Im c_p = 0", P, imag, tol=TOL_THERMAL))
        cs = [c.real for *_, c in table]
        out.append(inequality(f"infrared.cp_positive[{t}]", "c_p >= 0", P, 0.0, min(cs), TOL_THERMAL))

        rows = [(p, g.real, bb.real, c.real, _e_shift(p)) for p, g, bb, c in table]
        off_q = [r for r in rows if r[4] > 1e-12]
        bp = np.array([r[2] for r in off_q])
        ep = np.array([r[4] for r in off_q])
        gp = np.array([r[1] for r in off_q])
        cp = np.array([max(r[3], 0.0) for r in off_q])
        bound = 1.0 / (2 * beta * params.g * ep)
        out.append(inequality(f"infrared.bp_bound[{t}]", "b_p <= 1 / (2 beta g E_{p+Q}) for p != Q", P,
                              bp, bound, TOL_INFRARED))
        out.append(inequality(f"infrared.bp_bound_second_order[{t}]",
                              "b_p <= 1 / (beta g E_{p+Q}) for p != Q (second-order domination constant)", P,
                              bp, 2 * bound, TOL_INFRARED))
        fb = 0.5 * (bp + np.sqrt(bp ** 2 + beta * bp * cp))
        out.append(inequality(f"infrared.falk_bruch[{t}]", "g_p <= (b_p + sqrt(b_p^2 + beta b_p c_p)) / 2", P,
                              gp, fb, TOL_INFRARED))
        chain = 0.5 * (bound + np.sqrt(bound ** 2 + beta * bound * cp))
        out.append(inequality(f"infrared.dls_chain[{t}]",
                              "g_p <= (b + sqrt(b^2 + beta b c_p)) / 2 with b = 1/(2 beta g E_{p+Q})", P,
                              gp, chain, TOL_INFRARED))

        st = ThermalState(sd, beta)
        mom = {p: st.expect(momentum_gamma(b, p) @ momentum_gamma(b, _neg(lat, p))).real for p in grid}
        left = sum(mom.values()) / n
        right = sum(st.expect(gamma_op(b, i, 1) @ gamma_op(b, i, 1)).real for i in range(n)) / n
        out.append(identity(f"infrared.sum_rule_order[{t}]", "(1/|L|) sum_p <G^_p G^_-p> = (1/|L|) sum_x <G1_x^2>",
                            P, abs(left - right), tol=TOL_THERMAL))
        en = mean_energies(sd, beta)
        kls = -sum(mom[p] * sum(np.cos(p)) for p in grid) / (d * n)
        out.append(identity(f"infrared.sum_rule_bond[{t}]", "-(1/(d|L|)) sum_p <G^_p G^_-p> sum_i cos p_i = E1", P,
                            abs(kls - en["E1"]), tol=TOL_THERMAL))
        out.append(inequality(f"infrared.bond_energy_nonnegative[{t}]", "E1 >= 0", P, 0.0, en["E1"], TOL_THERMAL))
        out.append(identity(f"infrared.free_energy_identity[{t}]", "F = E - S / beta", P,
                            abs(en["free_energy"] - (en["energy"] - en["entropy"] / beta)), tol=TOL_THERMAL))

        rel_cp = "(1/|L|) sum_p c_p <= 8 d |kappa| + 4 d g E1"
        rel_e = "-d |kappa| <= E_beta + d g E1"
        if params.gprime == 0 and params.B == 0:
            out.append(inequality(f"infrared.cp_sum_bound[{t}]", rel_cp, P, sum(cs) / n,
                                  8 * d * abs(params.kappa) + 4 * d * params.g * en["E1"], TOL_INFRARED))
            out.append(inequality(f"infrared.energy_bound[{t}]", rel_e, P, -d * abs(params.kappa),
                                  en["energy"] + d * params.g * en["E1"], TOL_INFRARED))
        else:
            why = "derived for g' = 0 and B = 0 only"
            out.append(skipped(f"infrared.cp_sum_bound[{t}]", rel_cp, P, why))
            out.append(skipped(f"infrared.energy_bound[{t}]", rel_e, P, why))
    return out


def _ramp_commutator_checks(lab, params, R):
    b, lat = lab.basis, lab.lattice
    d = lat.d
    P = {**lab.tag, **_point_dict(params), "R": R}
    t = f"{_tag(params)};R={R}"
    names = [("infrared.ramp_hop_double_commutator", "||[[C, H_hop,s], C]|| <= 32 d |kappa| (4R+1)^d / R^2"),
             ("infrared.ramp_int_double_commutator", "||[[C, H_int], C]|| <= 128 d g (4R+1)^d / R^2"),
             ("infrared.ramp_field_double_commutator", "||[[C, B O], C]|| <= 8 |B| (4R+1)^d"),
             ("infrared.ramp_field_double_commutator_exact",
              "||[[C, B O], C]|| <= 4 |B| sum_x h~'(x)^2")]
    if not lab.ramp_fits(R):
        return [skipped(f"{nm}[{t}]", rel, P, f"ramp of radius {R} needs 4R+1 <= 2L") for nm, rel in names]
    fc = ramp(lat, R)
    C = gamma3_weighted(b, fc.htilde)
    vol = (4 * R + 1) ** d

    def dcn(X):
        return operator_norm(commutator(commutator(C, X), C), lab.dense_cap)

    hop = max(dcn(build_hop(b, params.kappa, spins=(s,))) for s in (UP, DOWN))
    inter = dcn(build_int(b, params.g, params.gprime))
    fld = dcn(params.B * build_order_param(b))
    return [
        inequality(f"{names[0][0]}[{t}]", names[0][1], P, hop, 32 * d * abs(params.kappa) * vol / R ** 2, TOL_NORM),
        inequality(f"{names[1][0]}[{t}]", names[1][1], P, inter, 128 * d * params.g * vol / R ** 2, TOL_NORM),
        inequality(f"{names[2][0]}[{t}]", names[2][1], P, fld, 8 * abs(params.B) * vol, TOL_NORM),
        inequality(f"{names[3][0]}[{t}]", names[3][1], P, fld,
                   4 * abs(params.B) * float(np.sum(fc.htilde ** 2)), TOL_NORM),
    ]


# ---------------------------------------------------------------- VARIATIONAL


def variational_state(b):
    """``prod_odd (1 - G+_x)/sqrt2 prod_even (1 + G+_x)/sqrt2 |0>``."""
    lat = b.lattice
    v = b.vacuum()
    for i in range(lat.n_sites):
        v = (v + lat.sign(i) * (gamma_op(b, i, "+").mat @ v)) / np.sqrt(2)
    return v


def variational_checks(lab, params):
    b, lat = lab.basis, lab.lattice
    d, n = lat.d, lat.n_sites
    P = {**lab.tag, **_point_dict(params), "boundary": "periodic"}
    t = _tag(params)
    HP = build_full(b, params, boundary="periodic")
    v = variational_state(b)
    energy = np.vdot(v, HP.mat @ v)
    target = -d * params.g * n / 2
    e0 = block_spectrum(HP, b)[0]
    return [
        identity(f"variational.state_norm[{t}]", "||Phi_var|| = 1", P, abs(np.vdot(v, v) - 1), tol=TOL_THERMAL),
        identity(f"variational.trial_energy[{t}]", "<Phi_var, H_P Phi_var> = -(d g / 2) |L|", P,
                 abs(energy - target), tol=TOL_THERMAL, detail=f"energy={float(energy.real)!r}"),
        inequality(f"variational.ground_energy[{t}]", "E_0(H_P) / |L| <= -d g / 2", P, e0 / n, -d * params.g / 2,
                   TOL_THERMAL),
    ]


# ---------------------------------------------------------------- NGMODE


def ngmode_checks(lab, params, betas, R=1, epsilon=0.25, filter_upper=1.0):
    b, lat = lab.basis, lab.lattice
    Pp = {**lab.tag, **_point_dict(params), "R": R, "epsilon": epsilon}
    tp = f"{_tag(params)};R={R}"
    names = ("ngmode.susceptibility_bound", "ngmode.bogoliubov", "ngmode.trial_energy_nonnegative",
             "ngmode.trial_energy_eps0", "ngmode.filter_support", "ngmode.filter_moment", "ngmode.ground_gamma3")
    if not lab.ramp_fits(R):
        why = f"ramp of radius {R} needs 4R+1 <= 2L"
        return [skipped(f"{nm}[{tp}]", "needs the ramp field", Pp, why) for nm in names]

    sd = lab.spectrum(params)
    fc = ramp(lat, R)
    C = gamma3_weighted(b, fc.htilde)
    A = local_order_op(b, R)
    H = sd.H
    out = []
    sum_h2 = float(np.sum(fc.hprime ** 2))
    dch = commutator(C.H, commutator(H, C))
    for beta in betas:
        P = {**Pp, "beta": float(beta)}
        t = f"{tp};beta={beta:g}"
        rel = "(beta/2) (C, C) <= sum h'^2 / (4 g')"
        if params.gprime > 0:
            lhs = beta / 2 * duhamel(sd, C, C, beta).real
            out.append(inequality(f"ngmode.susceptibility_bound[{t}]", rel, P, lhs, sum_h2 / (4 * params.gprime),
                                  TOL_INFRARED))
        else:
            out.append(skipped(f"ngmode.susceptibility_bound[{t}]", rel, P, "needs g' > 0"))
        st = ThermalState(sd, beta)
        lhs = abs(st.expect(commutator(C, A))) ** 2
        rhs = beta / 2 * st.expect(dch).real * st.expect(anticommutator(A, A.H)).real
        out.append(inequality(f"ngmode.bogoliubov[{t}]", "|<[C, A]>|^2 <= (beta/2) <[C+, [H, C]]> <{A, A+}>", P,
                              lhs, rhs, TOL_INFRARED))

    phi = trial_energy(sd, A, epsilon)
    out.append(inequality(f"ngmode.trial_energy_nonnegative[{tp}]", "phi(H - E0) >= 0", Pp, 0.0, phi, TOL_THERMAL,
                          detail=f"phi={float(phi)!r}"))
    gv = sd.ground_vectors()
    shifted = H - sd.E0 * b.identity()
    av = A.mat @ gv
    num = np.mean(np.einsum("ik,ik->k", av.conj(), shifted.mat @ av).real)
    den = np.mean(np.einsum("ik,ik->k", av.conj(), av).real)
    out.append(identity(f"ngmode.trial_energy_eps0[{tp}]", "phi at eps = 0 equals w(A+ H~ A) / w(A+ A)", Pp,
                        abs(trial_energy(sd, A, 0.0) - num / den), tol=TOL_THERMAL))

    chi = bump(0.0, filter_upper)
    filtered = filter_vectors(sd, chi, gv)
    out.append(identity(f"ngmode.filter_support[{tp}]", "chi(H - E0) Phi_0 = 0 for chi supported in (0, dE1)",
                        {**Pp, "dE1": filter_upper}, float(np.max(np.abs(filtered))) if filtered.size else 0.0))
    psi = filter_vectors(sd, chi, av)
    direct = np.mean(np.einsum("ik,ik->k", psi.conj(), shifted.mat @ psi).real)
    spectral = ground_spectral_moment(sd, A, lambda e: chi(e) ** 2 * e)
    out.append(identity(f"ngmode.filter_moment[{tp}]", "w(A+ chi H~ chi A) equals its eigen-sum",
                        {**Pp, "dE1": filter_upper}, abs(direct - spectral), tol=TOL_THERMAL))
    g3 = max(abs(np.mean(np.einsum("ik,ik->k", gv.conj(), gamma_op(b, i, 3).mat @ gv))) for i in range(lat.n_sites))
    out.append(identity(f"ngmode.ground_gamma3[{tp}]", "w(G3_x) = 0", Pp, g3, tol=TOL_THERMAL))
    box = omega_sites(lat, R)
    ms = np.mean([lat.sign(i) * np.mean(np.einsum("ik,ik->k", gv.conj(), gamma_op(b, i, 2).mat @ gv)).real
                  for i in box])
    out.append(informational(f"ngmode.staggered_magnetization[{tp}]", "m_s(B) on Omega_R (reported only)", Pp, ms))
    ms50 = np.mean([lat.sign(i) * thermal_expectation(sd, gamma_op(b, i, 2), 50.0).real for i in box])
    out.append(identity(f"ngmode.ground_vs_beta50[{tp}]", "m_s from the ground sector = m_s at beta = 50",
                        Pp, abs(ms - ms50), tol=1e-6))
    return out


# ---------------------------------------------------------------- driver


def worker_count():
    raw = os.environ.get("RPBCS_THREADS")
    if raw is None:
        return max(1, min(4, os.cpu_count() or 1))
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"RPBCS_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise ConfigError(f"RPBCS_THREADS must be a positive integer, got {raw!r}")
    return n


def _resolve_suites(suite):
    names = [s.strip().upper() for s in str(suite).split(",") if s.strip()]
    if not names or names == ["ALL"]:
        return list(SUITES)
    bad = [s for s in names if s not in SUITES]
    if bad:
        raise ConfigError(f"unknown suite(s) {bad}; choose from {list(SUITES)} or ALL")
    return names


def run_suite(suite="ALL", d=1, L=2, points=None, betas=None, seed=0, n_draws=200, n_zeta=50, R=1,
              epsilon=0.25, dense_cap=DEFAULT_DENSE_CAP, tolerance=None, lab=None):
    """Run one suite (or a comma list, or ``ALL``) and return a report.

    ``points`` is a list of ``ModelParams``; when omitted each suite uses its
    own default grid.  ``tolerance`` overrides every per-check tolerance.
    """
    names = _resolve_suites(suite)
    if tolerance is not None and not (np.isfinite(tolerance) and tolerance >= 0):
        raise ConfigError(f"tolerance must be finite and >= 0, got {tolerance!r}")
    betas = tuple(float(x) for x in (betas or DEFAULT_BETAS))
    if any(not np.isfinite(x) or x <= 0 for x in betas):
        raise ConfigError("every beta must be finite and > 0")
    if n_draws < 1 or n_zeta < 0 or R < 1 or epsilon < 0:
        raise ConfigError("need draws >= 1, zeta count >= 0, R >= 1, epsilon >= 0")
    if points is not None:
        points = tuple(points)
        if not points:
            raise ConfigError("points must be nonempty")
    for s in ("INFRARED", "NGMODE", "VARIATIONAL"):
        if s in names and any(p.g <= 0 for p in (points or DEFAULT_POINTS)):
            raise ConfigError(f"suite {s} needs g > 0")
    lab = lab or Lab(d, L, dense_cap)

    jobs = []
    if "ALGEBRA" in names:
        jobs.append(lambda: algebra_checks(lab, seed, R))
    if "GAUGE" in names:
        jobs.append(lambda: gauge_checks(lab, seed))
    for k, pt in enumerate(points or DOMINATION_POINTS):
        if "DOMINATION" in names:
            jobs.append(lambda pt=pt, k=k: domination_checks(lab, pt, betas, seed, n_draws, k))
    for k, pt in enumerate(points or DEFAULT_POINTS):
        if "CORRELATION" in names:
            jobs.append(lambda pt=pt, k=k: correlation_checks(lab, pt, betas, seed, n_zeta, k))
        if "INFRARED" in names:
            jobs.append(lambda pt=pt: infrared_checks(lab, pt, betas, R))
        if "VARIATIONAL" in names:
            jobs.append(lambda pt=pt: variational_checks(lab, pt))
    for pt in points or NGMODE_POINTS:
        if "NGMODE" in names:
            jobs.append(lambda pt=pt: ngmode_checks(lab, pt, betas, R, epsilon))

    with ThreadPoolExecutor(max_workers=worker_count()) as pool:
        results = list(pool.map(lambda job: job(), jobs))
    checks = sorted((c for chunk in results for c in chunk), key=lambda c: c.name)
    seen = set()
    for c in checks:
        if c.name in seen:
            raise RuntimeError(f"duplicate check name {c.name}")
        seen.add(c.name)
    if tolerance is not None:
        checks = [c if c.status in ("skipped", "informational")
                  else replace(c, tolerance=float(tolerance), status=_status(c.margin, tolerance)) for c in checks]
    used = sorted({p for p in (points or DEFAULT_POINTS + DOMINATION_POINTS + NGMODE_POINTS)},
                  key=lambda p: (p.kappa, p.g, p.gprime, p.B))
    return VerificationReport(
        suite="ALL" if names == list(SUITES) else ",".join(names),
        seed=int(seed),
        lattice=lab.tag,
        points=[_point_dict(p) for p in used],
        betas=list(betas),
        checks=checks,
    )
