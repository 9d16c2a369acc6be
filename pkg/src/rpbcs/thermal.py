"""Spectral decomposition and thermal quantities.

Hamiltonians are diagonalized block by block.  Blocks are the connected
groups of ``(sz, parity)`` sectors coupled by the Hamiltonian; for every model
in this package that is just the ``sz`` sectors.  All Boltzmann weights are
taken relative to the ground energy ``E0`` so large ``beta`` cannot overflow.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as la
import scipy.sparse.linalg as spla
from scipy.sparse.csgraph import connected_components
from scipy.special import logsumexp

from .fock import CapError, OperatorMatrix, gamma_op, momentum_gamma
from .lattice import dual_grid

DEFAULT_DENSE_CAP = 4096
DEGENERACY_RTOL = 1e-9
DUHAMEL_GAP = 1e-12


@dataclass
class SectorBlock:
    label: tuple
    index: np.ndarray
    energies: np.ndarray
    vectors: np.ndarray = field(repr=False)


class SpectralData:
    """Eigendecomposition of ``H`` with cached partition functions."""

    def __init__(self, H, basis, blocks, degeneracy_rtol=DEGENERACY_RTOL):
        self.H = H
        self.basis = basis
        self.blocks = blocks
        self.E0 = min(float(bl.energies[0]) for bl in blocks)
        self.degeneracy_tol = degeneracy_rtol * max(1.0, abs(self.E0))
        self.q = sum(int(np.sum(bl.energies - self.E0 <= self.degeneracy_tol)) for bl in blocks)
        self._logz = {}

    @property
    def dim(self):
        return sum(len(bl.index) for bl in self.blocks)

    def energies(self):
        return np.sort(np.concatenate([bl.energies for bl in self.blocks]))

    def boltzmann(self, bl, beta):
        return np.exp(-beta * (bl.energies - self.E0))

    def log_partition(self, beta):
        """``log Tr exp(-beta H)``."""
        beta = float(beta)
        if beta not in self._logz:
            s = sum(float(np.sum(self.boltzmann(bl, beta))) for bl in self.blocks)
            self._logz[beta] = np.log(s) - beta * self.E0
        return self._logz[beta]

    def shifted_partition(self, beta):
        """``Tr exp(-beta (H - E0))``."""
        return float(np.exp(self.log_partition(beta) + beta * self.E0))

    def block_matrix(self, A, s, t):
        """``V_s^dagger A[s, t] V_t`` as a dense array."""
        bs, bt = self.blocks[s], self.blocks[t]
        sub = A.mat[bs.index][:, bt.index]
        if sub.nnz == 0:
            return None
        return bs.vectors.conj().T @ (sub @ bt.vectors)

    def coupled_blocks(self, A):
        """Pairs ``(s, t)`` with a nonzero block of ``A``."""
        owner = np.empty(self.dim, dtype=np.int64)
        for s, bl in enumerate(self.blocks):
            owner[bl.index] = s
        coo = A.mat.tocoo()
        mask = coo.data != 0
        return sorted(set(zip(owner[coo.row[mask]].tolist(), owner[coo.col[mask]].tolist())))

    def ground_vectors(self):
        """Full-space ground-state eigenvectors, one column each."""
        cols = []
        for bl in self.blocks:
            sel = np.flatnonzero(bl.energies - self.E0 <= self.degeneracy_tol)
            for k in sel:
                v = np.zeros(self.dim, dtype=complex)
                v[bl.index] = bl.vectors[:, k]
                cols.append(v)
        return np.array(cols).T


def _sector_groups(H, basis):
    """Union the ``(sz, parity)`` sectors that ``H`` couples."""
    sectors = basis.sectors()
    keys = list(sectors)
    owner = np.empty(basis.dim, dtype=np.int64)
    for k, key in enumerate(keys):
        owner[sectors[key]] = k
    parent = list(range(len(keys)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    coo = H.mat.tocoo()
    mask = coo.data != 0
    for r, c in set(zip(owner[coo.row[mask]].tolist(), owner[coo.col[mask]].tolist())):
        ra, rb = find(r), find(c)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
    groups = {}
    for k in range(len(keys)):
        groups.setdefault(find(k), []).append(k)
    out = []
    for members in groups.values():
        idx = np.sort(np.concatenate([sectors[keys[k]] for k in members]))
        label = tuple(keys[k] for k in members) if len(members) > 1 else keys[members[0]]
        out.append((label, idx))
    return out


def diagonalize(H, basis, dense_cap=DEFAULT_DENSE_CAP, degeneracy_rtol=DEGENERACY_RTOL):
    """Sector-blocked dense eigendecomposition of a hermitian ``H``."""
    err = H.hermiticity_error()
    if err > 1e-12 * max(1.0, np.max(np.abs(H.mat.data)) if H.mat.nnz else 1.0):
        raise ValueError(f"Hamiltonian is not hermitian (error {err:.3g})")
    groups = _sector_groups(H, basis)
    largest = max(len(idx) for _, idx in groups)
    if largest > dense_cap:
        raise CapError(f"sector block of size {largest} exceeds the dense cap {dense_cap}")
    blocks = []
    for label, idx in groups:
        sub = H.mat[idx][:, idx].toarray()
        sub = 0.5 * (sub + sub.conj().T)
        w, v = la.eigh(sub)
        blocks.append(SectorBlock(label, idx, w, v))
    return SpectralData(H, basis, blocks, degeneracy_rtol)


def block_spectrum(H, basis):
    """Eigenvalues only, sector by sector, concatenated and sorted."""
    parts = []
    for _, idx in _sector_groups(H, basis):
        sub = H.mat[idx][:, idx].toarray()
        parts.append(la.eigvalsh(0.5 * (sub + sub.conj().T)))
    return np.sort(np.concatenate(parts))


def log_trace_exp(energies, beta):
    """``log sum exp(-beta E)`` without overflow."""
    return float(logsumexp(-beta * np.asarray(energies)))


class ThermalState:
    """Block-diagonal Gibbs density matrix at one ``beta``.

    Cheaper than ``thermal_expectation`` when many observables are needed.
    """

    def __init__(self, sd, beta):
        z = sd.shifted_partition(beta)
        self.beta = beta
        self.blocks = [(bl.index, (bl.vectors * (sd.boltzmann(bl, beta) / z)) @ bl.vectors.conj().T)
                       for bl in sd.blocks]

    def expect(self, A):
        total = 0.0 + 0.0j
        for idx, rho in self.blocks:
            sub = A.mat[idx][:, idx]
            if sub.nnz:
                total += sub.multiply(rho.T).sum()
        return complex(total)


def thermal_expectation(sd, A, beta):
    """``Tr(A exp(-beta H)) / Z``."""
    total = 0.0 + 0.0j
    for s, bl in enumerate(sd.blocks):
        m = sd.block_matrix(A, s, s)
        if m is not None:
            total += np.sum(sd.boltzmann(bl, beta) * np.diag(m))
    return total / sd.shifted_partition(beta)


def duhamel_weights(Ea, Eb, beta, E0=0.0):
    """``(e^{-beta Ea} - e^{-beta Eb}) / (beta (Eb - Ea))`` on the outer grid.

    Energies are shifted by ``E0``; pairs closer than ``1e-12`` use the
    limit ``e^{-beta Ea}``.
    """
    a = beta * (np.asarray(Ea)[:, None] - E0)
    bb = beta * (np.asarray(Eb)[None, :] - E0)
    gap = np.abs(np.asarray(Ea)[:, None] - np.asarray(Eb)[None, :])
    x = np.abs(bb - a)
    lo = np.exp(-np.minimum(a, bb))
    with np.errstate(invalid="ignore", divide="ignore"):
        f = np.where(x > 0, -np.expm1(-x) / np.where(x > 0, x, 1.0), 1.0)
    f = np.where(gap < DUHAMEL_GAP, 1.0, f)
    return lo * f


def duhamel(sd, A, B, beta):
    """Duhamel two-point function ``(A, B)``."""
    total = 0.0 + 0.0j
    for s, t in sd.coupled_blocks(A):
        a = sd.block_matrix(A, s, t)
        b = sd.block_matrix(B, t, s)
        if a is None or b is None:
            continue
        w = duhamel_weights(sd.blocks[s].energies, sd.blocks[t].energies, beta, sd.E0)
        total += np.sum(a * b.T * w)
    return total / sd.shifted_partition(beta)


def gbc_at_p(sd, p, beta):
    """``(g_p, b_p, c_p)`` for the Fourier mode of ``Gamma^(1)`` at ``p``."""
    b = sd.basis
    gp = momentum_gamma(b, p)
    gm = gp.H
    g_val = 0.5 * (thermal_expectation(sd, gp @ gm, beta) + thermal_expectation(sd, gm @ gp, beta))
    b_val = duhamel(sd, gp, gm, beta)
    inner = sd.H @ gp - gp @ sd.H
    c_val = thermal_expectation(sd, gm @ inner - inner @ gm, beta)
    return g_val, b_val, c_val


def gbc_table(sd, beta):
    """``[(p, g_p, b_p, c_p), ...]`` over the dual grid."""
    return [(p,) + gbc_at_p(sd, p, beta) for p in dual_grid(sd.basis.lattice)]


def lro(sd, beta):
    """``m_LRO`` from the ``Q = (pi, ..., pi)`` mode of ``Gamma^(1)``."""
    lat = sd.basis.lattice
    gq = momentum_gamma(sd.basis, (np.pi,) * lat.d)
    m2 = thermal_expectation(sd, gq @ gq, beta).real / lat.n_sites
    return float(np.sqrt(max(m2, 0.0)))


def lro_position_space(sd, beta):
    """``m_LRO**2`` as the signed double sum over sites."""
    b = sd.basis
    lat = b.lattice
    total = 0.0
    for x in range(lat.n_sites):
        for y in range(lat.n_sites):
            op = gamma_op(b, x, 1) @ gamma_op(b, y, 1)
            total += lat.sign(x) * lat.sign(y) * thermal_expectation(sd, op, beta).real
    return total / lat.n_sites ** 2


def ground_expectation(sd, A):
    """Average of ``<Phi, A Phi>`` over the ground-state sector."""
    phi = sd.ground_vectors()
    vals = np.einsum("ik,ik->k", phi.conj(), A.mat @ phi)
    return complex(np.mean(vals))


def excitation_energies(sd, bl):
    """``H - E0`` on one block with the ground sector pinned to exactly 0."""
    e = bl.energies - sd.E0
    return np.where(e <= sd.degeneracy_tol, 0.0, e)


def _ground_overlaps(sd, A):
    """Per block: ``|<n| A |Phi_mu>|^2`` summed over ground states ``mu``."""
    phi = sd.ground_vectors()
    psi = A.mat @ phi
    return [np.sum(np.abs(bl.vectors.conj().T @ psi[bl.index]) ** 2, axis=1) for bl in sd.blocks]


def ground_spectral_moment(sd, A, f):
    """``omega(A^dagger f(H - E0) A)`` with ``f`` applied on the spectrum."""
    weights = _ground_overlaps(sd, A)
    total = sum(float(np.sum(w * f(excitation_energies(sd, bl)))) for w, bl in zip(weights, sd.blocks))
    return total / sd.q


class DegenerateTrialError(ArithmeticError):
    pass


def trial_energy(sd, A, eps):
    """``omega(A^dag H~^{1+eps} A) / omega(A^dag H~^eps A)`` with ``H~ = H - E0``.

    ``0**0`` is taken as 1, so at ``eps = 0`` the ground sector contributes
    to the denominator.
    """
    if eps < 0:
        raise ValueError("eps must be >= 0")

    def power(e, k):
        if k == 0:
            return np.ones_like(e)
        return np.where(e > 0, np.abs(e) ** k, 0.0)

    num = ground_spectral_moment(sd, A, lambda e: power(e, 1 + eps))
    den = ground_spectral_moment(sd, A, lambda e: power(e, eps))
    if den <= 0:
        raise DegenerateTrialError("trial state has zero norm")
    return num / den


def bump(delta, upper):
    """Smooth bump ``exp(-1/(t(1-t)))`` rescaled to the open interval ``(delta, upper)``."""
    if not 0 <= delta < upper:
        raise ValueError("need 0 <= delta < upper")

    def chi(e):
        t = (np.asarray(e, dtype=float) - delta) / (upper - delta)
        inside = (t > 0) & (t < 1)
        out = np.zeros_like(t)
        tt = t[inside]
        out[inside] = np.exp(-1.0 / (tt * (1 - tt)))
        return out

    return chi


def spectral_filter(sd, A, chi):
    """``chi(H - E0) A`` via the eigenbasis."""
    out = np.zeros((sd.dim, sd.dim), dtype=complex)
    dense = A.toarray()
    for bl in sd.blocks:
        vals = chi(excitation_energies(sd, bl))
        proj = (bl.vectors * vals) @ bl.vectors.conj().T
        out[bl.index] += proj @ dense[bl.index]
    return OperatorMatrix(out, False, A.parity)


def filter_vectors(sd, chi, V):
    """``chi(H - E0) V`` for the columns of ``V``, without forming the operator."""
    V = np.asarray(V, dtype=complex)
    out = np.zeros_like(V)
    for bl in sd.blocks:
        vals = chi(excitation_energies(sd, bl))
        coef = bl.vectors.conj().T @ V[bl.index]
        out[bl.index] = bl.vectors @ (vals[:, None] * coef)
    return out


def mean_energies(sd, beta):
    """Per-site energy, bond energy ``E1``, free energy and entropy.

    ``E1 = -(1/2|L|) sum_x <G1_x G1_{x+e1} + G1_x G1_{x-e1}>``.
    """
    b = sd.basis
    lat = b.lattice
    n = lat.n_sites
    e1 = 0.0
    for i, x in enumerate(lat.sites):
        fwd = lat.index(lat.shift(x, 0, 1))
        bwd = lat.index(lat.shift(x, 0, -1))
        op = gamma_op(b, i, 1) @ (gamma_op(b, fwd, 1) + gamma_op(b, bwd, 1))
        e1 += thermal_expectation(sd, op, beta).real
    e1 = -e1 / (2 * n)
    energy = thermal_expectation(sd, sd.H, beta).real / n
    logz = sd.log_partition(beta)
    free = -logz / (beta * n) if beta > 0 else -np.inf
    z = sd.shifted_partition(beta)
    entropy = 0.0
    for bl in sd.blocks:
        p = sd.boltzmann(bl, beta) / z
        nz = p > 0
        entropy -= float(np.sum(p[nz] * np.log(p[nz])))
    return {"energy": energy, "E1": e1, "free_energy": free, "entropy": entropy / n}


def operator_norm(A, dense_cap=DEFAULT_DENSE_CAP, tol=1e-8):
    """Largest singular value.

    The matrix is split into the connected components of its sparsity graph;
    each component is solved by dense SVD, or by Lanczos when it is larger
    than ``dense_cap``.
    """
    m = A.mat.copy()
    m.eliminate_zeros()
    if m.nnz == 0:
        return 0.0
    pattern = abs(m) + abs(m).T
    n_comp, labels = connected_components(pattern, directed=False)
    order = np.argsort(labels, kind="stable")
    bounds = np.searchsorted(labels[order], np.arange(n_comp + 1))
    best = 0.0
    for c in range(n_comp):
        idx = order[bounds[c]:bounds[c + 1]]
        sub = m[idx][:, idx]
        if sub.nnz == 0:
            continue
        if len(idx) <= dense_cap:
            val = np.linalg.norm(sub.toarray(), 2)
        else:
            val = spla.svds(sub, k=1, tol=tol, return_singular_vectors=False)[0]
        best = max(best, float(val))
    return best


@dataclass
class ThermalReport:
    beta: float
    params: dict
    observables: dict
    m_lro: float
    gbc: list
