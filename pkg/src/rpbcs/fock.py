"""Spinful fermionic Fock space and second-quantized operators.

Basis states are occupation bitstrings: bit ``k`` of a state index is the
occupation of the ``k``-th mode in ``FockBasis.mode_order``.  Creation
operators carry the Jordan-Wigner sign ``(-1)**(number of occupied modes
before k)``.  All operators are stored as ``scipy.sparse`` CSR matrices with
exact ``0, +-1, +-i`` entries at construction time.
"""

from __future__ import annotations

import numbers

import numpy as np
import scipy.sparse as sp

from .lattice import ConfigError, GeometryError, on_dual_grid, omega_sites

UP, DOWN = 0, 1

DEFAULT_OPERATOR_CAP = 65536


class CapError(RuntimeError):
    """A requested object exceeds a configured size cap."""


def _combine_parity(p, q, product):
    if "mixed" in (p, q):
        return "mixed"
    if product:
        return "even" if p == q else "odd"
    return p if p == q else "mixed"


class OperatorMatrix:
    """Sparse matrix of a second-quantized operator.

    Arithmetic (``+ - @``, scalar ``*``) returns new instances and tracks
    the hermitian flag and the fermion parity where this is cheap to do.
    """

    __slots__ = ("mat", "hermitian", "parity")

    def __init__(self, mat, hermitian=False, parity="mixed"):
        self.mat = sp.csr_matrix(mat, dtype=complex)
        self.hermitian = bool(hermitian)
        self.parity = parity

    @property
    def dim(self):
        return self.mat.shape[0]

    @property
    def nnz(self):
        self.mat.eliminate_zeros()
        return self.mat.nnz

    @property
    def H(self):
        return OperatorMatrix(self.mat.conj().T, self.hermitian, self.parity)

    def toarray(self):
        return self.mat.toarray()

    def _check(self, other):
        if not isinstance(other, OperatorMatrix):
            return NotImplemented
        if other.dim != self.dim:
            raise ValueError(f"dimension mismatch {self.dim} vs {other.dim}")
        return other

    def __add__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(self.mat + other.mat, self.hermitian and other.hermitian,
                              _combine_parity(self.parity, other.parity, False))

    def __sub__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(self.mat - other.mat, self.hermitian and other.hermitian,
                              _combine_parity(self.parity, other.parity, False))

    def __neg__(self):
        return OperatorMatrix(-self.mat, self.hermitian, self.parity)

    def __mul__(self, c):
        if not isinstance(c, numbers.Number):
            return NotImplemented
        real = complex(c).imag == 0
        return OperatorMatrix(self.mat * c, self.hermitian and real, self.parity)

    __rmul__ = __mul__

    def __truediv__(self, c):
        return self * (1.0 / c)

    def __matmul__(self, other):
        if self._check(other) is NotImplemented:
            return NotImplemented
        return OperatorMatrix(self.mat @ other.mat, False,
                              _combine_parity(self.parity, other.parity, True))

    def __repr__(self):
        return f"OperatorMatrix(dim={self.dim}, nnz={self.mat.nnz}, hermitian={self.hermitian}, parity={self.parity})"

    def distance(self, other):
        """``max |A_ij - B_ij|``."""
        diff = (self.mat - other.mat).tocoo()
        return float(np.max(np.abs(diff.data))) if diff.nnz else 0.0

    def hermiticity_error(self):
        return self.distance(self.H)

    def as_hermitian(self, tol=1e-13):
        """Set the hermitian flag after verifying ``A = A^dagger`` to ``tol``."""
        err = self.hermiticity_error()
        if err > tol:
            raise ValueError(f"operator is not hermitian (error {err:.3g})")
        return OperatorMatrix(self.mat, True, self.parity)


def commutator(a, b):
    return a @ b - b @ a


def anticommutator(a, b):
    return a @ b + b @ a


class FockBasis:
    """Occupation-number basis over ``|Lambda|`` sites with spin up/down.

    ``mode_order`` lists ``(site, spin)`` pairs; the default is site-major
    with spin up before spin down.
    """

    def __init__(self, lat, mode_order=None, cap=DEFAULT_OPERATOR_CAP):
        n_modes = 2 * lat.n_sites
        if mode_order is None:
            mode_order = tuple((s, sig) for s in range(lat.n_sites) for sig in (UP, DOWN))
        mode_order = tuple((int(s), int(sig)) for s, sig in mode_order)
        if sorted(mode_order) != [(s, sig) for s in range(lat.n_sites) for sig in (UP, DOWN)]:
            raise ConfigError("mode_order must list every (site, spin) pair exactly once")
        dim = 1 << n_modes
        if dim > cap:
            raise CapError(f"Fock dimension {dim} exceeds the operator cap {cap}")
        self.lattice = lat
        self.n_modes = n_modes
        self.dim = dim
        self.mode_order = mode_order
        self.position = {m: k for k, m in enumerate(mode_order)}
        self.states = np.arange(dim, dtype=np.int64)
        up_mask = sum(1 << k for k, (_, sig) in enumerate(mode_order) if sig == UP)
        down_mask = sum(1 << k for k, (_, sig) in enumerate(mode_order) if sig == DOWN)
        n_up = np.bitwise_count(self.states & up_mask).astype(np.int64)
        n_down = np.bitwise_count(self.states & down_mask).astype(np.int64)
        self.sz = n_up - n_down
        self.parity = (n_up + n_down) % 2
        self._cache = {}

    def sector_of(self, state):
        return int(self.sz[state]), int(self.parity[state])

    def sectors(self):
        """Map ``(sz, parity)`` -> sorted array of state indices."""
        out = {}
        for key in sorted(set(zip(self.sz.tolist(), self.parity.tolist()))):
            out[key] = np.flatnonzero((self.sz == key[0]) & (self.parity == key[1]))
        return out

    def mode(self, x, sigma):
        site = self.lattice.index(x)
        if sigma not in (UP, DOWN):
            raise ConfigError(f"spin must be 0 (up) or 1 (down), got {sigma!r}")
        return self.position[(site, sigma)]

    def identity(self):
        return OperatorMatrix(sp.identity(self.dim, dtype=complex, format="csr"), True, "even")

    def zero(self):
        return OperatorMatrix(sp.csr_matrix((self.dim, self.dim), dtype=complex), True, "even")

    def diagonal(self, values, hermitian=None):
        values = np.asarray(values)
        if hermitian is None:
            hermitian = not np.iscomplexobj(values) or not np.any(values.imag)
        return OperatorMatrix(sp.diags(values.astype(complex), format="csr"), hermitian, "even")

    def occupation(self, x, sigma):
        """0/1 array: occupation of mode ``(x, sigma)`` in every basis state."""
        return (self.states >> self.mode(x, sigma)) & 1

    def vacuum(self):
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v


def build_basis(lat, mode_order=None, cap=DEFAULT_OPERATOR_CAP):
    return FockBasis(lat, mode_order=mode_order, cap=cap)


def _cached(b, key, factory):
    op = b._cache.get(key)
    if op is None:
        op = factory()
        b._cache[key] = op
    return op


def creation_op(b, x, sigma):
    """Matrix of ``a^dagger_{x, sigma}``."""
    k = b.mode(x, sigma)

    def make():
        s = b.states
        src = s[((s >> k) & 1) == 0]
        sign = 1 - 2 * (np.bitwise_count(src & ((1 << k) - 1)).astype(np.int64) & 1)
        mat = sp.csr_matrix((sign.astype(complex), (src | (1 << k), src)), shape=(b.dim, b.dim))
        return OperatorMatrix(mat, False, "odd")

    return _cached(b, ("cdag", k), make)


def annihilation_op(b, x, sigma):
    return _cached(b, ("c", b.mode(x, sigma)), lambda: creation_op(b, x, sigma).H)


def number_op(b, x, sigma):
    return _cached(b, ("n", b.mode(x, sigma)), lambda: b.diagonal(b.occupation(x, sigma).astype(float)))


def total_number(b):
    return b.diagonal(np.bitwise_count(b.states).astype(float))


def sz_op(b):
    return b.diagonal(b.sz.astype(float))


def parity_op(b):
    """``(-1)**N``."""
    return b.diagonal(1.0 - 2.0 * b.parity)


def gamma_op(b, x, kind):
    """Local pairing operators.

    ``kind`` is ``"+"`` for ``a^dag_up a^dag_down``, ``"-"`` for
    ``a_down a_up``, and 1, 2, 3 for ``G+ + G-``, ``i(G+ - G-)`` and
    ``1 - n_up - n_down``.
    """
    site = b.lattice.index(x)
    kind = str(kind)

    def make():
        if kind == "+":
            op = creation_op(b, site, UP) @ creation_op(b, site, DOWN)
        elif kind == "-":
            op = annihilation_op(b, site, DOWN) @ annihilation_op(b, site, UP)
        elif kind == "1":
            op = gamma_op(b, site, "+") + gamma_op(b, site, "-")
        elif kind == "2":
            op = 1j * (gamma_op(b, site, "+") - gamma_op(b, site, "-"))
        elif kind == "3":
            op = b.identity() - number_op(b, site, UP) - number_op(b, site, DOWN)
        else:
            raise ConfigError(f"unknown gamma kind {kind!r}")
        op.parity = "even"
        op.hermitian = kind in ("1", "2", "3")
        return op

    return _cached(b, ("gamma", kind, site), make)


def majorana_op(b, x, sigma, kind):
    """``xi = a^dag + a`` or ``eta = i(a^dag - a)``."""
    cd = creation_op(b, x, sigma)
    c = annihilation_op(b, x, sigma)
    if kind in ("xi", "ξ"):
        op = cd + c
    elif kind in ("eta", "η"):
        op = 1j * (cd - c)
    else:
        raise ConfigError(f"unknown Majorana kind {kind!r}")
    op.hermitian = True
    op.parity = "odd"
    return op


def momentum_gamma(b, p):
    """``|Lambda|**-0.5 * sum_x Gamma^(1)_x exp(-i p.x)`` for ``p`` on the dual grid."""
    lat = b.lattice
    p = np.asarray(on_dual_grid(lat, p))
    out = b.zero()
    for i, x in enumerate(lat.sites):
        out = out + np.exp(-1j * float(p @ np.asarray(x))) * gamma_op(b, i, 1)
    out = out / np.sqrt(lat.n_sites)
    out.parity = "even"
    out.hermitian = False
    return out


def staggered_sum(b, kind, sites=None):
    """``sum_x (-1)**(x_1+...+x_d) Gamma^(kind)_x`` over ``sites`` (default all)."""
    lat = b.lattice
    idx = range(lat.n_sites) if sites is None else sites
    out = b.zero()
    for i in idx:
        out = out + lat.sign(i) * gamma_op(b, i, kind)
    return out


def local_order_op(b, R):
    """Signed average of ``Gamma^(1)`` over the box ``|x|_inf <= R``."""
    if R < 1:
        raise GeometryError("radius must be a positive integer")
    box = omega_sites(b.lattice, R)
    return staggered_sum(b, 1, box) / len(box)


def dump_operator(op, path):
    """Write ``op`` as ``dim nnz`` then ``row col re im`` lines (17 digits)."""
    coo = op.mat.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w") as fh:
        fh.write(f"{op.dim} {coo.nnz}\n")
        for r, c, v in zip(coo.row[order], coo.col[order], coo.data[order]):
            fh.write(f"{r} {c} {v.real:.17g} {v.imag:.17g}\n")


def load_operator(path):
    with open(path) as fh:
        dim, nnz = (int(t) for t in fh.readline().split())
        rows, cols, vals = [], [], []
        for line in fh:
            r, c, re_, im_ = line.split()
            rows.append(int(r))
            cols.append(int(c))
            vals.append(complex(float(re_), float(im_)))
    if len(vals) != nnz:
        raise ValueError(f"expected {nnz} entries, found {len(vals)}")
    return OperatorMatrix(sp.csr_matrix((vals, (rows, cols)), shape=(dim, dim)))
