"""Exact matrices and subspaces over a prime field F_p or over Q.

Matrices are plain numpy arrays: ``int64`` with entries in ``[0, p)`` for a
prime field, ``object`` arrays of :class:`fractions.Fraction` for the
rationals.  A :class:`Field` knows how to canonicalise, multiply and
row-reduce them.  Subspaces are stored by the RREF of a row basis, which makes
equality a bit-for-bit comparison.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _kernels
from .errors import DimensionError, ValidationError


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for f in range(3, math.isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


@dataclass(frozen=True)
class Field:
    """F_p when ``p`` is given, Q when ``p is None``."""

    p: int | None = None

    def __post_init__(self):
        if self.p is not None:
            if not is_prime(self.p):
                raise ValidationError(f"{self.p} is not prime")
            if self.p >= _kernels.MAX_PRIME:
                raise ValidationError(f"prime {self.p} too large; need p < 2**31")

    @classmethod
    def prime(cls, p: int) -> Field:
        return cls(int(p))

    @classmethod
    def rationals(cls) -> Field:
        return cls(None)

    @property
    def kind(self) -> str:
        return "rationals" if self.p is None else "prime-field"

    @property
    def size(self) -> float:
        return math.inf if self.p is None else self.p

    @property
    def dtype(self):
        return object if self.p is None else np.int64

    def __str__(self):
        return "Q" if self.p is None else f"F_{self.p}"

    # -- scalars -----------------------------------------------------------

    def scalar(self, x):
        if self.p is None:
            return Fraction(x)
        if isinstance(x, Fraction):
            return (x.numerator % self.p) * pow(x.denominator, -1, self.p) % self.p
        return int(x) % self.p

    def inv(self, x):
        if self.p is None:
            return 1 / Fraction(x)
        return pow(int(x), -1, self.p)

    # -- arrays ------------------------------------------------------------

    def asarray(self, data, shape=None) -> np.ndarray:
        """Canonical copy of ``data`` (nested lists or an array)."""
        raw = np.array(data, dtype=object)
        if shape is not None:
            raw = raw.reshape(shape)
        if self.p is None:
            out = np.empty(raw.shape, dtype=object)
            for idx, v in np.ndenumerate(raw):
                out[idx] = Fraction(v)
            return out
        out = np.empty(raw.shape, dtype=np.int64)
        for idx, v in np.ndenumerate(raw):
            out[idx] = self.scalar(v)
        return out

    def zeros(self, shape) -> np.ndarray:
        if self.p is None:
            out = np.empty(shape, dtype=object)
            out.fill(Fraction(0))
            return out
        return np.zeros(shape, dtype=np.int64)

    def eye(self, n: int) -> np.ndarray:
        out = self.zeros((n, n))
        for i in range(n):
            out[i, i] = self.scalar(1)
        return out

    def reduce(self, a):
        return a if self.p is None else a % self.p

    def add(self, a, b):
        return self.reduce(a + b)

    def sub(self, a, b):
        return self.reduce(a - b)

    def neg(self, a):
        return self.reduce(-a)

    def scale(self, c, a):
        c = self.scalar(c)
        return self.reduce(a * c)

    def matmul(self, a, b) -> np.ndarray:
        if a.shape[1] != b.shape[0]:
            raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
        if self.p is None:
            if a.shape[1] == 0:
                return self.zeros((a.shape[0], b.shape[1]))
            return a.dot(b)
        return _kernels.matmul_mod(a, b, self.p)

    def kron(self, a, b) -> np.ndarray:
        return self.reduce(np.kron(a, b))

    def random(self, rng: np.random.Generator, shape) -> np.ndarray:
        """Uniform entries of F_p, or integers in [-2**20, 2**20] over Q."""
        if self.p is None:
            vals = rng.integers(-(2**20), 2**20 + 1, size=shape)
            return self.asarray(vals)
        return rng.integers(0, self.p, size=shape, dtype=np.int64)

    def is_zero(self, a) -> bool:
        return not np.any(a != 0)

    # -- elimination -------------------------------------------------------

    def rref(self, m) -> tuple[np.ndarray, int, list[int]]:
        if self.p is None:
            a = self.asarray(m)
        else:
            a = np.array(m, dtype=np.int64, copy=True) % self.p
        if a.ndim != 2:
            raise DimensionError("rref needs a 2-d array")
        if self.p is None:
            r, piv = _rref_fraction(a)
        else:
            r, piv = _kernels.rref_mod(a, self.p)
            piv = [int(c) for c in piv]
        return a, int(r), list(piv)

    def rank(self, m) -> int:
        return self.rref(m)[1]


def _rref_fraction(a):
    m, n = a.shape
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        piv = next((i for i in range(r, m) if a[i, c] != 0), None)
        if piv is None:
            continue
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] / a[r, c]
        for i in range(m):
            if i != r and a[i, c] != 0:
                a[i] = a[i] - a[i, c] * a[r]
        pivots.append(c)
        r += 1
    return r, pivots


# ---------------------------------------------------------------------------
# matrix operations


def rref(F: Field, m) -> tuple[np.ndarray, int, list[int]]:
    """Reduced row echelon form, rank and pivot columns of ``m``."""
    return F.rref(m)


def rank(F: Field, m) -> int:
    return F.rank(m)


def kernel(F: Field, m) -> Subspace:
    """Right kernel {v : m v = 0} as a subspace of F^cols."""
    m = np.asarray(m)
    n = m.shape[1]
    R, r, piv = F.rref(m)
    free = [c for c in range(n) if c not in set(piv)]
    basis = F.zeros((len(free), n))
    for k, f in enumerate(free):
        basis[k, f] = F.scalar(1)
        for i, pc in enumerate(piv):
            basis[k, pc] = F.neg(R[i, f])
    return Subspace.span(F, basis, n)


def column_space(F: Field, m) -> Subspace:
    m = np.asarray(m)
    return Subspace.span(F, m.T, m.shape[0])


def pseudo_inverse(F: Field, m) -> np.ndarray:
    """A generalized inverse B with m B m = m and B m B = B.

    The complement of ker(m) is the span of the pivot coordinates of rref(m);
    B inverts m from Im(m) back onto that complement.
    """
    m = np.asarray(m)
    rows, cols = m.shape
    _, r, piv = F.rref(m)
    B = F.zeros((cols, rows))
    if r == 0:
        return B
    C = m[:, piv]  # rows x r, full column rank
    _, _, row_sel = F.rref(C.T)  # r independent rows of C
    square = C[row_sel, :]
    inv = inverse(F, square)
    # B = E_piv . inv . S_rows
    for a, pc in enumerate(piv):
        for b, rr in enumerate(row_sel):
            B[pc, rr] = inv[a, b]
    return B


def inverse(F: Field, m) -> np.ndarray:
    m = np.asarray(m)
    n = m.shape[0]
    if m.shape != (n, n):
        raise DimensionError("inverse needs a square matrix")
    aug = np.concatenate([np.array(m, dtype=F.dtype), F.eye(n)], axis=1)
    R, r, piv = F.rref(aug)
    if piv[:n] != list(range(n)) or r < n:
        raise ValidationError("matrix is singular")
    return R[:, n:].copy()


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True, eq=False)
class Subspace:
    """Row span of ``basis``, kept in reduced row echelon form."""

    field: Field
    ambient_dim: int
    basis: np.ndarray

    @classmethod
    def span(cls, F: Field, vectors, n: int) -> Subspace:
        vecs = np.asarray(vectors, dtype=F.dtype)
        if vecs.size == 0:
            return cls.zero(F, n)
        vecs = vecs.reshape(-1, n)
        R, r, _ = F.rref(vecs)
        basis = R[:r].copy()
        basis.flags.writeable = False
        return cls(F, n, basis)

    @classmethod
    def zero(cls, F: Field, n: int) -> Subspace:
        basis = F.zeros((0, n))
        basis.flags.writeable = False
        return cls(F, n, basis)

    @classmethod
    def full(cls, F: Field, n: int) -> Subspace:
        basis = F.eye(n)
        basis.flags.writeable = False
        return cls(F, n, basis)

    @property
    def dim(self) -> int:
        return self.basis.shape[0]

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return (
            self.field == other.field
            and self.basis.shape == other.basis.shape
            and bool(np.all(self.basis == other.basis))
        )

    def __hash__(self):
        return hash((self.field, self.ambient_dim, self.key()))

    def key(self) -> tuple:
        return tuple(tuple(row) for row in self.basis.tolist())

    def __le__(self, other: Subspace) -> bool:
        _check_same(self, other)
        if self.dim > other.dim:
            return False
        if self.dim == 0:
            return True
        stacked = np.concatenate([other.basis, self.basis], axis=0)
        return self.field.rank(stacked) == other.dim

    def __ge__(self, other: Subspace) -> bool:
        return other <= self

    def __add__(self, other: Subspace) -> Subspace:
        return subspace_sum(self, other)

    def __and__(self, other: Subspace) -> Subspace:
        return subspace_intersect(self, other)

    def __contains__(self, v) -> bool:
        return Subspace.span(self.field, v, self.ambient_dim) <= self

    def annihilator(self) -> Subspace:
        """{y : u . y = 0 for all u} under the standard bilinear form."""
        if self.dim == 0:
            return Subspace.full(self.field, self.ambient_dim)
        return kernel(self.field, self.basis)

    def __repr__(self):
        return f"Subspace(dim={self.dim}, ambient={self.ambient_dim}, over {self.field})"


def _check_same(u: Subspace, v: Subspace):
    if u.ambient_dim != v.ambient_dim:
        raise DimensionError(f"ambient dimensions differ: {u.ambient_dim} vs {v.ambient_dim}")
    if u.field != v.field:
        raise ValidationError("subspaces over different fields")


def subspace_sum(u: Subspace, v: Subspace) -> Subspace:
    _check_same(u, v)
    return Subspace.span(u.field, np.concatenate([u.basis, v.basis], axis=0), u.ambient_dim)


def subspace_intersect(u: Subspace, v: Subspace) -> Subspace:
    _check_same(u, v)
    F, n = u.field, u.ambient_dim
    if u.dim == 0 or v.dim == 0:
        return Subspace.zero(F, n)
    ann = np.concatenate([u.annihilator().basis, v.annihilator().basis], axis=0)
    if ann.shape[0] == 0:
        return Subspace.full(F, n)
    return kernel(F, ann)


def apply_image(m, u: Subspace) -> Subspace:
    """m(u) as a subspace of F^rows."""
    m = np.asarray(m)
    if m.shape[1] != u.ambient_dim:
        raise DimensionError(f"map with {m.shape[1]} columns applied to subspace of F^{u.ambient_dim}")
    F = u.field
    if u.dim == 0:
        return Subspace.zero(F, m.shape[0])
    return Subspace.span(F, F.matmul(u.basis, m.T), m.shape[0])


def preimage(m, w: Subspace) -> Subspace:
    """{v : m v in w} as a subspace of F^cols."""
    m = np.asarray(m)
    if m.shape[0] != w.ambient_dim:
        raise DimensionError(f"map with {m.shape[0]} rows pulled back along subspace of F^{w.ambient_dim}")
    F = w.field
    ann = w.annihilator()
    if ann.dim == 0:
        return Subspace.full(F, m.shape[1])
    return kernel(F, F.matmul(ann.basis, m))
