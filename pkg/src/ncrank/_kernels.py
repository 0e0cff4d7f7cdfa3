"""Hot loops for prime-field linear algebra.

Two implementations of each kernel live here: a numba ``@njit`` version and a
plain numpy version.  The dispatchers :func:`rref_mod` and :func:`matmul_mod`
pick numba unless it is missing or ``NCRANK_DISABLE_NUMBA`` is set to a truthy
value in the environment before import.

All arrays are ``int64`` with entries in ``[0, p)``; ``p < 2**31`` so that a
single product fits in a signed 64-bit word.
"""
import os

import numpy as np

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

_DISABLED = os.environ.get("NCRANK_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")
HAVE_NUMBA = numba is not None
BACKEND = "numba" if HAVE_NUMBA and not _DISABLED else "numpy"

MAX_PRIME = 2**31


def _njit(f):
    if numba is None:
        return f
    return numba.njit(cache=True)(f)


@_njit
def _inv_mod(a, p):
    # extended Euclid; a is nonzero mod p
    t, new_t = 0, 1
    r, new_r = p, a % p
    while new_r != 0:
        q = r // new_r
        t, new_t = new_t, t - q * new_t
        r, new_r = new_r, r - q * new_r
    if t < 0:
        t += p
    return t


@_njit
def rref_mod_numba(a, p):
    """In-place RREF of ``a`` over F_p.  Returns ``(rank, pivots)``."""
    m, n = a.shape
    pivots = np.empty(min(m, n), dtype=np.int64)
    r = 0
    for c in range(n):
        if r == m:
            break
        piv = -1
        for i in range(r, m):
            if a[i, c] != 0:
                piv = i
                break
        if piv < 0:
            continue
        if piv != r:
            for j in range(n):
                tmp = a[r, j]
                a[r, j] = a[piv, j]
                a[piv, j] = tmp
        inv = _inv_mod(a[r, c], p)
        for j in range(c, n):
            a[r, j] = (a[r, j] * inv) % p
        for i in range(m):
            if i == r:
                continue
            f = a[i, c]
            if f == 0:
                continue
            for j in range(c, n):
                v = a[i, j] - (f * a[r, j]) % p
                if v < 0:
                    v += p
                a[i, j] = v
        pivots[r] = c
        r += 1
    return r, pivots[:r].copy()


def rref_mod_numpy(a, p):
    """Vectorised-row numpy version of :func:`rref_mod_numba`."""
    m, n = a.shape
    r = 0
    pivots = []
    for c in range(n):
        if r == m:
            break
        nz = np.flatnonzero(a[r:, c])
        if nz.size == 0:
            continue
        piv = r + int(nz[0])
        if piv != r:
            a[[r, piv]] = a[[piv, r]]
        a[r] = a[r] * pow(int(a[r, c]), -1, p) % p
        col = a[:, c].copy()
        col[r] = 0
        if col.any():
            a -= np.outer(col, a[r]) % p
            a %= p
        pivots.append(c)
        r += 1
    return r, np.asarray(pivots, dtype=np.int64)


@_njit
def matmul_mod_numba(a, b, p):
    m, k = a.shape
    n = b.shape[1]
    out = np.zeros((m, n), dtype=np.int64)
    for i in range(m):
        for t in range(k):
            f = a[i, t]
            if f == 0:
                continue
            for j in range(n):
                out[i, j] = (out[i, j] + f * b[t, j]) % p
    return out


def matmul_mod_numpy(a, b, p):
    k = a.shape[1]
    if k * (p - 1) ** 2 < 2**63:
        return (a @ b) % p
    out = (a.astype(object) @ b.astype(object)) % p
    return out.astype(np.int64)


def rref_mod(a, p):
    if BACKEND == "numba":
        return rref_mod_numba(a, p)
    return rref_mod_numpy(a, p)


def matmul_mod(a, b, p):
    if a.shape[0] == 0 or b.shape[1] == 0 or a.shape[1] == 0:
        return np.zeros((a.shape[0], b.shape[1]), dtype=np.int64)
    # numpy's integer matmul wins while it cannot overflow; past that its
    # fallback goes through Python objects and the reducing loop is faster
    if BACKEND == "numba" and a.shape[1] * (p - 1) ** 2 >= 2**63:
        return matmul_mod_numba(a, b, p)
    return matmul_mod_numpy(a, b, p)
