"""Exhaustive reference computations over tiny prime fields.

Everything here enumerates: subspaces through their RREF shapes,
subrepresentations as tuples of vertex subspaces, blow-up elements through
their coefficient tuples.  Rank is computed with a separate pure-Python
elimination so these results do not share code with the fast paths they
check.  Work above ``WORK_LIMIT`` raises :class:`OracleInfeasibleError`.
"""
from __future__ import annotations

import itertools
import math

import numpy as np

from .errors import OracleInfeasibleError, ValidationError
from .exactlin import Subspace, subspace_intersect
from .quiver import Representation, Subrepresentation, Weight, euler_form, sigma_value

WORK_LIMIT = 2**20


def _rank(rows: list[list[int]], q: int) -> int:
    rows = [list(r) for r in rows]
    rank = 0
    ncols = len(rows[0]) if rows else 0
    for c in range(ncols):
        piv = next((i for i in range(rank, len(rows)) if rows[i][c] % q), None)
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        inv = pow(rows[rank][c], -1, q)
        rows[rank] = [v * inv % q for v in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][c] % q:
                f = rows[i][c]
                rows[i] = [(a - f * b) % q for a, b in zip(rows[i], rows[rank])]
        rank += 1
    return rank


def _apply(m: list[list[int]], v, q: int) -> list[int]:
    return [sum(a * b for a, b in zip(row, v)) % q for row in m]


def gaussian_binomial(n: int, k: int, q: int) -> int:
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


def count_subspaces(n: int, q: int) -> int:
    return sum(gaussian_binomial(n, k, q) for k in range(n + 1))


def iter_subspaces(n: int, q: int):
    """Every subspace of F_q^n, as an RREF basis (tuple of row tuples)."""
    for k in range(n + 1):
        for piv in itertools.combinations(range(n), k):
            free = [(i, j) for i in range(k) for j in range(piv[i] + 1, n) if j not in piv]
            for vals in itertools.product(range(q), repeat=len(free)):
                rows = [[0] * n for _ in range(k)]
                for i, p in enumerate(piv):
                    rows[i][p] = 1
                for (i, j), v in zip(free, vals):
                    rows[i][j] = v
                yield tuple(tuple(r) for r in rows)


def _span(F, basis, n: int) -> Subspace:
    if not basis:
        return Subspace.zero(F, n)
    return Subspace.span(F, np.array(basis, dtype=np.int64), n)


def _prime(F) -> int:
    if F.p is None:
        raise ValidationError("oracles need a finite prime field")
    return F.p


def brute_ncrk(s, q: int | None = None) -> tuple[int, Subspace]:
    """(ncrk, minimal maximal-c shrunk subspace) by enumerating every subspace."""
    p = _prime(s.field)
    if q is not None and q != p:
        raise ValidationError(f"oracle prime {q} does not match the space's field {s.field}")
    n = s.cols
    if p**n > WORK_LIMIT or count_subspaces(n, p) > WORK_LIMIT:
        raise OracleInfeasibleError(f"enumerating subspaces of F_{p}^{n} is over the work limit")
    mats = [m.tolist() for m in s.basis]
    best, maximizers = -1, []
    for basis in iter_subspaces(n, p):
        img = [_apply(m, v, p) for m in mats for v in basis]
        c = len(basis) - (_rank(img, p) if img else 0)
        if c > best:
            best, maximizers = c, [basis]
        elif c == best:
            maximizers.append(basis)
    minimal = Subspace.full(s.field, n)
    for basis in maximizers:
        minimal = subspace_intersect(minimal, _span(s.field, basis, n))
    return n - best, minimal


def iter_subreps(w: Representation):
    """Yield every subrepresentation as a dict vertex -> RREF basis tuple."""
    p = _prime(w.field)
    q = w.quiver
    work = math.prod(count_subspaces(w.dims[x], p) for x in q.vertices)
    if work > WORK_LIMIT:
        raise OracleInfeasibleError(f"{work} candidate subspace tuples is over the work limit")
    choices = {x: list(iter_subspaces(w.dims[x], p)) for x in q.vertices}
    maps = {a.name: w.maps[a.name].tolist() for a in q.arrows}
    contains: dict = {}

    def inside(vecs, target):
        key = (vecs, target)
        if key not in contains:
            contains[key] = not vecs or _rank(list(target) + list(vecs), p) == len(target)
        return contains[key]

    # place vertices in topological order when possible so closure can prune early
    order = list(q.order) if q.acyclic else list(q.vertices)
    placed: dict = {}

    def rec(i):
        if i == len(order):
            yield dict(placed)
            return
        x = order[i]
        for basis in choices[x]:
            placed[x] = basis
            ok = True
            for a in q.arrows:
                if a.tail in placed and a.head in placed and (a.tail == x or a.head == x):
                    img = tuple(tuple(_apply(maps[a.name], v, p)) for v in placed[a.tail])
                    if not inside(img, placed[a.head]):
                        ok = False
                        break
            if ok:
                yield from rec(i + 1)
            del placed[x]

    yield from rec(0)


def _to_subrep(w: Representation, bases) -> Subrepresentation:
    F = w.field
    spaces = {x: _span(F, b, w.dims[x]) for x, b in bases.items()}
    return Subrepresentation(w, spaces)


def brute_discrepancy(w: Representation, sigma: Weight) -> tuple[int, list[Subrepresentation]]:
    """max sigma(dim W') over all subrepresentations, with every maximizer."""
    sigma = w.quiver.check_vector(sigma, "weight")
    best, optima = None, []
    for bases in iter_subreps(w):
        val = sum(sigma[x] * len(b) for x, b in bases.items())
        if best is None or val > best:
            best, optima = val, [bases]
        elif val == best:
            optima.append(bases)
    return best, [_to_subrep(w, b) for b in optima]


def brute_ncext_target(alpha, w: Representation) -> int:
    """max over factor representations W'' of -<alpha, dim W''>."""
    alpha = w.quiver.check_vector(alpha, "alpha")
    best = None
    for bases in iter_subreps(w):
        factor = {x: w.dims[x] - len(b) for x, b in bases.items()}
        val = -euler_form(w.quiver, alpha, factor)
        best = val if best is None else max(best, val)
    return best


def brute_ncext_source(v: Representation, beta) -> int:
    """max over subrepresentations V' of -<dim V', beta>."""
    beta = v.quiver.check_vector(beta, "beta")
    best = None
    for bases in iter_subreps(v):
        val = -euler_form(v.quiver, {x: len(b) for x, b in bases.items()}, beta)
        best = val if best is None else max(best, val)
    return best


def brute_rank_blowup(s, d: int, q: int | None = None) -> int:
    """Exact max rank in the d-th blow-up over all F_q coefficient tuples.

    Coefficient tuples are visited in a fixed scrambled order (an affine
    bijection of their index range), stopping once a proven upper bound is hit;
    the work limit counts evaluations actually done.
    """
    p = _prime(s.field)
    if q is not None and q != p:
        raise ValidationError(f"oracle prime {q} does not match the space's field {s.field}")
    rows, cols = s.rows, s.cols
    bound = d * min(rows, cols)
    try:
        bound = min(bound, d * brute_ncrk(s)[0])
    except OracleInfeasibleError:
        pass
    mats = [m.tolist() for m in s.basis]
    k = d * d * len(mats)
    total = p**k
    mult = next(a for a in range(total // 2 + 1, total + 2) if math.gcd(a, total) == 1) if total > 1 else 1
    best = 0
    for step in range(total):
        if best >= bound:
            return best
        if step >= WORK_LIMIT:
            raise OracleInfeasibleError(f"blow-up rank search exceeded {WORK_LIMIT} evaluations")
        idx = (step * mult + 1) % total
        coeffs = []
        for _ in range(k):
            idx, r = divmod(idx, p)
            coeffs.append(r)
        elem = [[0] * (d * cols) for _ in range(d * rows)]
        for i, A in enumerate(mats):
            for kk in range(d):
                for ll in range(d):
                    c = coeffs[(i * d + kk) * d + ll]
                    if c:
                        for r_ in range(rows):
                            row = elem[kk * rows + r_]
                            for c_ in range(cols):
                                if A[r_][c_]:
                                    row[ll * cols + c_] = (row[ll * cols + c_] + c * A[r_][c_]) % p
        best = max(best, _rank(elem, p))
    return best
