"""From (representation, weight) to a Kronecker-type matrix space and back.

The space has one block matrix per (copy of x with sigma(x) > 0, copy of y
with sigma(y) < 0, path p: x -> y), carrying W(p) in that block.  Its minimal
maximal-c shrunk subspace is (+) copies (x) W'(x); closing the W'(x) under the
arrows gives the minimal optimal sigma-witness, and c is the discrepancy.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import blocks
from .blocks import BlockStructure, Slot
from .errors import (
    FieldSizeWarning,
    FieldTooSmallError,
    InternalInvariantError,
    ProbabilisticFailure,
    UnsupportedInstanceError,
    ValidationError,
)
from .exactlin import Subspace, kernel, pseudo_inverse, subspace_intersect, subspace_sum
from .matspace import Config, MatrixSpace, ShrunkCertificate, blow_up, certificate_for, ncrk, trial_rng
from .quiver import (
    Arrow,
    Quiver,
    Representation,
    Subrepresentation,
    Weight,
    path_matrices,
    sigma_minus,
    sigma_plus,
    sigma_value,
    subrep_closure,
)


@dataclass
class WitnessReport:
    discrepancy: int
    witness: Subrepresentation
    minimal: bool
    certificate: ShrunkCertificate
    semistable: bool
    sigma: dict = field(default_factory=dict)
    trace: dict = field(default_factory=dict)


def _layout(q: Quiver, dims, mult) -> tuple[Slot, ...]:
    slots, off = [], 0
    for x in q.vertices:
        for i in range(mult[x]):
            slots.append(Slot(x, i, off, dims[x]))
            off += dims[x]
    return tuple(slots)


def build_sigma_space(w: Representation, sigma: Weight) -> tuple[MatrixSpace, BlockStructure]:
    q, F = w.quiver, w.field
    if not q.acyclic:
        raise UnsupportedInstanceError("the sigma reduction needs an acyclic quiver")
    sigma = q.check_vector(sigma, "weight")
    dom = _layout(q, w.dims, sigma_plus(sigma))
    cod = _layout(q, w.dims, sigma_minus(sigma))
    cols = sum(s.size for s in dom)
    rows = sum(s.size for s in cod)
    paths = {}
    gens, labels = [], []
    for i, ds in enumerate(dom):
        for j, cs in enumerate(cod):
            key = (ds.key, cs.key)
            if key not in paths:
                paths[key] = path_matrices(w, ds.key, cs.key)
            for p, mat in paths[key]:
                m = F.zeros((rows, cols))
                m[cs.offset : cs.stop, ds.offset : ds.stop] = mat
                gens.append(m)
                labels.append((i, j, p))
    bs = BlockStructure(dom, cod, tuple(labels))
    return MatrixSpace(F, rows, cols, gens, block=bs), bs


def saturate_shrunk(u: Subspace, bs: BlockStructure, d: int = 1) -> dict[str, Subspace]:
    """W'(x) for each sigma-positive x, with u saturated to (+) copies (x) W'(x)."""
    slots = bs.domain if d == 1 else bs.blown_up(d).domain
    return blocks.saturate(u, slots)


def _report(w, sigma, seeds, cert, trace) -> WitnessReport:
    sub = subrep_closure(w, seeds)
    disc = sigma_value(sigma, sub.dims)
    if disc != cert.c:
        raise InternalInvariantError(f"witness value {disc} differs from certificate size {cert.c}")
    semistable = sigma_value(sigma, w.dims) == 0 and disc == 0
    return WitnessReport(disc, sub, True, cert, semistable, sigma, trace)


def optimal_witness(w: Representation, sigma: Weight, cfg: Config | None = None) -> WitnessReport:
    """Minimal optimal sigma-witness via ncrk of the reduced space."""
    cfg = cfg or Config()
    sigma = w.quiver.check_vector(sigma, "weight")
    s, bs = build_sigma_space(w, sigma)
    res = ncrk(s, cfg)
    seeds = {x: res.parts[x] for x in res.parts}
    trace = dict(res.trace, pipeline="reduced")
    return _report(w, sigma, seeds, res.certificate, trace)


def augmented_representation(w: Representation, bs: BlockStructure, d: int, B) -> Representation:
    """W on Q plus one arrow y -> x per (codomain copy, domain copy) block of B."""
    big = bs.blown_up(d)
    arrows = list(w.quiver.arrows)
    maps = dict(w.maps)
    for cs in big.codomain:
        for ds in big.domain:
            blk = B[ds.offset : ds.stop, cs.offset : cs.stop]
            if not np.any(blk != 0):
                continue
            name = f"+{cs.key}[{cs.copy}]>{ds.key}[{ds.copy}]"
            arrows.append(Arrow(name, cs.key, ds.key))
            maps[name] = blk
    q = Quiver(w.quiver.vertices, tuple(arrows))
    return Representation(q, w.field, w.dims, maps)


def augmented_witness(w: Representation, sigma: Weight, cfg: Config | None = None) -> WitnessReport:
    """Minimal optimal sigma-witness as a closure on the augmented quiver.

    Seeds are the copy projections of ker(A) for a random A in the blow-up;
    the arrows added carry blocks of a pseudo-inverse of A.  The result is
    accepted only if it certifies itself: (+) copies (x) W'(x) must be
    (d * sigma(W'))-shrunk and d * sigma(W') must equal the corank of A.
    """
    cfg = cfg or Config()
    q, F = w.quiver, w.field
    sigma = q.check_vector(sigma, "weight")
    s, bs = build_sigma_space(w, sigma)
    N = w.total_dim
    d0 = cfg.blowup_d or max(1, N - 1)
    small = F.p is not None and F.p <= N
    if small:
        warnings.warn(f"{F} has at most N = {N} elements; retrying with growing blow-ups", FieldSizeWarning, stacklevel=2)
    pos = [x for x in q.vertices if sigma[x] > 0]
    best = 0
    for t in range(cfg.max_retries):
        d = d0 + (t // 2 if small else 0)
        big = blow_up(s, d)
        A = big.random_element(trial_rng(cfg.seed, t))
        rk = F.rank(A)
        best = max(best, -(-rk // d))
        B = pseudo_inverse(F, A)
        ker = kernel(F, A)
        slots = big.domain_slots
        seeds = {}
        for x in pos:
            acc = Subspace.zero(F, w.dims[x])
            for sl in slots:
                if sl.key == x:
                    acc = subspace_sum(acc, blocks.project(ker, sl))
            seeds[x] = acc
        wplus = augmented_representation(w, bs, d, B)
        closed = subrep_closure(wplus, seeds)
        sub = Subrepresentation(w, closed.spaces)
        disc = sigma_value(sigma, sub.dims)
        if d * disc != big.cols - rk:
            continue
        u_big = blocks.assemble(F, sub.spaces, slots, big.cols)
        if u_big.dim - big.image(u_big).dim != d * disc:
            continue
        cert = certificate_for(s, blocks.assemble(F, sub.spaces, bs.domain, s.cols), minimal=True)
        if cert.c != disc:
            raise InternalInvariantError("base certificate disagrees with the augmented witness")
        trace = {"mode": "randomized", "pipeline": "augmented", "d": d, "seed": cfg.seed, "trials": t + 1}
        semistable = sigma_value(sigma, w.dims) == 0 and disc == 0
        return WitnessReport(disc, sub, True, cert, semistable, sigma, trace)
    cls = FieldTooSmallError if small else ProbabilisticFailure
    raise cls(f"augmented pipeline found no certified witness in {cfg.max_retries} trials", best)


def witness_lattice_ops(w1: WitnessReport, w2: WitnessReport):
    """Vertex-wise meet and join of two optimal witnesses, both re-verified."""
    if w1.discrepancy != w2.discrepancy or w1.sigma != w2.sigma:
        raise ValidationError("witnesses have different weights or discrepancies")
    sigma = w1.sigma
    a, b = w1.witness, w2.witness
    if not (a.parent is b.parent or a.parent == b.parent):
        raise ValidationError("witnesses of different representations")
    meet = Subrepresentation(a.parent, {x: subspace_intersect(a.spaces[x], b.spaces[x]) for x in a.spaces})
    join = Subrepresentation(a.parent, {x: subspace_sum(a.spaces[x], b.spaces[x]) for x in a.spaces})
    for sub in (meet, join):
        if sigma_value(sigma, sub.dims) != w1.discrepancy:
            raise InternalInvariantError("lattice operation left the set of optimal witnesses")
    return meet, join


def witness_report_for(w: Representation, sigma: Weight, sub: Subrepresentation) -> WitnessReport:
    """Wrap an externally found optimal witness (e.g. from the oracle) as a report."""
    sigma = w.quiver.check_vector(sigma, "weight")
    s, bs = build_sigma_space(w, sigma)
    cert = certificate_for(s, blocks.assemble(w.field, sub.spaces, bs.domain, s.cols))
    disc = sigma_value(sigma, sub.dims)
    return WitnessReport(disc, sub, False, cert, sigma_value(sigma, w.dims) == 0 and disc == 0, sigma)
