"""Non-commutative hom and ext with one side fixed.

For a dimension vector alpha and a fixed representation W of dimension beta,
every V in Rep_alpha gives the linear map

    f(V): (phi(x))_x  |->  (phi(ha) V(a) - W(a) phi(ta))_a

whose kernel is Hom(V, W) and cokernel Ext(V, W).  Columns of phi(x) are
vectors of W(x), so the domain is alpha(x) copies of W(x) per vertex and the
codomain alpha(ta) copies of W(ha) per arrow.  nchom is the maximal shrinkage
c of the span of all f(V), i.e. sum alpha(x) beta(x) - ncrk.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import blocks
from .blocks import BlockStructure, Slot
from .errors import InternalInvariantError, UnsupportedInstanceError, ValidationError
from .exactlin import Field
from .matspace import Config, MatrixSpace, ncrk, trial_rng
from .quiver import DimensionVector, Representation, Subrepresentation, euler_form, subrep_closure
from .reduction import optimal_witness


@dataclass(frozen=True)
class HomMapSpace:
    alpha: dict[str, int]
    target: Representation
    space: MatrixSpace

    @property
    def block(self) -> BlockStructure:
        return self.space.block


@dataclass
class HomExtResult:
    nchom: int
    ncext: int
    subrep: Subrepresentation | None
    factor_dims: dict[str, int] | None
    trace: dict


def build_hom_space(alpha: DimensionVector, w: Representation) -> HomMapSpace:
    q, F = w.quiver, w.field
    if not q.acyclic:
        raise UnsupportedInstanceError("hom spaces are built for acyclic quivers")
    alpha = q.check_vector(alpha, "alpha")
    if any(v < 0 for v in alpha.values()):
        raise ValidationError("alpha must be nonnegative")
    beta = w.dims
    dom, off = [], 0
    for x in q.vertices:
        for i in range(alpha[x]):
            dom.append(Slot(x, i, off, beta[x]))
            off += beta[x]
    cod, off2 = [], 0
    for a in q.arrows:
        for j in range(alpha[a.tail]):
            cod.append(Slot(a.name, j, off2, beta[a.head]))
            off2 += beta[a.head]
    cols, rows = off, off2
    dom_at = {(s.key, s.copy): s for s in dom}
    cod_at = {(s.key, s.copy): s for s in cod}
    gens, labels = [], []
    for a in q.arrows:
        # phi |-> phi(ha) E_kl : column l of arrow a's component is column k of phi(ha)
        ident = F.eye(beta[a.head])
        for k in range(alpha[a.head]):
            for l in range(alpha[a.tail]):
                ds, cs = dom_at[(a.head, k)], cod_at[(a.name, l)]
                m = F.zeros((rows, cols))
                m[cs.offset : cs.stop, ds.offset : ds.stop] = ident
                gens.append(m)
                labels.append(("V", a.name, k, l))
        # phi |-> -W(a) phi(ta), columnwise
        m = F.zeros((rows, cols))
        negw = F.neg(w.maps[a.name])
        for j in range(alpha[a.tail]):
            ds, cs = dom_at[(a.tail, j)], cod_at[(a.name, j)]
            m[cs.offset : cs.stop, ds.offset : ds.stop] = negw
        gens.append(m)
        labels.append(("W", a.name))
    bs = BlockStructure(tuple(dom), tuple(cod), tuple(labels))
    return HomMapSpace(alpha, w, MatrixSpace(F, rows, cols, gens, block=bs))


def nc_hom_ext(alpha: DimensionVector, w: Representation, cfg: Config | None = None) -> HomExtResult:
    """nchom and ncext for fixed target W, plus the maximizing subrepresentation.

    ncext is computed twice: as nchom - <alpha, beta>, and as -<alpha, dim W/W'>
    for W' the closure of the shrunk subspace's vertex spaces.  They must agree.
    """
    cfg = cfg or Config()
    h = build_hom_space(alpha, w)
    q = w.quiver
    res = ncrk(h.space, cfg)
    nchom = res.certificate.c
    ncext = nchom - euler_form(q, h.alpha, w.dims)
    sub = subrep_closure(w, {x: res.parts[x] for x in res.parts})
    factor = {x: w.dims[x] - sub.spaces[x].dim for x in q.vertices}
    if -euler_form(q, h.alpha, factor) != ncext:
        raise InternalInvariantError("ncext from the shrunk subspace disagrees with nchom - <alpha, beta>")
    return HomExtResult(nchom, ncext, sub, factor, dict(res.trace))


def nchom(alpha: DimensionVector, w: Representation, cfg: Config | None = None) -> int:
    return nc_hom_ext(alpha, w, cfg).nchom


def ncext(alpha: DimensionVector, w: Representation, cfg: Config | None = None) -> int:
    return nc_hom_ext(alpha, w, cfg).ncext


def source_weight(v: Representation, beta: DimensionVector) -> dict[str, int]:
    """sigma_beta(x) = sum_{a: ta = x} beta(ha) - beta(x), so sigma_beta(d) = -<d, beta>."""
    q = v.quiver
    beta = q.check_vector(beta, "beta")
    return {x: sum(beta[a.head] for a in q.out_arrows(x)) - beta[x] for x in q.vertices}


def ncext_fixed_source(v: Representation, beta: DimensionVector, cfg: Config | None = None) -> int:
    """max over subrepresentations V' of -<dim V', beta>, as a discrepancy."""
    return optimal_witness(v, source_weight(v, beta), cfg).discrepancy


def nchom_fixed_source(v: Representation, beta: DimensionVector, cfg: Config | None = None) -> int:
    return ncext_fixed_source(v, beta, cfg) + euler_form(v.quiver, v.dims, beta)


def hom_map(h: HomMapSpace, reps: dict[str, np.ndarray]) -> np.ndarray:
    """The matrix of f(V) for V given by its arrow matrices (alpha(ha) x alpha(ta))."""
    F = h.space.field
    coeffs = []
    for label in h.block.generators:
        if label[0] == "V":
            _, a, k, l = label
            coeffs.append(reps[a][k, l])
        else:
            coeffs.append(F.scalar(1))
    return h.space.combine(coeffs)


def generic_hom_sample(
    alpha: DimensionVector, w: Representation, trials: int = 8, seed: int = 0, d: int = 1
) -> tuple[int, int]:
    """(dim Hom(V, W), dim Ext(V, W)) minimising hom over random V in Rep_{d alpha}."""
    q, F = w.quiver, w.field
    alpha = q.check_vector(alpha, "alpha")
    dalpha = {x: d * v for x, v in alpha.items()}
    h = build_hom_space(dalpha, w)
    best = None
    for t in range(max(1, trials)):
        rng = trial_rng(seed, t)
        reps = {a.name: F.random(rng, (dalpha[a.head], dalpha[a.tail])) for a in q.arrows}
        m = hom_map(h, reps)
        r = F.rank(m) if m.size else 0
        hom, ext = h.space.cols - r, h.space.rows - r
        if best is None or hom < best[0]:
            best = (hom, ext)
    return best
