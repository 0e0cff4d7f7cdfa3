"""Matrix spaces, tensor blow-ups, Wong sequences and non-commutative rank.

For a space A spanned by rows x cols matrices, a subspace U of F^cols is
c-shrunk when dim A(U) <= dim U - c, and

    ncrk(A) = cols - max{dim U - dim A(U)}.

:func:`ncrk` finds the maximizing U through the second Wong sequence of a
random element of a blow-up; success comes with a certificate (the shrunk
subspace) and a witness element whose rank matches it, so a returned answer
is exact regardless of the random draw.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from . import blocks
from .blocks import BlockStructure
from .errors import (
    DimensionError,
    FieldSizeWarning,
    FieldTooSmallError,
    InternalInvariantError,
    ProbabilisticFailure,
    ValidationError,
)
from .exactlin import Field, Subspace, apply_image, column_space, preimage


@dataclass(frozen=True)
class Config:
    seed: int = 0
    max_retries: int = 8
    mode: str = "randomized"  # or "oracle"
    blowup_d: int | None = None
    trials: int = 16

    def __post_init__(self):
        if self.mode not in ("randomized", "oracle"):
            raise ValidationError(f"unknown mode {self.mode!r}")
        if self.max_retries < 1:
            raise ValidationError("max_retries must be positive")
        if self.blowup_d is not None and self.blowup_d < 1:
            raise ValidationError("blow-up factor must be positive")


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    """Counter-based stream: independent and reproducible per (seed, trial)."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(trial,)))


class MatrixSpace:
    """Span of ``basis`` (a spanning set; need not be independent)."""

    def __init__(self, field: Field, rows: int, cols: int, basis=(), block: BlockStructure | None = None):
        self.field = field
        self.rows = rows
        self.cols = cols
        mats = []
        for m in basis:
            m = np.asarray(m)
            if m.shape != (rows, cols):
                raise DimensionError(f"basis matrix of shape {m.shape} in a {rows}x{cols} space")
            m.flags.writeable = False
            mats.append(m)
        self._basis = tuple(mats)
        if block is not None and (block.domain_dim != cols or block.codomain_dim != rows):
            raise DimensionError("block structure does not match the space shape")
        self.block = block

    @classmethod
    def from_matrices(cls, F: Field, matrices) -> MatrixSpace:
        mats = [F.asarray(m) for m in matrices]
        if not mats:
            raise ValidationError("need at least one matrix to infer the shape")
        rows, cols = mats[0].shape
        return cls(F, rows, cols, mats)

    @property
    def basis(self) -> tuple[np.ndarray, ...]:
        return self._basis

    @property
    def domain_slots(self):
        return self.block.domain if self.block is not None else blocks.trivial_layout(self.cols)

    def image(self, u: Subspace) -> Subspace:
        if u.ambient_dim != self.cols:
            raise DimensionError(f"subspace of F^{u.ambient_dim} in a space with {self.cols} columns")
        F = self.field
        if u.dim == 0 or not self.basis:
            return Subspace.zero(F, self.rows)
        stacked = np.concatenate([F.matmul(u.basis, A.T) for A in self.basis], axis=0)
        return Subspace.span(F, stacked, self.rows)

    def combine(self, coeffs) -> np.ndarray:
        F = self.field
        out = F.zeros((self.rows, self.cols))
        for c, A in zip(coeffs, self.basis):
            if c != 0:
                out = F.add(out, F.scale(c, A))
        return out

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        return self.combine(self.field.random(rng, len(self.basis)))

    def __repr__(self):
        return f"MatrixSpace({self.rows}x{self.cols}, {len(self.basis)} generators over {self.field})"


class BlownUpSpace(MatrixSpace):
    """M(d, F) (x) A, with block (k, l) of E_kl (x) A_i equal to A_i.

    The basis is only materialised on demand; images and random elements use
    the tensor structure directly.
    """

    def __init__(self, base: MatrixSpace, d: int):
        self.base = base
        self.d = d
        self.field = base.field
        self.rows = d * base.rows
        self.cols = d * base.cols
        self.block = None if base.block is None else base.block.blown_up(d)

    @cached_property
    def _basis(self):
        F, d = self.field, self.d
        out = []
        for A in self.base.basis:
            for k in range(d):
                for l in range(d):
                    E = F.zeros((d, d))
                    E[k, l] = F.scalar(1)
                    m = F.kron(E, A)
                    m.flags.writeable = False
                    out.append(m)
        return tuple(out)

    @property
    def domain_slots(self):
        if self.block is not None:
            return self.block.domain
        return tuple(blocks.Slot("*", k, k * self.base.cols, self.base.cols) for k in range(self.d))

    def image(self, u: Subspace) -> Subspace:
        # A^{d}(U) = F^d (x) A(sum_l pi_l U)
        if u.ambient_dim != self.cols:
            raise DimensionError(f"subspace of F^{u.ambient_dim} in a space with {self.cols} columns")
        F, n = self.field, self.base.cols
        proj = Subspace.span(F, u.basis.reshape(-1, n), n) if u.dim else Subspace.zero(F, n)
        y = self.base.image(proj)
        return blocks.assemble(F, {"*": y}, [blocks.Slot("*", k, k * self.base.rows, self.base.rows) for k in range(self.d)], self.rows)

    def random_element(self, rng: np.random.Generator) -> np.ndarray:
        F, d = self.field, self.d
        out = F.zeros((self.rows, self.cols))
        for A in self.base.basis:
            out = F.add(out, F.kron(F.random(rng, (d, d)), A))
        return out

    def coefficients_of(self, element) -> np.ndarray | None:
        """d x d x m coefficient tensor if ``element`` lies in the blow-up, else None."""
        F, d, b = self.field, self.d, self.base
        mats = np.stack([A.reshape(-1) for A in b.basis], axis=1) if b.basis else F.zeros((b.rows * b.cols, 0))
        out = []
        for k in range(d):
            for l in range(d):
                blk = np.asarray(element)[k * b.rows : (k + 1) * b.rows, l * b.cols : (l + 1) * b.cols]
                sol = _solve(F, mats, blk.reshape(-1))
                if sol is None:
                    return None
                out.append(sol)
        return np.array(out, dtype=F.dtype).reshape(d, d, -1)


def _solve(F, M, v):
    """Some x with M x = v, or None."""
    n = M.shape[1]
    aug = np.concatenate([np.asarray(M, dtype=F.dtype), np.asarray(v, dtype=F.dtype).reshape(-1, 1)], axis=1)
    R, r, piv = F.rref(aug)
    if n in piv:
        return None
    x = F.zeros(n)
    for i, c in enumerate(piv):
        x[c] = R[i, n]
    return x


@dataclass(frozen=True)
class ShrunkCertificate:
    """U with A(U) = image and c = dim U - dim image."""

    u: Subspace
    image: Subspace
    c: int
    minimal: bool = False

    def verify(self, s: MatrixSpace) -> bool:
        return (
            self.u.ambient_dim == s.cols
            and self.image == s.image(self.u)
            and self.c == self.u.dim - self.image.dim
        )


@dataclass
class NcrkResult:
    rank: int
    certificate: ShrunkCertificate
    witness: np.ndarray | None = None
    d: int = 1
    parts: dict[str, Subspace] = field(default_factory=dict)
    trace: dict = field(default_factory=dict)


def space_image(s: MatrixSpace, u: Subspace) -> Subspace:
    return s.image(u)


def blow_up(s: MatrixSpace, d: int) -> BlownUpSpace:
    if d < 1:
        raise ValidationError("blow-up factor must be at least 1")
    return BlownUpSpace(s, d)


def random_element(s: MatrixSpace, seed: int) -> np.ndarray:
    F = s.field
    if F.p is not None and F.p <= 2 * min(s.rows, s.cols):
        warnings.warn(f"{F} is small for {s.rows}x{s.cols} random sampling", FieldSizeWarning, stacklevel=2)
    return s.random_element(np.random.default_rng(seed))


def certificate_for(s: MatrixSpace, u: Subspace, minimal: bool = False) -> ShrunkCertificate:
    img = s.image(u)
    return ShrunkCertificate(u, img, u.dim - img.dim, minimal)


def wong_sequence(s: MatrixSpace, a) -> list[Subspace]:
    """W_0 = 0, W_{i+1} = A(a^{-1}(W_i)), up to and including the limit."""
    a = np.asarray(a)
    if a.shape != (s.rows, s.cols):
        raise DimensionError(f"element of shape {a.shape} in a {s.rows}x{s.cols} space")
    seq = [Subspace.zero(s.field, s.rows)]
    for _ in range(s.cols + 2):
        nxt = s.image(preimage(a, seq[-1]))
        if nxt == seq[-1]:
            return seq
        seq.append(nxt)
    raise InternalInvariantError("Wong sequence did not stabilise within cols steps")


def wong_limit(s: MatrixSpace, a) -> Subspace:
    return wong_sequence(s, a)[-1]


def shrunk_from_wong(s: MatrixSpace, a) -> ShrunkCertificate | None:
    """The minimal shrunk subspace a^{-1}(W*) when W* lies in Im(a), else None."""
    a = np.asarray(a)
    limit = wong_limit(s, a)
    if not limit <= column_space(s.field, a):
        return None
    cert = certificate_for(s, preimage(a, limit), minimal=True)
    if cert.c != s.cols - s.field.rank(a):
        raise InternalInvariantError("Wong certificate size disagrees with the element rank")
    return cert


def default_blowup(s: MatrixSpace) -> int:
    return max(1, min(s.rows, s.cols) - 1)


def _field_small(F: Field, n: int) -> bool:
    return F.p is not None and F.p <= 2 * n


def ncrk(s: MatrixSpace, cfg: Config | None = None) -> NcrkResult:
    """Non-commutative rank with its minimal shrunk-subspace certificate.

    ``result.parts`` maps each slot key of the domain layout to W'(x), where
    the certificate's U is the direct sum of copies of W'(x).
    """
    cfg = cfg or Config()
    if cfg.mode == "oracle":
        from .oracle import brute_ncrk

        r, u = brute_ncrk(s)
        cert = certificate_for(s, u, minimal=True)
        return NcrkResult(r, cert, None, 1, blocks.saturate(u, s.domain_slots), {"mode": "oracle"})

    F = s.field
    n = min(s.rows, s.cols)
    d0 = cfg.blowup_d or default_blowup(s)
    small = _field_small(F, n)
    if small:
        warnings.warn(
            f"{F} has at most 2n = {2 * n} elements; retrying with growing blow-ups", FieldSizeWarning, stacklevel=2
        )
    best = 0
    for t in range(cfg.max_retries):
        # tiny fields: M(d, F_p) holds F_{p^d}, so larger d compensates
        d = d0 + (t // 2 if small else 0)
        big = blow_up(s, d)
        a = big.random_element(trial_rng(cfg.seed, t))
        rk = F.rank(a)
        best = max(best, math.ceil(rk / d))
        cert_d = shrunk_from_wong(big, a)
        if cert_d is None:
            continue
        if cert_d.c % d:
            raise FieldTooSmallError(f"blow-up certificate size {cert_d.c} not divisible by d={d}", best)
        parts = blocks.saturate(cert_d.u, big.domain_slots)
        u = blocks.assemble(F, parts, s.domain_slots, s.cols)
        cert = certificate_for(s, u, minimal=True)
        if cert.c * d != cert_d.c:
            raise InternalInvariantError("pulled-back certificate lost shrinkage")
        trace = {"mode": "randomized", "d": d, "seed": cfg.seed, "trials": t + 1, "witness_rank": rk}
        return NcrkResult(s.cols - cert.c, cert, a, d, parts, trace)
    cls = FieldTooSmallError if small else ProbabilisticFailure
    raise cls(f"no certificate after {cfg.max_retries} trials; ncrk >= {best}", best)


def rank_of_space(s: MatrixSpace, cfg: Config | None = None, target: int | None = None) -> int:
    """Largest rank among ``cfg.trials`` random elements (stops early at ``target``)."""
    cfg = cfg or Config()
    if cfg.mode == "oracle":
        from .oracle import brute_rank_blowup

        return brute_rank_blowup(s, 1)
    if not s.basis and not isinstance(s, BlownUpSpace):
        return 0
    cap = min(s.rows, s.cols) if target is None else target
    best = 0
    for t in range(cfg.trials):
        best = max(best, s.field.rank(s.random_element(trial_rng(cfg.seed, t))))
        if best >= cap:
            break
    return best
