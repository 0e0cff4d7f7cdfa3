"""Block layouts of reduced matrix spaces.

A domain is cut into slots, each slot one copy of some W(x).  Slots sharing a
key (the vertex) form a group; the copy-mixing action permutes and mixes the
copies inside a group and leaves the W(x) factor alone.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InternalInvariantError
from .exactlin import Subspace, subspace_intersect, subspace_sum


@dataclass(frozen=True)
class Slot:
    key: str
    copy: int
    offset: int
    size: int

    @property
    def stop(self) -> int:
        return self.offset + self.size


@dataclass(frozen=True)
class BlockStructure:
    domain: tuple[Slot, ...]
    codomain: tuple[Slot, ...]
    # one label per basis matrix: (domain slot index, codomain slot index, tag)
    generators: tuple = ()

    @property
    def domain_dim(self) -> int:
        return sum(s.size for s in self.domain)

    @property
    def codomain_dim(self) -> int:
        return sum(s.size for s in self.codomain)

    def blown_up(self, d: int) -> BlockStructure:
        """Layout of F^d (x) domain: copy k of the whole domain sits at k * dim."""
        return BlockStructure(_blow(self.domain, d, self.domain_dim), _blow(self.codomain, d, self.codomain_dim))


def _blow(slots, d, dim):
    per_key: dict[str, int] = {}
    for s in slots:
        per_key[s.key] = per_key.get(s.key, 0) + 1
    out = []
    for k in range(d):
        for s in slots:
            out.append(Slot(s.key, k * per_key[s.key] + s.copy, k * dim + s.offset, s.size))
    return tuple(out)


def trivial_layout(dim: int, key: str = "*") -> tuple[Slot, ...]:
    return (Slot(key, 0, 0, dim),)


def group_slots(slots) -> dict[str, list[Slot]]:
    groups: dict[str, list[Slot]] = {}
    for s in slots:
        groups.setdefault(s.key, []).append(s)
    return groups


def project(u: Subspace, slot: Slot) -> Subspace:
    return Subspace.span(u.field, u.basis[:, slot.offset : slot.stop], slot.size)


def assemble(F, parts: dict[str, Subspace], slots, dim: int) -> Subspace:
    """The subspace (+)_slots parts[slot.key] of F^dim."""
    rows = []
    for s in slots:
        b = parts[s.key].basis
        if b.shape[0]:
            block = F.zeros((b.shape[0], dim))
            block[:, s.offset : s.stop] = b
            rows.append(block)
    if not rows:
        return Subspace.zero(F, dim)
    return Subspace.span(F, np.concatenate(rows, axis=0), dim)


def _transvect(u: Subspace, src: Slot, dst: Slot) -> Subspace:
    # (I + E_{dst,src}) : copy src added onto copy dst
    F = u.field
    b = np.array(u.basis, copy=True)
    b[:, dst.offset : dst.stop] = F.add(b[:, dst.offset : dst.stop], b[:, src.offset : src.stop])
    return Subspace.span(F, b, u.ambient_dim)


def saturate(u: Subspace, slots) -> dict[str, Subspace]:
    """Per-key spaces W'(x) with u = (+) copies (x) W'(x) after saturation.

    If ``u`` already has that form the copy projections are read off directly.
    Otherwise ``u`` is replaced by the intersection of its translates under the
    copy transvections until it is invariant; for a maximal-c shrunk subspace
    this keeps c.
    """
    F = u.field
    groups = group_slots(slots)
    if sum(s.size for s in slots) != u.ambient_dim:
        raise InternalInvariantError("slots do not partition the ambient space")
    for _ in range(u.dim + 2):
        parts = {}
        for key, ss in groups.items():
            acc = Subspace.zero(F, ss[0].size)
            for s in ss:
                acc = subspace_sum(acc, project(u, s))
            parts[key] = acc
        if assemble(F, parts, slots, u.ambient_dim) == u:
            return parts
        shrunk = u
        for ss in groups.values():
            for a in ss:
                for b in ss:
                    if a is not b:
                        shrunk = subspace_intersect(shrunk, _transvect(u, a, b))
        u = shrunk
    raise InternalInvariantError("copy saturation did not stabilise")
