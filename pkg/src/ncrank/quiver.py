"""Quivers, representations and subrepresentations.

Dimension vectors and weights are plain ``dict[str, int]`` keyed by vertex id.
"""
from __future__ import annotations

import graphlib
from collections.abc import Mapping
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidSubrepError, UnsupportedInstanceError, ValidationError
from .exactlin import Field, Subspace, apply_image, subspace_sum

DimensionVector = Mapping[str, int]
Weight = Mapping[str, int]


@dataclass(frozen=True)
class Arrow:
    name: str
    tail: str
    head: str


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    arrows: tuple[Arrow, ...]
    acyclic: bool = field(init=False)
    order: tuple[str, ...] | None = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "arrows", tuple(self.arrows))
        if len(set(self.vertices)) != len(self.vertices):
            raise ValidationError("duplicate vertex ids")
        names = [a.name for a in self.arrows]
        if len(set(names)) != len(names):
            raise ValidationError("duplicate arrow names")
        vs = set(self.vertices)
        for a in self.arrows:
            if a.tail not in vs or a.head not in vs:
                raise ValidationError(f"arrow {a.name} has an endpoint outside the vertex set")
        ts = graphlib.TopologicalSorter({v: set() for v in self.vertices})
        for a in self.arrows:
            ts.add(a.head, a.tail)
        try:
            order = tuple(ts.static_order())
        except graphlib.CycleError:
            order = None
        object.__setattr__(self, "order", order)
        object.__setattr__(self, "acyclic", order is not None)

    @classmethod
    def kronecker(cls, m: int, source: str = "x", target: str = "y") -> Quiver:
        return cls((source, target), tuple(Arrow(f"a{i + 1}", source, target) for i in range(m)))

    @classmethod
    def linear(cls, n: int) -> Quiver:
        """x0 -> x1 -> ... -> x{n-1}"""
        vs = tuple(f"x{i}" for i in range(n))
        return cls(vs, tuple(Arrow(f"a{i}", vs[i], vs[i + 1]) for i in range(n - 1)))

    def arrow(self, name: str) -> Arrow:
        for a in self.arrows:
            if a.name == name:
                return a
        raise KeyError(name)

    def out_arrows(self, x: str) -> list[Arrow]:
        return [a for a in self.arrows if a.tail == x]

    def check_vector(self, v: Mapping[str, int], what: str = "vector") -> dict[str, int]:
        if set(v) != set(self.vertices):
            raise ValidationError(f"{what} must be defined on exactly the vertices {list(self.vertices)}")
        return {x: int(v[x]) for x in self.vertices}


@dataclass(frozen=True, eq=False)
class Representation:
    quiver: Quiver
    field: Field
    dims: Mapping[str, int]
    maps: Mapping[str, np.ndarray]

    def __post_init__(self):
        q, F = self.quiver, self.field
        dims = q.check_vector(self.dims, "dimension vector")
        if any(d < 0 for d in dims.values()):
            raise ValidationError("dimensions must be nonnegative")
        maps = {}
        for a in q.arrows:
            shape = (dims[a.head], dims[a.tail])
            if a.name in self.maps:
                m = F.asarray(self.maps[a.name])
                if m.size == 0:
                    m = F.zeros(shape)
                if m.shape != shape:
                    raise ValidationError(f"map {a.name} has shape {m.shape}, expected {shape}")
            else:
                m = F.zeros(shape)
            m.flags.writeable = False
            maps[a.name] = m
        extra = set(self.maps) - {a.name for a in q.arrows}
        if extra:
            raise ValidationError(f"maps given for unknown arrows {sorted(extra)}")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "maps", maps)

    @classmethod
    def kronecker(cls, F: Field, matrices, source: str = "x", target: str = "y") -> Representation:
        mats = [F.asarray(m) for m in matrices]
        rows, cols = mats[0].shape
        q = Quiver.kronecker(len(mats), source, target)
        return cls(q, F, {source: cols, target: rows}, {a.name: m for a, m in zip(q.arrows, mats)})

    @property
    def total_dim(self) -> int:
        return sum(self.dims.values())

    def __eq__(self, other):
        if not isinstance(other, Representation):
            return NotImplemented
        return (
            self.quiver == other.quiver
            and self.field == other.field
            and self.dims == other.dims
            and all(np.array_equal(self.maps[k], other.maps[k]) for k in self.maps)
        )

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Subrepresentation:
    parent: Representation
    spaces: Mapping[str, Subspace]

    def __post_init__(self):
        w = self.parent
        spaces = {}
        for x in w.quiver.vertices:
            u = self.spaces.get(x) or Subspace.zero(w.field, w.dims[x])
            if u.ambient_dim != w.dims[x]:
                raise InvalidSubrepError(f"space at {x} lives in F^{u.ambient_dim}, expected F^{w.dims[x]}")
            spaces[x] = u
        if not is_subrep(w, spaces):
            raise InvalidSubrepError("spaces are not closed under the arrow maps")
        object.__setattr__(self, "spaces", spaces)

    @property
    def dims(self) -> dict[str, int]:
        return {x: u.dim for x, u in self.spaces.items()}

    def __eq__(self, other):
        if not isinstance(other, Subrepresentation):
            return NotImplemented
        same_parent = self.parent is other.parent or self.parent == other.parent
        return same_parent and self.spaces == other.spaces

    def __le__(self, other: Subrepresentation) -> bool:
        return all(self.spaces[x] <= other.spaces[x] for x in self.spaces)

    def __hash__(self):
        return hash(tuple((x, self.spaces[x].key()) for x in sorted(self.spaces)))


@dataclass(frozen=True)
class Path:
    """Arrow sequence ``arrows[0]`` first; the empty tuple is e_start."""

    start: str
    end: str
    arrows: tuple[str, ...] = ()


def euler_form(q: Quiver, a: DimensionVector, b: DimensionVector) -> int:
    a = q.check_vector(a, "alpha")
    b = q.check_vector(b, "beta")
    return sum(a[x] * b[x] for x in q.vertices) - sum(a[ar.tail] * b[ar.head] for ar in q.arrows)


def sigma_plus(sigma: Weight) -> dict[str, int]:
    return {x: max(0, s) for x, s in sigma.items()}


def sigma_minus(sigma: Weight) -> dict[str, int]:
    return {x: -min(0, s) for x, s in sigma.items()}


def sigma_value(sigma: Weight, d: DimensionVector) -> int:
    if set(sigma) != set(d):
        raise ValidationError("weight and dimension vector live on different vertex sets")
    return sum(sigma[x] * d[x] for x in sigma)


def path_matrices(w: Representation, x: str, y: str) -> list[tuple[Path, np.ndarray]]:
    """All paths x -> y with their composite maps W(p)."""
    q, F = w.quiver, w.field
    if not q.acyclic:
        raise UnsupportedInstanceError("path enumeration needs an acyclic quiver")
    out = []

    def walk(v, arrows, mat):
        if v == y:
            out.append((Path(x, y, tuple(arrows)), mat))
        for a in q.out_arrows(v):
            walk(a.head, arrows + [a.name], F.matmul(w.maps[a.name], mat))

    walk(x, [], F.eye(w.dims[x]))
    return out


def is_subrep(w: Representation, spaces: Mapping[str, Subspace]) -> bool:
    for a in w.quiver.arrows:
        if not apply_image(w.maps[a.name], spaces[a.tail]) <= spaces[a.head]:
            return False
    return True


def subrep_closure(w: Representation, seeds: Mapping[str, Subspace]) -> Subrepresentation:
    """Smallest subrepresentation containing every seed.

    Repeated sweeps of W'(ha) += W(a) W'(ta) over all arrows; each sweep that
    changes something raises the total dimension, so N + 1 sweeps suffice.
    Works for cyclic quivers too.
    """
    F = w.field
    spaces = {x: seeds.get(x) or Subspace.zero(F, w.dims[x]) for x in w.quiver.vertices}
    for _ in range(w.total_dim + 1):
        changed = False
        for a in w.quiver.arrows:
            grown = subspace_sum(spaces[a.head], apply_image(w.maps[a.name], spaces[a.tail]))
            if grown.dim != spaces[a.head].dim:
                spaces[a.head] = grown
                changed = True
        if not changed:
            break
    return Subrepresentation(w, spaces)


def factor_dims(w: Representation, sub: Subrepresentation) -> dict[str, int]:
    if sub.parent is not w and sub.parent != w:
        raise InvalidSubrepError("subrepresentation of a different representation")
    return {x: w.dims[x] - sub.spaces[x].dim for x in w.quiver.vertices}


def zero_subrep(w: Representation) -> Subrepresentation:
    return Subrepresentation(w, {})


def full_subrep(w: Representation) -> Subrepresentation:
    return Subrepresentation(w, {x: Subspace.full(w.field, w.dims[x]) for x in w.quiver.vertices})
