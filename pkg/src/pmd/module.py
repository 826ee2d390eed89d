"""Persistence modules over finite posets and morphisms between them.

A module stores one matrix per cover arrow ``x -> y`` of shape
``dims[y] x dims[x]``; every other structure map is the composite along a
canonical cover path.  Zero-dimensional points keep their ``0 x k`` / ``k x 0``
matrices so nothing is ever re-indexed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import linalg as la
from .errors import (NotAGrid, NotAnInterval, PosetMismatch, ShapeMismatch,
                     ValidationError)
from .linalg import FieldSpec, Subspace
from .poset import FinitePoset, induced_subposet, is_interval, opposite


@dataclass(frozen=True, eq=False)
class PersistenceModule:
    poset: FinitePoset
    field: FieldSpec
    dims: tuple[int, ...]
    maps: Mapping[tuple[int, int], np.ndarray] = field(repr=False)

    @property
    def p(self) -> int:
        return self.field.p

    @property
    def total_dim(self) -> int:
        return int(sum(self.dims))

    @property
    def support(self) -> frozenset[int]:
        return frozenset(x for x, d in enumerate(self.dims) if d)

    def is_zero(self) -> bool:
        return self.total_dim == 0

    def __eq__(self, other):
        if not isinstance(other, PersistenceModule):
            return NotImplemented
        return (self.poset == other.poset and self.field == other.field
                and self.dims == other.dims
                and all(np.array_equal(self.maps[c], other.maps[c]) for c in self.poset.covers))

    __hash__ = None

    def map_between(self, a: int, b: int) -> np.ndarray:
        """The structure map M_a -> M_b for a <= b (composed along covers)."""
        key = (a, b)
        cache = self._composites()
        if key not in cache:
            if a == b:
                cache[key] = la.identity(self.dims[a])
            else:
                out = la.identity(self.dims[a])
                for src, dst in self.poset.cover_path(a, b):
                    out = la.matmul(self.maps[(src, dst)], out, self.p)
                cache[key] = out
        return cache[key]

    def _composites(self) -> dict:
        cache = self.__dict__.get("_comp")
        if cache is None:
            cache = {}
            object.__setattr__(self, "_comp", cache)
        return cache

    def __repr__(self):
        return f"PersistenceModule(shape={self.poset.shape.__class__.__name__}, dims={self.dims}, p={self.p})"


def make_module(poset: FinitePoset, dims: Sequence[int], maps: Mapping | None = None,
                field: FieldSpec | int | None = None, check: bool = True) -> PersistenceModule:
    """Build a module; missing cover maps default to zero.

    Raises ShapeMismatch on inconsistent sizes and, when ``check`` is set,
    ValidationError if some pair of cover paths disagrees.
    """
    if field is None:
        field = FieldSpec()
    elif not isinstance(field, FieldSpec):
        field = FieldSpec(int(field))
    p = field.p
    dims = tuple(int(d) for d in dims)
    if len(dims) != poset.size:
        raise ShapeMismatch(f"expected {poset.size} dimensions, got {len(dims)}")
    if any(d < 0 for d in dims):
        raise ShapeMismatch(f"negative dimension in {dims}")
    maps = dict(maps or {})
    unknown = set(maps) - set(poset.covers)
    if unknown:
        raise ShapeMismatch(f"maps given for non-cover arrows {sorted(unknown)}")
    stored = {}
    for a, b in poset.covers:
        shape = (dims[b], dims[a])
        if (a, b) in maps:
            try:
                mat = la.as_matrix(maps[(a, b)], p, shape)
            except Exception as exc:
                raise ShapeMismatch(f"map {a}->{b}: {exc}") from None
        else:
            mat = la.zeros(*shape)
        mat.setflags(write=False)
        stored[(a, b)] = mat
    module = PersistenceModule(poset, field, dims, stored)
    if check:
        report = validate(module)
        if not report.ok:
            raise ValidationError(report.message, report.square)
    return module


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    square: tuple | None = None
    message: str = "ok"


def _topological(poset: FinitePoset) -> list[int]:
    below = poset.leq.sum(axis=0)
    return sorted(poset.elements, key=lambda x: (int(below[x]), x))


def validate(module: PersistenceModule) -> ValidationReport:
    """Check path independence of the structure maps.

    For every cover ``a -> b`` and every ``d >= b`` the composite through
    ``b`` must agree with the canonical composite ``a -> d``; by induction on
    path length that makes all cover paths agree.  The first failure is
    reported as ``(a, b, c, d)``: two paths ``a->b~>d`` and ``a->c~>d``.
    """
    poset, p = module.poset, module.p
    for a, b in poset.covers:
        if module.maps[(a, b)].shape != (module.dims[b], module.dims[a]):
            raise ShapeMismatch(f"map {a}->{b} has shape {module.maps[(a, b)].shape}")
    order = _topological(poset)
    for d in order:
        for a in order:
            if a == d or not poset.leq[a, d]:
                continue
            succ = sorted(s for s in poset.successors(a) if poset.leq[s, d])
            if len(succ) < 2:
                continue
            c = succ[0]
            ref = la.matmul(module.map_between(c, d), module.maps[(a, c)], p)
            for b in succ[1:]:
                other = la.matmul(module.map_between(b, d), module.maps[(a, b)], p)
                if not np.array_equal(ref, other):
                    labs = poset.labels
                    return ValidationReport(
                        False, (a, c, b, d),
                        f"non-commuting square {labs[a]} -> {labs[c]}, {labs[b]} -> {labs[d]}")
    return ValidationReport(True)


def interval_module(poset: FinitePoset, carrier, field: FieldSpec | int | None = None) -> PersistenceModule:
    """The constant module k_I: 1-dimensional on I, identity maps inside I."""
    c = frozenset(int(x) for x in carrier)
    if not is_interval(poset, c):
        raise NotAnInterval(f"{sorted(c)} is not an interval of the poset")
    dims = [1 if x in c else 0 for x in poset.elements]
    maps = {(a, b): [[1]] for a, b in poset.covers if a in c and b in c}
    return make_module(poset, dims, maps, field, check=False)


def zero_module(poset: FinitePoset, field: FieldSpec | int | None = None) -> PersistenceModule:
    return make_module(poset, [0] * poset.size, {}, field, check=False)


# --- morphisms -----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Morphism:
    """A family of matrices ``f_x: M_x -> N_x`` (shape ``dims_N[x] x dims_M[x]``)."""

    source: PersistenceModule = field(repr=False)
    target: PersistenceModule = field(repr=False)
    comps: tuple[np.ndarray, ...]

    @property
    def p(self) -> int:
        return self.source.p

    def __getitem__(self, x: int) -> np.ndarray:
        return self.comps[x]

    def is_valid(self) -> bool:
        """Commutes with the structure maps of both modules."""
        p = self.p
        for a, b in self.source.poset.covers:
            lhs = la.matmul(self.target.maps[(a, b)], self.comps[a], p)
            rhs = la.matmul(self.comps[b], self.source.maps[(a, b)], p)
            if not np.array_equal(lhs, rhs):
                return False
        return True

    def is_mono(self) -> bool:
        return all(la.rank(f, self.p) == f.shape[1] for f in self.comps)

    def is_epi(self) -> bool:
        return all(la.rank(f, self.p) == f.shape[0] for f in self.comps)

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_epi()

    def is_zero(self) -> bool:
        return all(not f.any() for f in self.comps)

    def compose(self, first: "Morphism") -> "Morphism":
        """``self ∘ first``."""
        p = self.p
        return Morphism(first.source, self.target,
                        tuple(la.matmul(g, f, p) for g, f in zip(self.comps, first.comps)))

    def __matmul__(self, other: "Morphism") -> "Morphism":
        return self.compose(other)

    def __add__(self, other: "Morphism") -> "Morphism":
        p = self.p
        return Morphism(self.source, self.target,
                        tuple((f + g) % p for f, g in zip(self.comps, other.comps)))

    def __sub__(self, other: "Morphism") -> "Morphism":
        p = self.p
        return Morphism(self.source, self.target,
                        tuple((f - g) % p for f, g in zip(self.comps, other.comps)))

    def scale(self, c: int) -> "Morphism":
        p = self.p
        return Morphism(self.source, self.target, tuple((f * (int(c) % p)) % p for f in self.comps))

    def inverse(self) -> "Morphism":
        return Morphism(self.target, self.source, tuple(la.inverse(f, self.p) for f in self.comps))

    def flatten(self) -> np.ndarray:
        if not self.comps:
            return la.zeros(0, 0).ravel()
        return np.concatenate([f.ravel() for f in self.comps])

    def equals(self, other: "Morphism") -> bool:
        return all(np.array_equal(f, g) for f, g in zip(self.comps, other.comps))

    def block_diagonal(self) -> np.ndarray:
        """⊕_x f_x as one square matrix (endomorphisms only)."""
        n = self.source.total_dim
        out = la.zeros(n, n)
        off = 0
        for f in self.comps:
            k = f.shape[0]
            out[off:off + k, off:off + k] = f
            off += k
        return out


def identity_morphism(module: PersistenceModule) -> Morphism:
    return Morphism(module, module, tuple(la.identity(d) for d in module.dims))


def zero_morphism(source: PersistenceModule, target: PersistenceModule) -> Morphism:
    return Morphism(source, target, tuple(la.zeros(b, a) for a, b in zip(source.dims, target.dims)))


def morphism_from_flat(source: PersistenceModule, target: PersistenceModule, vec: np.ndarray) -> Morphism:
    comps = []
    off = 0
    for a, b in zip(source.dims, target.dims):
        comps.append(np.asarray(vec[off:off + a * b], dtype=np.int64).reshape(b, a))
        off += a * b
    return Morphism(source, target, tuple(comps))


# --- constructions -------------------------------------------------------------

def _same_base(*modules: PersistenceModule):
    first = modules[0]
    for m in modules[1:]:
        if m.poset != first.poset:
            raise PosetMismatch("modules live over different posets")
        if m.field != first.field:
            raise PosetMismatch(f"modules live over F_{first.p} and F_{m.p}")


@dataclass(frozen=True, eq=False)
class DirectSum:
    module: PersistenceModule
    embeddings: tuple[Morphism, ...]
    projections: tuple[Morphism, ...]


def direct_sum_all(modules: Sequence[PersistenceModule]) -> DirectSum:
    """Pointwise direct sum with canonical embeddings and projections."""
    if not modules:
        raise ValueError("need at least one module")
    _same_base(*modules)
    first = modules[0]
    poset, p = first.poset, first.p
    dims = [sum(m.dims[x] for m in modules) for x in poset.elements]
    maps = {}
    for a, b in poset.covers:
        out = la.zeros(dims[b], dims[a])
        ra = rb = 0
        for m in modules:
            blk = m.maps[(a, b)]
            out[rb:rb + blk.shape[0], ra:ra + blk.shape[1]] = blk
            ra += m.dims[a]
            rb += m.dims[b]
        maps[(a, b)] = out
    total = make_module(poset, dims, maps, first.field, check=False)
    embs, projs = [], []
    offsets = [0] * poset.size
    for m in modules:
        e_comps, p_comps = [], []
        for x in poset.elements:
            e = la.zeros(dims[x], m.dims[x])
            e[offsets[x]:offsets[x] + m.dims[x], :] = la.identity(m.dims[x])
            e_comps.append(e)
            p_comps.append(e.T.copy())
            offsets[x] += m.dims[x]
        embs.append(Morphism(m, total, tuple(e_comps)))
        projs.append(Morphism(total, m, tuple(p_comps)))
    return DirectSum(total, tuple(embs), tuple(projs))


def direct_sum(m: PersistenceModule, n: PersistenceModule) -> DirectSum:
    return direct_sum_all([m, n])


def restrict(module: PersistenceModule, elements: Iterable[int]) -> PersistenceModule:
    """M|_Q; new ids follow the order of ``elements`` (duplicates dropped)."""
    elems = list(dict.fromkeys(int(x) for x in elements))
    sub = induced_subposet(module.poset, elems)
    dims = [module.dims[x] for x in elems]
    maps = {(a, b): module.map_between(elems[a], elems[b]) for a, b in sub.covers}
    return make_module(sub, dims, maps, module.field, check=False)


def dualize(module: PersistenceModule) -> PersistenceModule:
    """DM over the opposite poset: same dims, transposed maps on reversed arrows."""
    op = opposite(module.poset)
    maps = {(b, a): module.maps[(a, b)].T.copy() for a, b in module.poset.covers}
    return make_module(op, module.dims, maps, module.field, check=False)


def conjugate(module: PersistenceModule, changes: Sequence[np.ndarray]) -> tuple[PersistenceModule, Morphism]:
    """Change basis pointwise by invertible ``changes[x]``; returns (M', iso M -> M')."""
    p = module.p
    inv = [la.inverse(c, p) for c in changes]
    maps = {(a, b): la.mat_chain(p, changes[b], module.maps[(a, b)], inv[a])
            for a, b in module.poset.covers}
    new = make_module(module.poset, module.dims, maps, module.field, check=False)
    return new, Morphism(module, new, tuple(np.asarray(c, dtype=np.int64) % p for c in changes))


def reindex_grid_reversed(module: PersistenceModule) -> PersistenceModule:
    """Carry a module over Opposite(Grid(m, n)) to Grid(m, n) via (i,j) -> (m-1-i, n-1-j)."""
    from .poset import Grid, Opposite, grid
    shape = module.poset.shape
    if not (isinstance(shape, Opposite) and isinstance(shape.base.shape, Grid)):
        raise NotAGrid("expected a module over the opposite of a grid")
    m, n = shape.base.shape.m, shape.base.shape.n
    target = grid(m, n)
    perm = [target.index((m - 1 - i, n - 1 - j)) for i, j in module.poset.labels]
    dims = [0] * target.size
    for x, d in enumerate(module.dims):
        dims[perm[x]] = d
    maps = {(perm[a], perm[b]): mat for (a, b), mat in module.maps.items()}
    return make_module(target, dims, maps, module.field, check=False)


# --- submodules ----------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SubmoduleFamily:
    """One subspace of M_x per element x."""

    module: PersistenceModule = field(repr=False)
    spaces: tuple[Subspace, ...]

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(s.dim for s in self.spaces)

    def is_submodule(self) -> bool:
        m = self.module
        for a, b in m.poset.covers:
            img = la.matmul(m.maps[(a, b)], self.spaces[a].columns, m.p)
            if not self.spaces[b].contains(img):
                return False
        return True

    def meet(self, other: "SubmoduleFamily") -> "SubmoduleFamily":
        return SubmoduleFamily(self.module, tuple(la.subspace_meet(u, v) for u, v in zip(self.spaces, other.spaces)))

    def join(self, other: "SubmoduleFamily") -> "SubmoduleFamily":
        return SubmoduleFamily(self.module, tuple(la.subspace_join(u, v) for u, v in zip(self.spaces, other.spaces)))

    def __eq__(self, other):
        if not isinstance(other, SubmoduleFamily):
            return NotImplemented
        return self.spaces == other.spaces

    __hash__ = None

    def is_zero(self) -> bool:
        return all(s.dim == 0 for s in self.spaces)

    def is_everything(self) -> bool:
        return all(s.dim == d for s, d in zip(self.spaces, self.module.dims))

    def as_module(self) -> tuple[PersistenceModule, Morphism]:
        """The submodule as a module in its own right, plus its inclusion."""
        m, p = self.module, self.module.p
        cols = [s.columns for s in self.spaces]
        maps = {}
        for a, b in m.poset.covers:
            img = la.matmul(m.maps[(a, b)], cols[a], p)
            maps[(a, b)] = la.solve(cols[b], img, p)
        sub = make_module(m.poset, self.dims, maps, m.field, check=False)
        return sub, Morphism(sub, m, tuple(cols))


def full_family(module: PersistenceModule) -> SubmoduleFamily:
    return SubmoduleFamily(module, tuple(Subspace.full(d, module.p) for d in module.dims))


def zero_family(module: PersistenceModule) -> SubmoduleFamily:
    return SubmoduleFamily(module, tuple(Subspace.zero(d, module.p) for d in module.dims))


def directional_submodules(module: PersistenceModule, exhaustive: bool = False) -> dict[str, SubmoduleFamily]:
    """Im M^←, Im M^↓, Ker M^→, Ker M^↑ on a Grid module.

    Keys: ``"im_left"``, ``"im_down"``, ``"ker_right"``, ``"ker_up"``.  By
    default only the extreme arrow of each row/column is used; with
    ``exhaustive=True`` the intersection (resp. sum) over every arrow is
    taken instead, which must give the same answer on a finite grid.
    """
    poset = module.poset
    if not poset.is_grid:
        raise NotAGrid("directional submodules need a Grid poset")
    m, n = poset.grid_dims
    p = module.p
    idx = poset.index

    def image(a, b):
        return la.image_basis(module.map_between(a, b), p)

    def kernel(a, b):
        return la.kernel_basis(module.map_between(a, b), p)

    out = {k: [] for k in ("im_left", "im_down", "ker_right", "ker_up")}
    for x, (i, j) in enumerate(poset.labels):
        if exhaustive:
            def meet_all(spaces):
                acc = Subspace.full(module.dims[x], p)
                for s in spaces:
                    acc = la.subspace_meet(acc, s)
                return acc

            def join_all(spaces):
                acc = Subspace.zero(module.dims[x], p)
                for s in spaces:
                    acc = la.subspace_join(acc, s)
                return acc

            out["im_left"].append(meet_all(image(idx((q, j)), x) for q in range(i + 1)))
            out["im_down"].append(meet_all(image(idx((i, q)), x) for q in range(j + 1)))
            out["ker_right"].append(join_all(kernel(x, idx((q, j))) for q in range(i, m)))
            out["ker_up"].append(join_all(kernel(x, idx((i, q))) for q in range(j, n)))
        else:
            out["im_left"].append(image(idx((0, j)), x))
            out["im_down"].append(image(idx((i, 0)), x))
            out["ker_right"].append(kernel(x, idx((m - 1, j))))
            out["ker_up"].append(kernel(x, idx((i, n - 1))))
    return {k: SubmoduleFamily(module, tuple(v)) for k, v in out.items()}
