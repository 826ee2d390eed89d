"""Module sources: H0 of sampled 1-D functions and scrambled synthetic modules.

Sampled functions are piecewise linear between consecutive samples.  All
threshold comparisons use :class:`fractions.Fraction`, so there are no
epsilons anywhere.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import linalg as la
from .errors import InvalidCarrier, OverlapConditionViolated, InputError
from .linalg import FieldSpec
from .module import (PersistenceModule, conjugate, direct_sum_all,
                     interval_module, make_module, zero_module)
from .poset import (FinitePoset, chain, classify_block, connected_components,
                    down_closure, grid, is_interval, up_closure)


def _fractions(values) -> list[Fraction]:
    out = []
    for v in values:
        try:
            out.append(Fraction(v) if not isinstance(v, float) else Fraction(v).limit_denominator(10**12))
        except (TypeError, ValueError):
            raise InputError(f"sample {v!r} is not a rational number") from None
    return out


def _strictly_sorted(name: str, values: list[Fraction]):
    if any(b <= a for a, b in zip(values, values[1:])):
        raise InputError(f"{name} thresholds must be strictly increasing")


@dataclass(frozen=True)
class SampledFunction:
    """Samples ``f(x_0), ..., f(x_{n-1})`` of a piecewise-linear function."""

    values: tuple[Fraction, ...]
    thresholds: tuple[Fraction, ...] = ()
    s_grid: tuple[Fraction, ...] = ()
    t_grid: tuple[Fraction, ...] = ()

    @classmethod
    def of(cls, values, thresholds=(), s_grid=(), t_grid=()) -> "SampledFunction":
        vals = _fractions(values)
        if not vals:
            raise InputError("need at least one sample")
        th, sg, tg = _fractions(thresholds), _fractions(s_grid), _fractions(t_grid)
        _strictly_sorted("sublevel", th)
        _strictly_sorted("s", sg)
        _strictly_sorted("t", tg)
        return cls(tuple(vals), tuple(th), tuple(sg), tuple(tg))


class _UnionFind:
    """Union-find keyed by arbitrary hashables; the root is the elder node.

    Age is ``key(node)``: smaller keys are older and survive merges.
    """

    def __init__(self, key):
        self.parent: dict = {}
        self.key = key

    def add(self, node):
        self.parent.setdefault(node, node)

    def find(self, node):
        root = node
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[node] != root:
            self.parent[node], node = root, self.parent[node]
        return root

    def union(self, a, b):
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.key(rb) < self.key(ra):
            ra, rb = rb, ra
        self.parent[rb] = ra

    def roots(self) -> list:
        return sorted({self.find(v) for v in self.parent}, key=self.key)


def _component_map(src_roots, uf_src, uf_dst, dst_roots) -> np.ndarray:
    col = {r: k for k, r in enumerate(src_roots)}
    row = {r: k for k, r in enumerate(dst_roots)}
    mat = la.zeros(len(dst_roots), len(src_roots))
    for r in src_roots:
        mat[row[uf_dst.find(r)], col[r]] = 1
    return mat


def sublevel_h0(f: SampledFunction, field: FieldSpec | None = None) -> PersistenceModule:
    """H0 of the sublevel sets ``{f <= t_j}`` as a module over Chain(#thresholds).

    Basis vectors are components, ordered by their elder representative
    (lowest value, then lowest index).
    """
    vals, th = f.values, f.thresholds
    if not th:
        raise InputError("sublevel ingestion needs at least one threshold")
    field = field or FieldSpec()
    key = lambda i: (vals[i], i)  # noqa: E731
    states = []
    for t in th:
        uf = _UnionFind(key)
        for i, v in enumerate(vals):
            if v <= t:
                uf.add(i)
        for i in range(len(vals) - 1):
            # the PL segment lies below t iff both endpoints do
            if vals[i] <= t and vals[i + 1] <= t:
                uf.union(i, i + 1)
        states.append((uf, uf.roots()))
    dims = [len(r) for _, r in states]
    poset = chain(len(th))
    maps = {}
    for j in range(len(th) - 1):
        (uf_a, ra), (uf_b, rb) = states[j], states[j + 1]
        maps[(j, j + 1)] = _component_map(ra, uf_a, uf_b, rb)
    return make_module(poset, dims, maps, field, check=False)


def _band_pieces(vals: Sequence[Fraction], s: Fraction, t: Fraction) -> _UnionFind:
    """Components of ``{x : s < f(x) < t}`` for the PL interpolation.

    Nodes are ``("v", i)`` for samples in the band and ``("e", i)`` for the
    open segment between samples i and i+1 when it meets the band.
    """
    order = lambda node: (2 * node[1] + (node[0] == "e"),)  # noqa: E731
    uf = _UnionFind(order)
    inside = [s < v < t for v in vals]
    for i, ok in enumerate(inside):
        if ok:
            uf.add(("v", i))
    for i in range(len(vals) - 1):
        a, b = vals[i], vals[i + 1]
        lo, hi = min(a, b), max(a, b)
        if lo == hi:
            meets = s < lo < t
        else:
            meets = max(lo, s) < min(hi, t)
        if not meets:
            continue
        uf.add(("e", i))
        if inside[i]:
            uf.union(("e", i), ("v", i))
        if inside[i + 1]:
            uf.union(("e", i), ("v", i + 1))
    return uf


def interlevel_h0(f: SampledFunction, field: FieldSpec | None = None) -> PersistenceModule:
    """H0 of the interlevel sets ``{s_i < f < t_j}`` over Grid(#s, #t).

    Axis 0 runs through the s grid in decreasing order and axis 1 through
    the t grid increasingly, so every arrow enlarges the set.  Requires
    ``max(s) < min(t)``; the result is checked to be middle exact.
    """
    from .structure import check_middle_exact

    sg, tg = f.s_grid, f.t_grid
    if not sg or not tg:
        raise InputError("interlevel ingestion needs non-empty s and t grids")
    if not max(sg) < min(tg):
        raise OverlapConditionViolated(f"max(s)={max(sg)} must be below min(t)={min(tg)}")
    field = field or FieldSpec()
    s_axis = list(reversed(sg))
    m, n = len(s_axis), len(tg)
    poset = grid(m, n)
    states = {}
    for i, s in enumerate(s_axis):
        for j, t in enumerate(tg):
            uf = _band_pieces(f.values, s, t)
            states[(i, j)] = (uf, uf.roots())
    dims = [len(states[lab][1]) for lab in poset.labels]
    maps = {}
    for a, b in poset.covers:
        (uf_a, ra), (uf_b, rb) = states[poset.labels[a]], states[poset.labels[b]]
        maps[(a, b)] = _component_map(ra, uf_a, uf_b, rb)
    module = make_module(poset, dims, maps, field, check=True)
    report = check_middle_exact(module)
    if not report.ok:
        raise AssertionError(f"interlevel module is not middle exact at {report.square}")
    return module


# --- synthetic modules ---------------------------------------------------------

@dataclass(frozen=True)
class GeneratorSpec:
    """Carriers (with multiplicities) of a scrambled direct sum of interval modules."""

    poset: FinitePoset
    carriers: tuple[tuple[frozenset, int], ...]
    scramble: bool = True
    seed: int = 0
    field: FieldSpec = field(default_factory=FieldSpec)

    @classmethod
    def of(cls, poset, carriers, scramble=True, seed=0, field=None) -> "GeneratorSpec":
        norm = []
        for item in carriers:
            if isinstance(item, tuple) and len(item) == 2 and isinstance(item[1], int) \
                    and not isinstance(item[0], int):
                c, mult = item
            else:
                c, mult = item, 1
            norm.append((frozenset(int(x) for x in c), int(mult)))
        return cls(poset, tuple(norm), scramble, seed, field or FieldSpec())


@dataclass(frozen=True, eq=False)
class Generated:
    module: PersistenceModule
    truth: tuple[tuple[frozenset, int], ...]
    conjugators: tuple[np.ndarray, ...]
    unscrambled: PersistenceModule = None

    @property
    def truth_modules(self) -> list[PersistenceModule]:
        out = []
        for c, mult in self.truth:
            out.extend([interval_module(self.module.poset, c, self.module.field)] * mult)
        return out

    @property
    def blocks(self):
        """Ground truth as ``(carrier, block tags, multiplicity)`` on grid-like posets."""
        return tuple((c, classify_block(c, self.module.poset), mult) for c, mult in self.truth)


def random_module(spec: GeneratorSpec) -> Generated:
    """Scrambled ⊕ k_I over the requested carriers; deterministic per seed."""
    poset, fld = spec.poset, spec.field
    parts = []
    for c, mult in spec.carriers:
        if mult < 0:
            raise InvalidCarrier(f"negative multiplicity for {sorted(c)}")
        if not c or not is_interval(poset, c):
            raise InvalidCarrier(f"{sorted(c)} is not an interval of the poset")
        parts.extend([interval_module(poset, c, fld)] * mult)
    truth = tuple(sorted(((c, mult) for c, mult in spec.carriers if mult),
                         key=lambda cm: (sorted(cm[0]), cm[1])))
    if not parts:
        base = zero_module(poset, fld)
    else:
        base = direct_sum_all(parts).module
    rng = np.random.default_rng(spec.seed)
    if spec.scramble:
        changes = tuple(la.random_invertible(rng, d, fld.p) for d in base.dims)
    else:
        changes = tuple(la.identity(d) for d in base.dims)
    module, _ = conjugate(base, changes)
    return Generated(module, truth, changes, base)


def random_interval(poset: FinitePoset, rng: np.random.Generator) -> frozenset[int]:
    """A random interval: a connected component of (ideal ∩ filter)."""
    n = poset.size
    while True:
        tops = rng.choice(n, size=min(n, int(rng.integers(1, 3))), replace=False)
        bots = rng.choice(n, size=min(n, int(rng.integers(1, 3))), replace=False)
        conv = down_closure(poset, tops.tolist()) & up_closure(poset, bots.tolist())
        if not conv:
            continue
        comps = connected_components(poset, conv)
        return comps[int(rng.integers(len(comps)))]


def random_block(poset: FinitePoset, rng: np.random.Generator, kinds=("db", "bb", "vb", "hb")) -> frozenset[int]:
    """A random block (∩ region for triangle posets), non-empty."""
    m, n = poset.grid_dims
    region = set(poset.labels)
    while True:
        kind = kinds[int(rng.integers(len(kinds)))]
        a, b = sorted(rng.integers(0, m, size=2).tolist())
        u, v = sorted(rng.integers(0, n, size=2).tolist())
        if kind == "db":
            rect = ((0, b), (0, v))
        elif kind == "bb":
            rect = ((a, m - 1), (u, n - 1))
        elif kind == "vb":
            rect = ((a, b), (0, n - 1))
        else:
            rect = ((0, m - 1), (u, v))
        (i0, i1), (j0, j1) = rect
        pts = {(i, j) for i in range(i0, i1 + 1) for j in range(j0, j1 + 1)} & region
        if pts:
            return frozenset(poset.index(pt) for pt in pts)
