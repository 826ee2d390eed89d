"""Specialised structure algorithms: barcodes, blocks and zigzag extension.

* :func:`barcode_chain` reads bars off a chain module with a left-to-right
  elder-rule sweep, independently of the generic decomposer.
* :func:`check_middle_exact` tests every unit square of a grid-like module.
* :func:`block_decompose` / :func:`verify_triangle_blocks` run the generic
  decomposer and insist that every summand is a block module.
* :func:`extend_zigzag` extends a fence module to the surrounding window by
  kernels below the path and cokernels above it.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from . import linalg as la
from .decomp import decompose
from .errors import (NonBlockSummand, NotAChain, NotGridLike, NotMiddleExact,
                     PathDoesNotCrossWindow, RouteDisagreement,
                     CounterexampleFound, InputError)
from .homspace import basis_isomorphism
from .module import (PersistenceModule, directional_submodules,
                     interval_module, make_module)
from .poset import (Chain, FinitePoset, Grid, TriangleRegion, ZigzagFence,
                    classify_block, grid, is_interval, region_split)


# --- result types --------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class Barcode:
    """Multiset of interval carriers (element-id frozensets)."""

    poset: FinitePoset = field(repr=False)
    bars: tuple[tuple[frozenset, int], ...]

    @classmethod
    def from_counter(cls, poset, counts) -> "Barcode":
        items = sorted(((frozenset(c), int(k)) for c, k in counts.items() if k),
                       key=lambda cm: (min(cm[0]), max(cm[0]), sorted(cm[0])))
        return cls(poset, tuple(items))

    def counter(self) -> Counter:
        return Counter({c: k for c, k in self.bars})

    def __eq__(self, other):
        if not isinstance(other, Barcode):
            return NotImplemented
        return self.counter() == other.counter()

    __hash__ = None

    def __len__(self):
        return sum(k for _, k in self.bars)

    def pointwise_dims(self) -> tuple[int, ...]:
        dims = [0] * self.poset.size
        for c, k in self.bars:
            for x in c:
                dims[x] += k
        return tuple(dims)

    def as_pairs(self) -> list[tuple[int, int, int]]:
        """``(birth, death, multiplicity)`` for chain barcodes (death inclusive)."""
        return [(min(c), max(c), k) for c, k in self.bars]

    def __repr__(self):
        return f"Barcode({[(sorted(c), k) for c, k in self.bars]})"


@dataclass(frozen=True, eq=False)
class BlockList(Barcode):
    """Barcode on a grid-like poset with the block types of each carrier."""

    tags: tuple[frozenset, ...] = ()

    @classmethod
    def from_counter(cls, poset, counts) -> "BlockList":
        base = Barcode.from_counter(poset, counts)
        tags = tuple(classify_block(c, poset) for c, _ in base.bars)
        return cls(poset, base.bars, tags)

    def entries(self) -> list[tuple[frozenset, frozenset, int]]:
        return [(c, t, k) for (c, k), t in zip(self.bars, self.tags)]

    def rectangles(self) -> list[tuple[tuple[int, int], tuple[int, int]]]:
        """Coordinate bounding boxes ``((i0, i1), (j0, j1))`` of each carrier."""
        out = []
        for c, _ in self.bars:
            pts = [self.poset.labels[x] for x in c]
            out.append(((min(i for i, _ in pts), max(i for i, _ in pts)),
                        (min(j for _, j in pts), max(j for _, j in pts))))
        return out

    def __repr__(self):
        return f"BlockList({[(sorted(c), sorted(t or ()), k) for (c, k), t in zip(self.bars, self.tags)]})"


# --- chains --------------------------------------------------------------------

def barcode_chain(module: PersistenceModule) -> Barcode:
    """Barcode of a chain module by a left-to-right elder-rule sweep.

    Alive vectors are pushed forward one step at a time and reduced oldest
    first; a vector that becomes dependent on older ones ends its bar.  New
    standard basis vectors fill out each space and start new bars.
    """
    if not isinstance(module.poset.shape, Chain):
        raise NotAChain("barcode_chain needs a module over a Chain poset")
    p = module.p
    n = module.poset.size
    alive: list[tuple[int, np.ndarray]] = []
    bars: Counter = Counter()
    for i in range(n):
        d = module.dims[i]
        if i:
            step = module.maps[(i - 1, i)]
            alive = [(b, la.matmul(step, v, p)) for b, v in alive]
        kept: list[tuple[int, np.ndarray]] = []
        span = la.zeros(0, d)
        for birth, v in alive:
            cand = np.vstack([span, v.T])
            if la.rank(cand, p) > span.shape[0]:
                kept.append((birth, v))
                span = cand
            else:
                bars[frozenset(range(birth, i))] += 1
        for k in range(d):
            e = la.zeros(d, 1)
            e[k, 0] = 1
            cand = np.vstack([span, e.T])
            if la.rank(cand, p) > span.shape[0]:
                kept.append((i, e))
                span = cand
        alive = kept
    for birth, _ in alive:
        bars[frozenset(range(birth, n))] += 1
    return Barcode.from_counter(module.poset, bars)


# --- middle exactness ----------------------------------------------------------

@dataclass(frozen=True)
class SquareReport:
    corners: tuple[int, int, int, int]
    middle_exact: bool
    short_exact: bool


@dataclass(frozen=True, eq=False)
class MiddleExactReport:
    ok: bool
    squares: tuple[SquareReport, ...]
    square: tuple | None = None

    @property
    def short_exact(self) -> bool:
        return all(s.short_exact for s in self.squares)


def square_exactness(module: PersistenceModule, a: int, b: int, c: int, d: int) -> tuple[bool, bool]:
    """(middle exact, short exact) for ``M_a -> M_b ⊕ M_c -> M_d``."""
    p = module.p
    into = np.vstack([module.map_between(a, b), module.map_between(a, c)])
    out = np.hstack([module.map_between(b, d), (-module.map_between(c, d)) % p])
    r_in, r_out = la.rank(into, p), la.rank(out, p)
    middle = module.dims[b] + module.dims[c] - r_out
    exact = r_in == middle
    return exact, exact and r_in == module.dims[a] and r_out == module.dims[d]


def check_rectangle(module: PersistenceModule, lower: tuple[int, int], upper: tuple[int, int]) -> tuple[bool, bool]:
    """Exactness on the rectangle with corners ``lower <= upper`` (coordinates)."""
    (x, y), (x2, y2) = lower, upper
    idx = module.poset.index
    return square_exactness(module, idx((x, y)), idx((x, y2)), idx((x2, y)), idx((x2, y2)))


def _unit_squares(poset: FinitePoset):
    labels = set(poset.labels)
    for (i, j) in poset.labels:
        corners = ((i, j), (i, j + 1), (i + 1, j), (i + 1, j + 1))
        if all(c in labels for c in corners):
            yield tuple(poset.index(c) for c in corners)


def check_middle_exact(module: PersistenceModule) -> MiddleExactReport:
    """Check exactness at the middle of every unit square.

    Corners are ``a = (i, j)``, ``b = (i, j+1)``, ``c = (i+1, j)``,
    ``d = (i+1, j+1)``.  Also records whether each square is short exact.
    """
    if not module.poset.is_grid_like:
        raise NotGridLike("middle exactness needs a Grid or TriangleRegion module")
    squares = []
    first_bad = None
    for corners in _unit_squares(module.poset):
        mid, short = square_exactness(module, *corners)
        squares.append(SquareReport(corners, mid, short))
        if not mid and first_bad is None:
            first_bad = tuple(module.poset.labels[x] for x in corners)
    return MiddleExactReport(first_bad is None, tuple(squares), first_bad)


def lemma_short_exact_identities(module: PersistenceModule) -> tuple[bool, bool]:
    """(Ker^→ ∩ Ker^↑ = 0, Im^← + Im^↓ = M) pointwise on a Grid module."""
    fam = directional_submodules(module)
    kernels = fam["ker_right"].meet(fam["ker_up"])
    images = fam["im_left"].join(fam["im_down"])
    return kernels.is_zero(), images.is_everything()


# --- blocks --------------------------------------------------------------------

def _summand_carrier(summand) -> frozenset[int]:
    mod = summand.module
    supp = mod.support
    if any(d > 1 for d in mod.dims) or not is_interval(mod.poset, supp):
        raise NonBlockSummand(supp, f"summand with dims {mod.dims} is not an interval module")
    if basis_isomorphism(mod, interval_module(mod.poset, supp, mod.field)) is None:
        raise NonBlockSummand(supp, f"summand on {sorted(supp)} is not isomorphic to k_I")
    return supp


def _blocks(module: PersistenceModule, seed: int) -> BlockList:
    report = check_middle_exact(module)
    if not report.ok:
        raise NotMiddleExact(report.square)
    dec = decompose(module, seed)
    counts: Counter = Counter()
    for s in dec:
        c = _summand_carrier(s)
        if classify_block(c, module.poset) is None:
            raise NonBlockSummand(c)
        counts[c] += 1
    return BlockList.from_counter(module.poset, counts)


def block_decompose(module: PersistenceModule, seed: int = 0) -> BlockList:
    """Block decomposition of a middle exact module over a grid."""
    if not module.poset.is_grid:
        raise NotGridLike("block_decompose needs a Grid module")
    return _blocks(module, seed)


def verify_triangle_blocks(module: PersistenceModule, seed: int = 0) -> BlockList:
    """Block decomposition over a triangular region; blocks mean block ∩ region."""
    if not isinstance(module.poset.shape, TriangleRegion):
        raise NotGridLike("verify_triangle_blocks needs a TriangleRegion module")
    return _blocks(module, seed)


# --- zigzags -------------------------------------------------------------------

def fence_grid_ids(path, window: FinitePoset) -> list[int]:
    """Window-grid element ids of the fence points, in path order."""
    (x0, _), (y0, _) = path.window
    return [window.index((x - x0, y - y0)) for x, y in path.points()]


def extend_zigzag(module: PersistenceModule) -> PersistenceModule:
    """Extend a fence module to a middle exact module on the path's window.

    Below the path each space is the kernel of ``E_b ⊕ E_c -> E_d`` built
    from its upper and right neighbours; above it each space is the cokernel
    of ``E_a -> E_b ⊕ E_c`` from its lower and left neighbours, with the
    quotient taken onto the non-pivot coordinates.  The fence itself is kept
    verbatim, so restricting back gives the input exactly.
    """
    shape = module.poset.shape
    if not isinstance(shape, ZigzagFence):
        raise InputError("extend_zigzag needs a module over a ZigzagFence")
    path = shape.path
    if not path.crosses_corner_to_corner:
        raise PathDoesNotCrossWindow(
            f"path {path.points()[0]}..{path.points()[-1]} must run from the top-left "
            f"to the bottom-right corner of window {path.window}")
    p = module.p
    (x0, x1), (y0, y1) = path.window
    pts = path.points()
    labels = region_split(path)
    dim: dict = {}
    arrow: dict = {}
    for k, pt in enumerate(pts):
        dim[pt] = module.dims[k]
    for k, step in enumerate(path.steps):
        if step == "R":
            arrow[(pts[k], pts[k + 1])] = module.maps[(k, k + 1)]
        else:
            arrow[(pts[k + 1], pts[k])] = module.maps[(k + 1, k)]

    lower = sorted((pt for pt, lab in labels.items() if lab == "L"), key=lambda q: -(q[0] + q[1]))
    for (s, t) in lower:
        b, c, d = (s, t + 1), (s + 1, t), (s + 1, t + 1)
        out = np.hstack([arrow[(b, d)], (-arrow[(c, d)]) % p])
        kern = la.kernel_basis(out, p).columns
        dim[(s, t)] = kern.shape[1]
        arrow[((s, t), b)] = kern[:dim[b]].copy()
        arrow[((s, t), c)] = kern[dim[b]:].copy()

    upper = sorted((pt for pt, lab in labels.items() if lab == "U"), key=lambda q: q[0] + q[1])
    for (s, t) in upper:
        a, b, c = (s - 1, t - 1), (s, t - 1), (s - 1, t)
        into = np.vstack([arrow[(a, b)], arrow[(a, c)]])
        quot = la.complement_quotient(la.image_basis(into, p))
        dim[(s, t)] = quot.shape[0]
        arrow[(b, (s, t))] = quot[:, :dim[b]].copy()
        arrow[(c, (s, t))] = (-quot[:, dim[b]:]) % p

    window = grid(x1 - x0 + 1, y1 - y0 + 1)

    def absolute(x):
        i, j = window.labels[x]
        return (x0 + i, y0 + j)

    dims = [dim[absolute(x)] for x in window.elements]
    maps = {}
    for a, b in window.covers:
        key = (absolute(a), absolute(b))
        if key not in arrow:
            raise AssertionError(f"extension left arrow {key} undefined")
        maps[(a, b)] = arrow[key]
    return make_module(window, dims, maps, module.field, check=True)


def _fence_barcode_generic(module: PersistenceModule, seed: int) -> Barcode:
    counts: Counter = Counter()
    for s in decompose(module, seed):
        counts[_summand_carrier(s)] += 1
    return Barcode.from_counter(module.poset, counts)


def zigzag_barcode(module: PersistenceModule, seed: int = 0) -> Barcode:
    """Barcode of a fence module, computed by two independent routes.

    (a) generic decomposition; (b) extension to the window, block
    decomposition there, and intersection of every block with the fence.
    Raises RouteDisagreement if they differ.
    """
    if not isinstance(module.poset.shape, ZigzagFence):
        raise InputError("zigzag_barcode needs a module over a ZigzagFence")
    route_a = _fence_barcode_generic(module, seed)
    ext = extend_zigzag(module)
    blocks = block_decompose(ext, seed)
    fence_ids = fence_grid_ids(module.poset.shape.path, ext.poset)
    pos = {g: k for k, g in enumerate(fence_ids)}
    counts: Counter = Counter()
    for carrier, mult in blocks.bars:
        on_fence = frozenset(pos[g] for g in carrier if g in pos)
        if on_fence:
            counts[on_fence] += mult
    route_b = Barcode.from_counter(module.poset, counts)
    if route_a != route_b:
        raise RouteDisagreement(route_a, route_b)
    return route_a


def dual_block_correspondence(module: PersistenceModule, seed: int = 0) -> bool:
    """db carriers of M correspond to bb carriers of DM under coordinate reversal."""
    from .module import dualize, reindex_grid_reversed

    m, n = module.poset.grid_dims
    mine = block_decompose(module, seed)
    dual = block_decompose(reindex_grid_reversed(dualize(module)), seed)

    def reverse(c):
        return frozenset(dual.poset.index((m - 1 - i, n - 1 - j))
                         for i, j in (module.poset.labels[x] for x in c))

    db_here = Counter({reverse(c): k for c, t, k in mine.entries() if "db" in t})
    bb_there = Counter({c: k for c, t, k in dual.entries() if "bb" in t})
    bb_here = Counter({reverse(c): k for c, t, k in mine.entries() if "bb" in t})
    db_there = Counter({c: k for c, t, k in dual.entries() if "db" in t})
    return db_here == bb_there and bb_here == db_there


__all__ = [
    "Barcode", "BlockList", "barcode_chain", "check_middle_exact", "check_rectangle",
    "square_exactness", "block_decompose", "verify_triangle_blocks", "extend_zigzag",
    "zigzag_barcode", "fence_grid_ids", "lemma_short_exact_identities",
    "dual_block_correspondence", "MiddleExactReport", "CounterexampleFound", "Grid",
]
