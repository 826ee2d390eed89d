from __future__ import annotations

from collections import Counter

import numpy as np
import pytest

from pmd.decomp import decompose
from pmd.errors import (NonBlockSummand, NotAChain, NotGridLike, NotMiddleExact,
                        PathDoesNotCrossWindow)
from pmd.ingest import GeneratorSpec, random_module
from pmd.module import interval_module, make_module, restrict, zero_module
from pmd.poset import (ZigzagPath, block_carrier, chain, classify_block, grid,
                       triangle_region, zigzag_fence)
from pmd.structure import (barcode_chain, block_decompose, check_middle_exact,
                           check_rectangle, extend_zigzag, fence_grid_ids,
                           lemma_short_exact_identities, verify_triangle_blocks,
                           zigzag_barcode)

from oracles import (block_case, chain_case, fence_case, rank_invariant_barcode,
                     triangle_case, truth_counter)


def _bars(barcode):
    return {tuple(sorted(c)): k for c, k in barcode.bars}


# --- chains ----------------------------------------------------------------------

def test_barcode_chain_examples():
    c = chain(4)
    assert _bars(barcode_chain(interval_module(c, {1, 2}))) == {(1, 2): 1}
    m = make_module(chain(3), [1, 2, 1], {(0, 1): [[1], [0]], (1, 2): [[0, 1]]}, 5)
    assert _bars(barcode_chain(m)) == {(0, 1): 1, (1, 2): 1}
    z = make_module(chain(2), [1, 1], {(0, 1): [[0]]})
    assert _bars(barcode_chain(z)) == {(0,): 1, (1,): 1}
    with pytest.raises(NotAChain):
        barcode_chain(interval_module(grid(2, 2), {0}))


def test_barcode_chain_matches_rank_invariant_and_decompose():
    for seed in range(60):
        gen = chain_case(seed)
        bc = barcode_chain(gen.module)
        assert bc.counter() == rank_invariant_barcode(gen.module) == truth_counter(gen)
        assert bc.pointwise_dims() == gen.module.dims
        assert bc.counter() == Counter(decompose(gen.module, seed).supports)


# --- middle exactness -------------------------------------------------------------

def test_middle_exact_examples():
    g = grid(2, 2)
    full = check_middle_exact(interval_module(g, g.elements))
    assert full.ok and full.short_exact
    assert check_middle_exact(interval_module(g, {g.index((1, 1))})).ok
    bad = check_middle_exact(interval_module(g, {g.index((0, 1))}))
    assert not bad.ok and bad.square == ((0, 0), (0, 1), (1, 0), (1, 1))
    with pytest.raises(NotGridLike):
        check_middle_exact(interval_module(chain(2), {0}))


def test_unit_squares_imply_rectangles():
    rng = np.random.default_rng(0)
    for seed in range(30):
        m = block_case(seed).module
        rep = check_middle_exact(m)
        assert rep.ok
        rows, cols = m.poset.grid_dims
        for _ in range(20):
            i0, i1 = sorted(rng.integers(0, rows, size=2).tolist())
            j0, j1 = sorted(rng.integers(0, cols, size=2).tolist())
            mid, short = check_rectangle(m, (i0, j0), (i1, j1))
            assert mid
            if rep.short_exact:
                assert short


# --- blocks -----------------------------------------------------------------------

def test_block_decompose_examples():
    g = grid(3, 4)
    db = block_carrier(g, (0, 1), (0, 2))
    out = block_decompose(interval_module(g, db))
    assert _bars(out) == {tuple(sorted(db)): 1} and out.tags == ({"db"},)
    vb, hb = block_carrier(g, (1, 1), (0, 3)), block_carrier(g, (0, 2), (2, 3))
    gen = random_module(GeneratorSpec.of(g, [vb, hb], seed=3))
    out = block_decompose(gen.module)
    assert out.counter() == Counter({vb: 1, hb: 1})
    tags = {c: set(t) for (c, _), t in zip(out.bars, out.tags)}
    assert tags[vb] == {"vb"}
    # the hb carrier reaches the top edge across the full width, so it is also a bb
    assert tags[hb] == {"hb", "bb"}


def test_block_decompose_rejects_non_middle_exact():
    g = grid(2, 2)
    with pytest.raises(NotMiddleExact) as info:
        block_decompose(interval_module(g, {g.index((0, 1))}))
    assert info.value.square == ((0, 0), (0, 1), (1, 0), (1, 1))


def test_block_decompose_random_blocks():
    for seed in range(30):
        gen = block_case(seed)
        out = block_decompose(gen.module, seed)
        assert out.counter() == truth_counter(gen)
        assert out.pointwise_dims() == gen.module.dims
        assert all(t for t in out.tags)


def test_non_block_summand_is_reported():
    # a staircase interval on a triangle region is never a block
    t = triangle_region(3, 3, 1)
    carrier = frozenset(t.index(pt) for pt in [(0, 2), (1, 2), (1, 1), (2, 1), (2, 0)])
    m = interval_module(t, carrier)
    rep = check_middle_exact(m)
    if rep.ok:
        with pytest.raises(NonBlockSummand):
            verify_triangle_blocks(m)
    else:
        with pytest.raises(NotMiddleExact):
            verify_triangle_blocks(m)


# --- zigzags ----------------------------------------------------------------------

def test_extend_zero_module():
    path = ZigzagPath((0, 1), "RDR", ((0, 2), (0, 1)))
    e = extend_zigzag(zero_module(zigzag_fence(path)))
    assert e.is_zero() and e.poset == grid(3, 2)


def test_extend_interval_of_block():
    path = ZigzagPath((0, 2), "RDRD", ((0, 2), (0, 2)))
    fence = zigzag_fence(path)
    window = grid(3, 3)
    ids = fence_grid_ids(path, window)
    for rect in [((0, 1), (0, 2)), ((1, 2), (0, 2)), ((0, 2), (1, 2)), ((0, 1), (0, 1)), ((1, 2), (1, 2))]:
        block = block_carrier(window, *rect)
        on_fence = frozenset(k for k, g in enumerate(ids) if g in block)
        if not on_fence:
            continue
        e = extend_zigzag(interval_module(fence, on_fence))
        assert e.support == block
        assert all(d == 1 for d in (e.dims[x] for x in block))
        assert decompose(e).supports == [block]


def test_extend_one_zero_map_example():
    path = ZigzagPath((0, 1), "RD", ((0, 1), (0, 1)))
    fence = zigzag_fence(path)
    m = make_module(fence, [1, 1, 1], {(0, 1): [[1]], (2, 1): [[0]]})
    e = extend_zigzag(m)
    assert check_middle_exact(e).ok
    ids = fence_grid_ids(path, e.poset)
    back = restrict(e, ids)
    assert back.dims == m.dims
    for a, b in fence.covers:
        assert np.array_equal(back.map_between(a, b), m.maps[(a, b)])


def test_extend_requires_corner_to_corner():
    path = ZigzagPath((1, 2), "RDD", ((0, 3), (0, 2)))
    with pytest.raises(PathDoesNotCrossWindow):
        extend_zigzag(zero_module(zigzag_fence(path)))


def test_zigzag_barcode_examples():
    path = ZigzagPath((0, 2), "RDRD", ((0, 2), (0, 2)))
    fence = zigzag_fence(path)
    const = interval_module(fence, fence.elements)
    assert _bars(zigzag_barcode(const)) == {tuple(range(5)): 1}
    alt = make_module(fence, [1, 0, 1, 0, 1])
    assert _bars(zigzag_barcode(alt)) == {(0,): 1, (2,): 1, (4,): 1}


def test_zigzag_routes_and_extension_properties():
    rng = np.random.default_rng(1)
    for seed in range(40):
        gen = fence_case(seed, max_total=12)
        bc = zigzag_barcode(gen.module, seed)
        assert bc.counter() == truth_counter(gen)
        e = extend_zigzag(gen.module)
        assert check_middle_exact(e).ok
        ids = fence_grid_ids(gen.module.poset.shape.path, e.poset)
        back = restrict(e, ids)
        for a, b in gen.module.poset.covers:
            assert np.array_equal(back.map_between(a, b), gen.module.maps[(a, b)])
        rows, cols = e.poset.grid_dims
        for _ in range(10):
            i0, i1 = sorted(rng.integers(0, rows, size=2).tolist())
            j0, j1 = sorted(rng.integers(0, cols, size=2).tolist())
            assert check_rectangle(e, (i0, j0), (i1, j1))[0]


# --- triangles --------------------------------------------------------------------

def test_triangle_examples():
    t = triangle_region(4, 4, 2)
    g = grid(4, 4)
    db = frozenset(t.index(g.labels[x]) for x in block_carrier(g, (0, 2), (0, 3)) if sum(g.labels[x]) > 2)
    out = verify_triangle_blocks(interval_module(t, db))
    assert out.counter() == Counter({db: 1}) and "db" in out.tags[0]
    bad = triangle_region(3, 3, 0)
    corner = frozenset({bad.index((1, 2))})
    with pytest.raises(NotMiddleExact):
        verify_triangle_blocks(interval_module(bad, corner))
    with pytest.raises(NotGridLike):
        verify_triangle_blocks(interval_module(g, {0}))


def test_triangle_random_blocks():
    for seed in range(15):
        gen = triangle_case(seed)
        out = verify_triangle_blocks(gen.module, seed)
        assert out.counter() == truth_counter(gen)
        assert all(classify_block(c, gen.module.poset) for c, _ in out.bars)


# --- directional identities ---------------------------------------------------------

def test_short_exact_identities_on_bands():
    for seed in range(20):
        gen = block_case(seed, kinds=("vb", "hb"))
        rep = check_middle_exact(gen.module)
        assert rep.short_exact
        assert lemma_short_exact_identities(gen.module) == (True, True)


def test_identities_fail_without_short_exactness():
    g = grid(2, 2)
    m = interval_module(g, {0})
    assert not check_middle_exact(m).short_exact
    kernels_meet_zero, images_span = lemma_short_exact_identities(m)
    assert not kernels_meet_zero or not images_span
