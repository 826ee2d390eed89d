from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pmd import linalg as la
from pmd.errors import NotAGrid, NotAnInterval, PosetMismatch, ShapeMismatch, ValidationError
from pmd.module import (direct_sum, directional_submodules, dualize, identity_morphism,
                        interval_module, make_module, restrict, validate, zero_module)
from pmd.poset import block_carrier, chain, grid, opposite

from oracles import all_paths_commute, block_case, chain_case, fence_case, grid_case


def test_chain_modules_always_valid():
    rng = np.random.default_rng(0)
    for n in range(1, 6):
        dims = rng.integers(0, 3, size=n).tolist()
        maps = {(i, i + 1): la.random_matrix(rng, dims[i + 1], dims[i], 7) for i in range(n - 1)}
        assert validate(make_module(chain(n), dims, maps, 7, check=False)).ok


def test_grid_identity_maps_valid():
    g = grid(2, 2)
    assert validate(make_module(g, [1] * 4, {c: [[1]] for c in g.covers}, 5)).ok


def test_noncommuting_diamond_reported():
    g = grid(2, 2)
    maps = {c: [[1]] for c in g.covers}
    maps[(2, 3)] = [[2]]
    module = make_module(g, [1] * 4, maps, 5, check=False)
    report = validate(module)
    assert not report.ok
    assert set(report.square) == {0, 1, 2, 3} and report.square[0] == 0 and report.square[3] == 3
    with pytest.raises(ValidationError) as info:
        make_module(g, [1] * 4, maps, 5)
    assert info.value.square == report.square


def test_validate_matches_all_path_pairs():
    """The diamond check agrees with comparing every pair of cover paths."""
    rng = np.random.default_rng(1)
    shapes = [grid(2, 2), grid(2, 3), grid(3, 3)]
    for k in range(150):
        g = shapes[k % 3]
        dims = rng.integers(0, 3, size=g.size).tolist()
        p = 3
        maps = {(a, b): la.random_matrix(rng, dims[b], dims[a], p) for a, b in g.covers}
        m = make_module(g, dims, maps, p, check=False)
        assert validate(m).ok == all_paths_commute(m)
    for seed in range(20):
        m = grid_case(seed, max_side=4).module
        assert validate(m).ok and all_paths_commute(m)


def test_shape_mismatch():
    with pytest.raises(ShapeMismatch):
        make_module(chain(2), [1, 2], {(0, 1): [[1]]})
    with pytest.raises(ShapeMismatch):
        make_module(chain(2), [1])


def test_interval_module_examples():
    c = chain(4)
    k = interval_module(c, range(4), 7)
    assert k.dims == (1, 1, 1, 1) and all(m.tolist() == [[1]] for m in k.maps.values())
    s = interval_module(c, {2}, 7)
    assert s.dims == (0, 0, 1, 0)
    g = grid(2, 2)
    with pytest.raises(NotAnInterval):
        interval_module(g, {g.index((0, 0)), g.index((1, 1))})


def test_direct_sum_examples():
    c = chain(3)
    a, b = interval_module(c, {0, 1}), interval_module(c, {1, 2})
    ds = direct_sum(a, b)
    assert ds.module.dims == (1, 2, 1)
    pa, pb = ds.projections
    ea, eb = ds.embeddings
    assert pa.compose(ea).equals(identity_morphism(a))
    assert pa.compose(eb).is_zero() and pb.compose(ea).is_zero()
    assert all(e.is_valid() and q.is_valid() for e, q in zip(ds.embeddings, ds.projections))
    assert direct_sum(a, zero_module(c)).module == a
    with pytest.raises(PosetMismatch):
        direct_sum(a, interval_module(chain(2), {0}))


def test_restrict_examples():
    m = grid_case(3, max_side=3).module
    assert restrict(m, list(m.poset.elements)) == m
    g = grid(2, 3)
    row = [g.index((1, j)) for j in range(3)]
    full = make_module(g, [1] * 6, {c: [[1]] for c in g.covers})
    r = restrict(full, row)
    assert r.poset.shape.__class__.__name__ == "Chain"
    assert r.dims == (1, 1, 1) and r.maps[(0, 1)].tolist() == [[1]]
    carrier = block_carrier(g, (0, 1), (0, 1))
    k = interval_module(g, carrier)
    q = [g.index((0, 1)), g.index((0, 2)), g.index((1, 2))]
    assert restrict(k, q) == interval_module(restrict(k, q).poset, {0})


def test_restrict_commutes_with_direct_sum():
    for seed in range(10):
        a = grid_case(seed, max_side=3).module
        b = grid_case(seed, max_side=3).unscrambled
        q = sorted(np.random.default_rng(seed).choice(a.poset.size, size=max(1, a.poset.size // 2), replace=False).tolist())
        lhs = restrict(direct_sum(a, b).module, q)
        rhs = direct_sum(restrict(a, q), restrict(b, q)).module
        assert lhs == rhs


def test_dualize_examples():
    c = chain(4)
    k = interval_module(c, {1, 2})
    d = dualize(k)
    assert d.poset == opposite(c)
    assert d == interval_module(opposite(c), {1, 2})
    for seed in range(20):
        m = fence_case(seed).module
        assert dualize(dualize(m)) == m
        assert dualize(m).dims == m.dims


def test_directional_examples():
    g = grid(3, 2)
    full = interval_module(g, g.elements)
    fam = directional_submodules(full)
    assert fam["im_left"].is_everything() and fam["ker_right"].is_zero()
    g2 = grid(2, 2)
    simple = interval_module(g2, {0})
    fam = directional_submodules(simple)
    assert fam["ker_right"].spaces[0].dim == 1
    with pytest.raises(NotAGrid):
        directional_submodules(interval_module(chain(2), {0}))


def test_directional_extreme_arrow_equals_exhaustive():
    for seed in range(40):
        m = grid_case(seed, max_side=4).module
        fast, slow = directional_submodules(m), directional_submodules(m, exhaustive=True)
        for key in fast:
            assert fast[key] == slow[key]
            assert fast[key].is_submodule()


def test_dual_swaps_kernel_and_image_dimensions():
    """dim Ker^→(M)_x + dim Im^←(DM reindexed)_x' = dim M_x at the mirrored point."""
    from pmd.module import reindex_grid_reversed
    for seed in range(15):
        m = block_case(seed, max_side=4).module
        rows, cols = m.poset.grid_dims
        dm = reindex_grid_reversed(dualize(m))
        fm, fd = directional_submodules(m), directional_submodules(dm)
        for x, (i, j) in enumerate(m.poset.labels):
            y = dm.poset.index((rows - 1 - i, cols - 1 - j))
            assert fm["ker_right"].spaces[x].dim + fd["im_left"].spaces[y].dim == m.dims[x]
            assert fm["ker_up"].spaces[x].dim + fd["im_down"].spaces[y].dim == m.dims[x]


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_dualize_involution_property(seed):
    m = chain_case(seed).module
    assert dualize(dualize(m)) == m
