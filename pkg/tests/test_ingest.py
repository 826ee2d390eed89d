from __future__ import annotations

from collections import Counter
from fractions import Fraction

import numpy as np
import pytest

from pmd import linalg as la
from pmd.errors import InputError, InvalidCarrier, OverlapConditionViolated
from pmd.ingest import (GeneratorSpec, SampledFunction, interlevel_h0, random_module,
                        sublevel_h0)
from pmd.module import interval_module
from pmd.poset import chain, grid
from pmd.structure import barcode_chain, block_decompose, check_middle_exact

from oracles import band_components, inclusion_rank, random_pl


def _bars(barcode):
    return {tuple(sorted(c)): k for c, k in barcode.bars}


# --- sublevel sets ----------------------------------------------------------------

def test_sublevel_constant_function():
    m = sublevel_h0(SampledFunction.of([2, 2, 2], thresholds=[1, 2, 3]))
    assert m.dims == (0, 1, 1)
    assert _bars(barcode_chain(m)) == {(1, 2): 1}


def test_sublevel_two_minima_merge():
    m = sublevel_h0(SampledFunction.of([1, 3, 2], thresholds=[1, 2, 3]))
    assert m.dims == (1, 2, 1)
    assert _bars(barcode_chain(m)) == {(0, 1, 2): 1, (1,): 1}


def test_sublevel_rejects_bad_input():
    with pytest.raises(InputError):
        SampledFunction.of([])
    with pytest.raises(InputError):
        SampledFunction.of([1, 2], thresholds=[2, 1])
    with pytest.raises(InputError):
        sublevel_h0(SampledFunction.of([1, 2]))


def test_sublevel_matches_component_count():
    rng = np.random.default_rng(3)
    for _ in range(40):
        vals = rng.integers(-5, 6, size=int(rng.integers(1, 9))).tolist()
        th = sorted(set(rng.integers(-6, 7, size=4).tolist()))
        m = sublevel_h0(SampledFunction.of(vals, thresholds=th))
        for j, t in enumerate(th):
            # components of {f <= t}: maximal runs of samples at or below t
            runs, prev = 0, False
            for v in vals:
                now = v <= t
                runs += now and not prev
                prev = now
            assert m.dims[j] == runs


# --- interlevel sets --------------------------------------------------------------

def _interlevel_oracle_check(values, s, t):
    m = interlevel_h0(SampledFunction.of(values, s_grid=s, t_grid=t))
    s_axis = list(reversed(s))
    for x, (i, j) in enumerate(m.poset.labels):
        assert m.dims[x] == len(band_components(values, s_axis[i], t[j]))
    for a, b in m.poset.covers:
        ia, ja = m.poset.labels[a]
        ib, jb = m.poset.labels[b]
        expect = inclusion_rank(values, (s_axis[ia], t[ja]), (s_axis[ib], t[jb]))
        assert la.rank(m.maps[(a, b)], m.p) == expect
    return m


def test_interlevel_two_peaks_example():
    values = [0, 4, 0, 4, 0]
    m = _interlevel_oracle_check(values, [-1, 1], [3, 5])
    g = m.poset
    assert m.dims[g.index((1, 1))] == 1
    assert m.dims[g.index((0, 0))] == 4
    assert m.dims == (4, 2, 3, 1)


def test_interlevel_against_band_oracle():
    for seed in range(40):
        values, s, t = random_pl(seed)
        m = _interlevel_oracle_check(values, s, t)
        assert check_middle_exact(m).ok
        out = block_decompose(m, seed)
        assert out.pointwise_dims() == m.dims


def test_interlevel_overlap_condition():
    with pytest.raises(OverlapConditionViolated):
        interlevel_h0(SampledFunction.of([0, 1], s_grid=[0, 2], t_grid=[1, 3]))


def test_interlevel_single_sample():
    m = interlevel_h0(SampledFunction.of([0], s_grid=[-2, 0], t_grid=[Fraction(1, 2), 3]))
    # the point leaves the open band once s reaches its value
    s_axis = [0, -2]
    expect = [int(s < 0 < t) for s in s_axis for t in [Fraction(1, 2), 3]]
    assert list(m.dims) == expect


# --- synthetic modules ------------------------------------------------------------

def test_random_module_without_scramble_is_interval_sum():
    c = chain(4)
    gen = random_module(GeneratorSpec.of(c, [{1, 2}], scramble=False))
    assert gen.module == interval_module(c, {1, 2})


def test_random_module_is_deterministic():
    g = grid(3, 3)
    spec = GeneratorSpec.of(g, [({0, 1}, 2), {4, 5}], seed=9)
    a, b = random_module(spec), random_module(spec)
    assert a.module == b.module
    assert Counter(dict(a.truth)) == Counter({frozenset({0, 1}): 2, frozenset({4, 5}): 1})


def test_random_module_rejects_bad_carriers():
    g = grid(2, 2)
    with pytest.raises(InvalidCarrier):
        random_module(GeneratorSpec.of(g, [{0, 3}]))
    with pytest.raises(InvalidCarrier):
        random_module(GeneratorSpec.of(g, [set()]))
