"""Tests for the closed-form baselines and the 2x2 scheme search."""
from __future__ import annotations

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from linrelay.baselines import (
    block_markov_bound,
    bounds_record,
    cutset_bound,
    two_by_two_bound,
)
from linrelay.bound import ChannelParams


class TestClosedForms:
    def test_block_markov_reference_point(self):
        # (a^2 + b^2)/(a^2 (1 + b^2)) at (1.1, 1) is 2.21/2.42.
        value = block_markov_bound(ChannelParams(a=1.1, b=1.0))
        assert value == pytest.approx(2.21 / 2.42, abs=1e-15)

    def test_cutset_reference_point(self):
        # (1 + 1 + 1)/(2 * 2) at (1, 1).
        value = cutset_bound(ChannelParams(a=1.0, b=1.0))
        assert value == pytest.approx(0.75, abs=1e-15)

    def test_block_markov_clamps_at_direct(self):
        # A vanishing relay link leaves only the direct path.
        value = block_markov_bound(ChannelParams(a=1.1, b=1e-12))
        assert value == 1.0

    def test_block_markov_large_b_limit(self):
        # As b grows the expression approaches 1/a^2.
        value = block_markov_bound(ChannelParams(a=1.1, b=1e6))
        assert value == pytest.approx(1.0 / 1.21, rel=1e-9)

    @given(a=st.floats(0.1, 5.0), b=st.floats(0.01, 100.0))
    @settings(max_examples=100, deadline=None)
    def test_cutset_below_block_markov(self, a, b):
        ch = ChannelParams(a=a, b=b)
        assert cutset_bound(ch) <= block_markov_bound(ch) + 1e-12

    @given(a=st.floats(0.1, 5.0), b=st.floats(0.01, 100.0))
    @settings(max_examples=100, deadline=None)
    def test_both_in_unit_interval(self, a, b):
        ch = ChannelParams(a=a, b=b)
        assert 0.0 < cutset_bound(ch) <= 1.0
        assert 0.0 < block_markov_bound(ch) <= 1.0


class TestTwoByTwo:
    def test_reference_value(self, two_by_two_cache):
        # Frozen output of the grid + refinement at (1.1, 2).
        res = two_by_two_cache(1.1, 2.0)
        assert res.value == pytest.approx(0.9568873603879826, abs=1e-6)

    def test_argmin_inside_box(self, two_by_two_cache):
        res = two_by_two_cache(1.1, 2.0)
        assert 0.0 <= res.beta <= 1.0
        assert 1e-6 <= res.P1 <= 10.0
        assert 1e-6 <= res.P2 <= 10.0

    def test_beats_direct_when_relay_strong(self, two_by_two_cache):
        assert two_by_two_cache(1.1, 5.0).value < 1.0

    def test_power_floor_not_binding_when_relay_strong(self, two_by_two_cache):
        # Halving the smallest allowed power must not move the optimum when
        # the argmin is interior; this validates the floor choice.
        res = two_by_two_cache(1.1, 5.0)
        halved = two_by_two_bound(ChannelParams(a=1.1, b=5.0), power_lo=5e-7)
        assert halved.value == pytest.approx(res.value, abs=1e-7)


class TestBoundsRecord:
    def test_fields_are_consistent(self, optimized_cache, two_by_two_cache):
        record = bounds_record(ChannelParams(a=1.1, b=2.0))
        assert record.a == 1.1
        assert record.b == 2.0
        assert record.block_markov == block_markov_bound(ChannelParams(a=1.1, b=2.0))
        assert record.cutset == cutset_bound(ChannelParams(a=1.1, b=2.0))
        assert record.rank1 == record.rank1_eval.normalized
        assert record.two_by_two == record.two_by_two_argmin.value
        # Same channel, same deterministic searches as the cached fixtures.
        pair, ev = optimized_cache(1.1, 2.0)
        assert record.rank1 == ev.normalized
        assert record.two_by_two == two_by_two_cache(1.1, 2.0).value
