import itertools
import math
from fractions import Fraction

import pytest
from hypothesis import assume, given, settings
import hypothesis.strategies as st

from knead.graph import perron_enclosure
from knead.hole import (
    IntervalConstraint,
    allowed_blocks,
    classify_critical,
    depth_schedule,
    dimension,
    equality_experiment,
    inner_sft,
    outer_sft,
    state_graph,
    truncation_ladder,
    witness_sft,
)
from knead.seq import Seq, left_endpoint_stability, parse_seq

from conftest import seqs

LN2 = math.log(2)
GOLD = math.log((1 + 5 ** 0.5) / 2) / LN2


def IC(c, d, m=1):
    return IntervalConstraint.parse(c, d, m)


def brute_blocks(ic, k):
    c, d = ic.c.prefix(k), ic.d.prefix(k)
    out = set()
    for w in itertools.product(range(ic.m + 1), repeat=k):
        if all(c[:k - j] <= w[j:] <= d[:k - j] for j in range(k)):
            out.add(w)
    return out


@st.composite
def constraints(draw, m=None):
    if m is None:
        m = draw(st.integers(1, 2))
    a, b = draw(seqs(m=m)), draw(seqs(m=m))
    assume(a != b)
    return IntervalConstraint(min(a, b), max(a, b), m)


def test_constraint_validation():
    with pytest.raises(ValueError):
        IC("1", "1")
    with pytest.raises(ValueError):
        IC("11", "1")
    with pytest.raises(ValueError):
        IntervalConstraint(Seq(1), Seq(2, (1,)))


class TestBlocks:
    def test_examples(self):
        gold = IC("0", "(10)")
        assert {w.symbols for w in allowed_blocks(gold, 2)} == {(0, 0), (0, 1), (1, 0)}
        assert len(allowed_blocks(gold, 3)) == 5
        assert len(allowed_blocks(IC("0", "(1)"), 3)) == 8

    @given(constraints(), st.integers(1, 7))
    def test_matches_brute_force(self, ic, k):
        assert {w.symbols for w in allowed_blocks(ic, k)} == brute_blocks(ic, k)

    def test_bad_length(self):
        with pytest.raises(ValueError):
            allowed_blocks(IC("0", "1"), 0)


class TestGraphs:
    def test_golden_outer(self):
        g = outer_sft(IC("0", "(10)"), 2)
        assert (g.n_vertices, g.n_edges) == (3, 5)
        assert math.log((1 + 5 ** 0.5) / 2) in perron_enclosure(g).value

    def test_full_shift_m2(self):
        for k in (1, 3):
            h = perron_enclosure(outer_sft(IC("0", "(2)", 2), k))
            assert float(h.value) == pytest.approx(math.log(3), abs=1e-12)

    def test_countable_case_inner_is_empty(self):
        g = inner_sft(IC("0", "1"), 4)
        assert perron_enclosure(g).value.hi == 0 if g.n_vertices else True

    def test_inner_full_interval(self):
        g = inner_sft(IC("0", "(1)"), 2)
        assert perron_enclosure(g).radius.lo >= 1

    @settings(max_examples=40)
    @given(constraints(), st.integers(1, 7), st.booleans())
    def test_automaton_matches_block_graph(self, ic, k, inner):
        blocks = inner_sft(ic, k) if inner else outer_sft(ic, k)
        hb = perron_enclosure(blocks, Fraction(1, 10 ** 9)).value
        hs = state_graph(ic, k, inner).entropy(Fraction(1, 10 ** 9)).value
        assert hb.overlaps(hs) or abs(hb.mid - hs.mid) < Fraction(1, 10 ** 8)

    @settings(max_examples=30)
    @given(constraints(), st.integers(2, 9))
    def test_sandwich(self, ic, k):
        slack = Fraction(1, 10 ** 8)
        h_in = state_graph(ic, k, True).entropy().value
        h_out = state_graph(ic, k, False).entropy().value
        h_out2 = state_graph(ic, k + 1, False).entropy().value
        assert h_in.lo <= h_out.hi + slack
        assert h_out2.lo <= h_out.hi + slack


class TestDimension:
    def test_golden(self):
        r = dimension(IC("0", "(10)"), Fraction(1, 1000))
        assert r.converged and r.value.width <= Fraction(1, 1000)
        assert Fraction(GOLD) in r.value

    def test_full(self):
        r = dimension(IC("0", "(1)"), Fraction(1, 1000))
        assert r.value.hi == 1 and r.value.lo >= 1 - Fraction(1, 1000)

    def test_countable_case(self):
        r = dimension(IC("0", "1"), Fraction(1, 100))
        assert r.converged and r.value.hi <= Fraction(1, 100)

    def test_frozen_values(self):
        # computed once and frozen; guards against silent regressions
        r = dimension(IC("0", "(110)"), Fraction(1, 1000))
        assert 0.878 < float(r.value) < 0.880
        r = dimension(IC("0", "10000001"), Fraction(1, 1000))
        assert 0.300 < float(r.value) < 0.302

    def test_schedule(self):
        assert depth_schedule(3, 6, 40) == [3, 4, 5, 6, 12, 24, 40]
        assert depth_schedule(5, 5, 5) == [5]

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            dimension(IC("0", "1"), 0)

    def test_budget_stops_early(self, monkeypatch):
        monkeypatch.setenv("KNEAD_MAX_BLOCKS", "4")
        r = dimension(IC("0", "(10)"), Fraction(1, 10 ** 6))
        assert not r.converged
        assert Fraction(GOLD) in r.value

    @settings(max_examples=15)
    @given(st.data())
    def test_monotone_in_interval(self, data):
        ic = data.draw(constraints(m=1))
        c2 = data.draw(seqs(m=1))
        assume(c2 <= ic.c)
        tol = Fraction(1, 50)
        small = dimension(ic, tol, cap=12, deep_cap=64)
        big = dimension(IntervalConstraint(c2, ic.d, 1), tol, cap=12, deep_cap=64)
        assert small.value.lo <= big.value.hi + 2 * tol

    @pytest.mark.parametrize("c,d", [("1", "(2)"), ("11", "(2)"), ("1", "(21)")])
    @pytest.mark.parametrize("tail", [((0, 0, 0), (1, 0)), ((), (2,)), ((1,), (0, 2))])
    def test_endpoint_stability(self, c, d, tail):
        ic = IC(c, d, 2)
        i0 = left_endpoint_stability(ic.c).i0
        tol = Fraction(1, 100)
        alt = IntervalConstraint(Seq(2, ic.c.prefix(i0) + tail[0], tail[1]), ic.d)
        assert alt.c.prefix(i0) == ic.c.prefix(i0)
        base, other = dimension(ic, tol), dimension(alt, tol)
        assert abs(base.value.mid - other.value.mid) <= 2 * tol


class TestLadder:
    def test_golden_ladder_closes(self):
        rows = truncation_ladder(IC("0", "(10)"), range(4, 12))
        assert all(r.lower.lo <= r.upper.hi for r in rows)
        assert rows[-1].gap < rows[0].gap


class TestCritical:
    def test_examples(self):
        assert classify_critical(IC("0", "1")).kind == "zero"
        pos = classify_critical(IC("0", "(10)"))
        assert pos.kind == "positive" and pos.n == 1 and pos.witness_certified
        assert math.log((1 + 5 ** 0.5) / 2) in pos.witness_entropy.value
        assert classify_critical(IC("1", "11", 2)).kind == "empty"

    def test_d_is_normalised(self):
        cls = classify_critical(IC("0", "(01)"))
        assert cls.d_normalized == parse_seq("1", 1) and cls.kind == "zero"

    def test_witness_shape(self):
        g = witness_sft(1, 0, 2)
        assert len(g.words()) > 0
        assert perron_enclosure(g).value.lo > 0

    def test_threshold_grid_against_dimension(self):
        # every binary word of length 5 followed by 0^inf, c = 0^inf
        tol = Fraction(1, 100)
        for w in itertools.product((0, 1), repeat=5):
            d = Seq(1, w)
            if d == Seq(1):
                continue
            ic = IntervalConstraint(Seq(1), d)
            cls = classify_critical(ic)
            if cls.kind == "zero":
                assert dimension(ic, tol).value.hi <= tol
            else:
                assert cls.witness_certified or dimension(ic, tol).value.lo > 0

    @given(constraints())
    def test_threshold_rule(self, ic):
        cls = classify_critical(ic)
        c1 = ic.c.digit(1)
        if cls.kind == "empty":
            assert cls.d_normalized.digit(1) == c1
        elif cls.kind == "zero":
            assert cls.d_normalized <= cls.threshold
        else:
            assert cls.d_normalized > cls.threshold
            assert cls.witness_entropy.value.lo > 0


class TestEquality:
    def test_full(self):
        rep = equality_experiment(IC("0", "(1)"), k_max=8)
        assert rep.family == "full" and rep.monotone
        assert rep.rows[-1].scaled.lo >= Fraction(95, 100)
        assert rep.rows[-1].gap <= Fraction(5, 100)

    def test_golden_below_dimension(self):
        rep = equality_experiment(IC("0", "(10)"), k_max=6)
        assert all(r.scaled.lo <= rep.dimension.value.hi for r in rep.rows)
        assert abs(float(rep.scale) - GOLD) < 1e-9

    def test_empty(self):
        rep = equality_experiment(IC("1", "11", 2), k_max=4)
        assert rep.family is None and all(r.scaled.hi == 0 for r in rep.rows)
        assert rep.to_json()["dimension"]["upper"] == "0"
