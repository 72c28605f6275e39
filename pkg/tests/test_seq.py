from fractions import Fraction

import pytest
from hypothesis import given
import hypothesis.strategies as st

from knead.seq import (
    Seq,
    format_seq,
    is_kneading,
    left_endpoint_stability,
    lex_compare,
    minimal_kneading_above,
    parse_seq,
    shift,
    tilde_invert,
)

from conftest import all_words, long_prefix, seqs, word_family


def S(text, m=1):
    return parse_seq(text, m)


class TestParse:
    def test_literal_shapes(self):
        assert S("11(0)") == Seq(1, (1, 1))
        assert S("(10)") == Seq(1, (), (1, 0))
        assert S("1(1)") == Seq(1, (), (1,))
        assert S("1(1)").pre == ()

    def test_canonical_rotation(self):
        assert S("1(01)") == S("(10)")
        assert S("110") == S("11")
        assert S("(1010)") == S("(10)")

    def test_wide_alphabet(self):
        x = parse_seq("10,3(11)", 12)
        assert x.pre == (10, 3) and x.per == (11,)
        assert format_seq(x) == "10,3(11)"

    @pytest.mark.parametrize("bad", ["", "()", "1(", "(1", "12x", "1,1"])
    def test_syntax_errors(self, bad):
        with pytest.raises(ValueError):
            parse_seq(bad, 1)

    def test_symbol_range(self):
        with pytest.raises(ValueError):
            parse_seq("12", 1)

    def test_zero_prints_as_zero(self):
        assert format_seq(Seq(1)) == "0"

    @given(seqs())
    def test_format_roundtrip(self, x):
        assert parse_seq(format_seq(x), x.m) == x

    @given(seqs())
    def test_canonical_is_idempotent(self, x):
        assert Seq(x.m, x.pre, x.per) == x
        assert Seq(x.m, x.pre, x.per).pre == x.pre


class TestOrder:
    def test_examples(self):
        assert lex_compare(S("(10)"), S("100")) == 1
        assert lex_compare(S("(1)"), S("1(1)")) == 0
        assert lex_compare(S("110"), S("(10)")) == 1

    def test_mixed_alphabets_rejected(self):
        with pytest.raises(ValueError):
            lex_compare(Seq(1, (1,)), Seq(2, (1,)))

    @given(st.data())
    def test_matches_long_prefix(self, data):
        m = data.draw(st.integers(1, 2))
        a, b = data.draw(seqs(m=m)), data.draw(seqs(m=m))
        pa, pb = long_prefix(a), long_prefix(b)
        assert lex_compare(a, b) == (pa > pb) - (pa < pb)

    @given(st.data())
    def test_trichotomy_and_transitivity(self, data):
        m = data.draw(st.integers(1, 2))
        a, b, c = (data.draw(seqs(m=m)) for _ in range(3))
        assert lex_compare(a, b) == -lex_compare(b, a)
        assert (lex_compare(a, b) == 0) == (a == b)
        if a <= b and b <= c:
            assert a <= c

    @given(st.data())
    def test_tilde_reverses_order(self, data):
        m = data.draw(st.integers(1, 2))
        a, b = data.draw(seqs(m=m)), data.draw(seqs(m=m))
        assert lex_compare(tilde_invert(a), tilde_invert(b)) == -lex_compare(a, b)


class TestShiftAndTilde:
    def test_examples(self):
        assert shift(S("(10)")) == S("(01)")
        assert shift(S("110"), 2) == Seq(1)
        assert tilde_invert(S("(10)")) == S("(01)")
        assert tilde_invert(parse_seq("12", 2)) == parse_seq("10(2)", 2)

    def test_negative_shift(self):
        with pytest.raises(ValueError):
            shift(S("1"), -1)

    @given(seqs(), st.integers(0, 15))
    def test_shift_drops_digits(self, x, n):
        assert long_prefix(shift(x, n), 60) == long_prefix(x, 60 + n)[n:]

    @given(seqs())
    def test_shift_zero_and_involution(self, x):
        assert shift(x, 0) == x
        assert tilde_invert(tilde_invert(x)) == x


def brute_kneading(x):
    n = len(x.pre) + len(x.cycle)
    p = long_prefix(x, 200)
    full = x.prefix(200 + n)
    return all(full[k:k + 200] < p for k in range(1, n + 1))


class TestKneading:
    def test_examples(self):
        assert is_kneading(S("110"))
        assert not is_kneading(S("(10)"))
        assert not is_kneading(Seq(1))
        assert is_kneading(S("(110)", 1)) is False
        assert is_kneading(S("1110"))

    @given(seqs())
    def test_matches_brute_force(self, x):
        assert is_kneading(x) == brute_kneading(x)

    @pytest.mark.parametrize("m,n", [(1, 10), (2, 6)])
    def test_all_short_words(self, m, n):
        for length in range(1, n + 1):
            for w in all_words(m, length):
                for x in (Seq(m, w), Seq(m, (), w)):
                    assert is_kneading(x) == brute_kneading(x), x


class TestMinimalAbove:
    def test_examples(self):
        assert minimal_kneading_above(S("(01)")) == S("1")
        assert minimal_kneading_above(S("(110)")) == S("111")
        assert minimal_kneading_above(S("110")) == S("110")

    def test_top_rejected(self):
        with pytest.raises(ValueError):
            minimal_kneading_above(S("(1)"))
        with pytest.raises(ValueError):
            minimal_kneading_above(parse_seq("(2)", 2))

    @pytest.mark.parametrize("m,n_in,n_fam", [(1, 8, 12), (2, 4, 6)])
    def test_gap_property(self, m, n_in, n_fam):
        family = sorted(x for x in word_family(m, n_fam) if is_kneading(x))
        top = Seq(m, (), (m,))
        for c in word_family(m, n_in):
            if c == top or is_kneading(c):
                continue
            d = minimal_kneading_above(c)
            assert is_kneading(d) and c < d
            assert not any(c < x < d for x in family), (c, d)

    @given(seqs())
    def test_result_is_kneading_and_above(self, c):
        if c == Seq(c.m, (), (c.m,)):
            return
        d = minimal_kneading_above(c)
        assert is_kneading(d) and c <= d


class TestStability:
    def test_examples(self):
        assert left_endpoint_stability(S("110")).i0 == 3
        assert left_endpoint_stability(S("110")).radius == Fraction(1, 8)
        assert left_endpoint_stability(parse_seq("201", 2)).i0 == 2
        assert left_endpoint_stability(S("1")).i0 == 2

    def test_needs_kneading(self):
        with pytest.raises(ValueError):
            left_endpoint_stability(S("(10)"))

    @given(seqs())
    def test_i0_points_at_minimum(self, c):
        if not is_kneading(c):
            return
        st_ = left_endpoint_stability(c)
        low = min(long_prefix(c, 60))
        assert c.digit(st_.i0) == low
        assert all(c.digit(i) > low for i in range(1, st_.i0))
