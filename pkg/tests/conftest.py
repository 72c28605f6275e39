import itertools

import hypothesis.strategies as st
from hypothesis import settings

from knead.seq import Seq

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


@st.composite
def seqs(draw, m=None, max_pre=5, max_per=4):
    if m is None:
        m = draw(st.integers(1, 2))
    sym = st.integers(0, m)
    pre = draw(st.lists(sym, max_size=max_pre))
    per = draw(st.lists(sym, max_size=max_per))
    return Seq(m, tuple(pre), tuple(per))


def all_words(m, n):
    return itertools.product(range(m + 1), repeat=n)


def word_family(m, max_len):
    """w0^inf and (w)^inf for every nonempty word w with |w| <= max_len."""
    out = set()
    for n in range(1, max_len + 1):
        for w in all_words(m, n):
            out.add(Seq(m, w))
            out.add(Seq(m, (), w))
    return out


def long_prefix(x, n=120):
    return x.prefix(n)
