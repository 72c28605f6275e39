"""Scan eps = p/q for a certified gap between (f + eps)(K) and K.

The golden-mean target never separates (every eps has an exact periodic
witness); thinner targets such as "11,101" do.
"""
import argparse
from collections import Counter
from dataclasses import dataclass

from knead.circle import PiecewiseLinearMarkovMap, search_disjoint_eps
from knead.graph import sft_from_forbidden
from knead.seq import _split


@dataclass
class SearchConfig:
    forbid: str = "11"
    denominator: int = 64
    depth: int = 8
    m: int = 1


def run(cfg: SearchConfig):
    f = PiecewiseLinearMarkovMap.linear(cfg.m)
    target = sft_from_forbidden(cfg.m, [_split(w, cfg.m) for w in cfg.forbid.split(",")])
    verdicts = search_disjoint_eps(f, target, cfg.denominator, cfg.depth)
    for v in verdicts:
        extra = f"gap {v.gap}" if v.gap is not None else (f"witness {v.witness} <- {v.source}" if v.witness is not None else "")
        print(f"{str(v.eps):>8}  {v.verdict:<18} {extra}")
    print(dict(Counter(v.verdict for v in verdicts)))
    return verdicts


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--forbid", default="11")
    ap.add_argument("--denominator", type=int, default=64)
    ap.add_argument("--depth", type=int, default=8)
    ns = ap.parse_args()
    run(SearchConfig(ns.forbid, ns.denominator, ns.depth))
