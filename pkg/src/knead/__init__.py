"""Certified dimension of survivor sets of expanding circle maps.

The package is organised by layer:

* :mod:`knead.seq` - eventually periodic sequences, kneading sequences;
* :mod:`knead.enclosure` - rational intervals and certified logarithms;
* :mod:`knead.beta` - greedy beta-expansions and the Parry correspondence;
* :mod:`knead.graph` - transfer graphs and certified Perron roots;
* :mod:`knead.hole` - survivor sets M'_{c,d} and their dimension;
* :mod:`knead.circle` - piecewise-linear Markov maps and invariant sets;
* :mod:`knead.cli` - the ``knead`` command.
"""
from .beta import (
    BetaShiftSpec,
    beta_expand_one,
    beta_from_kneading,
    dimension_lower_bound_ratio,
    holder_exponent,
    lower_bound_family,
    parry_membership,
)
from .circle import (
    IntervalCover,
    PiecewiseLinearMarkovMap,
    conjugacy_eval,
    decode,
    hausdorff_distance,
    itinerary,
    joint_check,
    map_image_cover,
    maximality_epsilon,
    sft_cover,
)
from .enclosure import Enclosure
from .graph import EntropyEnclosure, TransferGraph, perron_enclosure, sft_contains, sft_from_forbidden
from .hole import (
    DimensionEnclosure,
    IntervalConstraint,
    allowed_blocks,
    classify_critical,
    dimension,
    equality_experiment,
    inner_sft,
    outer_sft,
)
from .seq import (
    Seq,
    Word,
    format_seq,
    is_kneading,
    left_endpoint_stability,
    lex_compare,
    minimal_kneading_above,
    parse_seq,
    shift,
    tilde_invert,
)

__version__ = "0.1.0"
