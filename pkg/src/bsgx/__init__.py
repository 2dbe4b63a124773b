"""Exact extraction of low-doubling subsets from high-energy additive sets.

The library computes additive energy, partitions differences by popularity,
and extracts a subset whose difference set is provably small relative to
its size, with every inequality certified in exact integer and rational
arithmetic.  See the README for the pipeline and the file formats.
"""

from .additive_stats import (
    EnergyReport,
    RepTable,
    difference_set,
    energy,
    rep_table,
)
from .bsg import (
    ExtractionReport,
    Params,
    PartitionPQ,
    PWitness,
    QWitness,
    case_select,
    extract,
    extract_p,
    extract_q,
    partition_pq,
)
from .errors import AsetFormatError, InvariantViolation
from .generators import (
    GenSpec,
    SplitMix64,
    gen_ap,
    gen_axis,
    gen_ball,
    gen_random,
    sample_subset,
)
from .groups import (
    AdditiveSet,
    Element,
    GroupSpec,
    add,
    neg,
    parse_set,
    serialize_set,
    sub,
)
from .numeric_lemma import (
    PrefixSelection,
    ScaledReal,
    WeightVector,
    select_index_set,
)
from .oracle import (
    CheckRecord,
    VerificationResult,
    energy_bruteforce,
    verify_extraction,
    verify_report_dict,
    verify_st,
    verify_tv_property,
)
from .relation_lemma import (
    Relation,
    TvWitness,
    common_counts,
    extract_tv,
    neighborhoods,
)

__version__ = "0.1.0"

__all__ = [
    "AdditiveSet",
    "AsetFormatError",
    "CheckRecord",
    "Element",
    "EnergyReport",
    "ExtractionReport",
    "GenSpec",
    "GroupSpec",
    "InvariantViolation",
    "Params",
    "PartitionPQ",
    "PrefixSelection",
    "PWitness",
    "QWitness",
    "Relation",
    "RepTable",
    "ScaledReal",
    "SplitMix64",
    "TvWitness",
    "VerificationResult",
    "WeightVector",
    "add",
    "case_select",
    "common_counts",
    "difference_set",
    "energy",
    "energy_bruteforce",
    "extract",
    "extract_p",
    "extract_q",
    "extract_tv",
    "gen_ap",
    "gen_axis",
    "gen_ball",
    "gen_random",
    "neg",
    "neighborhoods",
    "parse_set",
    "partition_pq",
    "rep_table",
    "sample_subset",
    "select_index_set",
    "serialize_set",
    "sub",
    "verify_extraction",
    "verify_report_dict",
    "verify_st",
    "verify_tv_property",
]
