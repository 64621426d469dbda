"""Budgeted human review of machine-generated sequence labels.

Rank a machine-labeled corpus by likely error, select a review budget,
apply corrections (simulated oracle or a real reviewer via the HTTP
service), and measure the label-quality gain with entity-level F1.
"""

from .corpus import (
    BioTag,
    ConfidenceRangeError,
    Corpus,
    EntitySpan,
    Example,
    LabelSource,
    MissingGoldError,
    ParseError,
    TagError,
    Token,
    decode_spans,
    encode_tags,
    parse_corpus,
    write_corpus,
)
from .evaluation import (
    CorrectionStats,
    EvalReport,
    TypeScore,
    correction_stats,
    evaluate_labels,
    gap_closure,
)
from .ranking import (
    RankedList,
    SelectionSet,
    Strategy,
    confidence_rank,
    entity_rank,
    length_rank,
    random_rank,
    rank,
    select_budget,
)
from .simulator import (
    NoiseConfig,
    SyntheticSpec,
    corrupt,
    generate_gold,
    oracle_correct,
)

__version__ = "0.1.0"
