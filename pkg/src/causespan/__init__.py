"""Constrained decoding of cause, effect and signal spans from start/end probability fields."""

__version__ = "0.1.0"

from .annotation import (
    AnnotatedRelation,
    AnnotationError,
    hypothesis_to_relation,
    normalize_tagged,
    parse_tagged,
    serialize_tagged,
    tokenize,
)
from .augmentation import (
    HttpParaphraseProvider,
    IdentityProvider,
    ParaphraseProvider,
    ParaphraseRequest,
    ProviderError,
    StaticProvider,
    augment,
    augment_many,
    splice_span,
)
from .decoder import (
    OuterPair,
    apply_softmax,
    baseline_decode,
    best_inner_pair,
    bss_decode,
    decode,
    decode_signal,
    softmax,
    top_k_outer_pairs,
)
from .evaluation import EvalReport, match_relations, score_corpus, token_f1
from .oracle import oracle_decode, oracle_signal
from .types import (
    BaselineDecodeResult,
    DecodeConfig,
    InvalidFieldError,
    Orientation,
    RelationHypothesis,
    Span,
    SpanProbabilityField,
    ValidationResult,
    validate_field,
)

__all__ = [
    "__version__",
    "AnnotatedRelation",
    "AnnotationError",
    "apply_softmax",
    "augment",
    "augment_many",
    "baseline_decode",
    "BaselineDecodeResult",
    "best_inner_pair",
    "bss_decode",
    "decode",
    "decode_signal",
    "DecodeConfig",
    "EvalReport",
    "HttpParaphraseProvider",
    "hypothesis_to_relation",
    "IdentityProvider",
    "InvalidFieldError",
    "match_relations",
    "normalize_tagged",
    "oracle_decode",
    "oracle_signal",
    "Orientation",
    "OuterPair",
    "ParaphraseProvider",
    "ParaphraseRequest",
    "parse_tagged",
    "ProviderError",
    "RelationHypothesis",
    "score_corpus",
    "serialize_tagged",
    "softmax",
    "Span",
    "SpanProbabilityField",
    "splice_span",
    "StaticProvider",
    "token_f1",
    "tokenize",
    "top_k_outer_pairs",
    "validate_field",
    "ValidationResult",
]
