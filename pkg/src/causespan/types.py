"""Shared domain types for cause/effect/signal span decoding.

All token indices are 0-based and inclusive. Position 0 is the first token,
so a probability vector of length ``n`` is indexed ``0 .. n-1``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Sequence

NORMALIZATION_TOLERANCE = 1e-6

VECTOR_NAMES = (
    "p_cause_start",
    "p_cause_end",
    "p_effect_start",
    "p_effect_end",
    "p_signal_start",
    "p_signal_end",
)


class InvalidFieldError(ValueError):
    """Raised when an operation is handed a field that fails validation."""

    def __init__(self, field_id: str, violations: Sequence["Violation"]):
        self.field_id = field_id
        self.violations = tuple(violations)
        detail = "; ".join(str(v) for v in self.violations)
        super().__init__(f"invalid field {field_id!r}: {detail}")


class Orientation(str, Enum):
    C_BEFORE_E = "CBeforeE"
    C_AFTER_E = "CAfterE"

    @property
    def rank(self) -> int:
        # CBeforeE sorts ahead of CAfterE on score ties
        return 0 if self is Orientation.C_BEFORE_E else 1


@dataclass(frozen=True, order=True)
class Span:
    start: int
    end: int

    def __post_init__(self):
        if not (isinstance(self.start, int) and isinstance(self.end, int)):
            raise TypeError(f"span indices must be ints, got ({self.start!r}, {self.end!r})")
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid span [{self.start}, {self.end}]")

    def __len__(self) -> int:
        return self.end - self.start + 1

    def __iter__(self):
        yield self.start
        yield self.end

    def overlaps(self, other: "Span") -> bool:
        return self.start <= other.end and other.start <= self.end

    def contains(self, index: int) -> bool:
        return self.start <= index <= self.end

    def indices(self) -> range:
        return range(self.start, self.end + 1)

    def check_bounds(self, n: int) -> None:
        if self.end >= n:
            raise IndexError(f"span [{self.start}, {self.end}] out of bounds for length {n}")


def _as_vector(values) -> tuple[float, ...]:
    return tuple(float(v) for v in values)


@dataclass(frozen=True)
class SpanProbabilityField:
    """Per-token start/end score vectors for one sentence.

    Construction does not validate; call :func:`validate_field` or let a
    decoding routine reject the field. Vectors are stored as tuples of
    Python floats so every consumer sees the same arithmetic.
    """

    id: str
    tokens: tuple[str, ...]
    p_cause_start: tuple[float, ...]
    p_cause_end: tuple[float, ...]
    p_effect_start: tuple[float, ...]
    p_effect_end: tuple[float, ...]
    p_signal_start: Optional[tuple[float, ...]] = None
    p_signal_end: Optional[tuple[float, ...]] = None
    signal_presence: Optional[float] = None
    normalized: bool = True

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "id", str(self.id))
        set_(self, "tokens", tuple(str(t) for t in self.tokens))
        for name in VECTOR_NAMES:
            values = getattr(self, name)
            if values is not None:
                set_(self, name, _as_vector(values))
        if self.signal_presence is not None:
            set_(self, "signal_presence", float(self.signal_presence))

    @property
    def n(self) -> int:
        return len(self.tokens)

    @property
    def has_signal(self) -> bool:
        return self.p_signal_start is not None and self.p_signal_end is not None

    def vectors(self) -> dict[str, tuple[float, ...]]:
        return {name: getattr(self, name) for name in VECTOR_NAMES if getattr(self, name) is not None}

    def map_vectors(self, fn, normalized: Optional[bool] = None) -> "SpanProbabilityField":
        """Return a copy with ``fn`` applied to every present vector."""
        updates = {name: fn(vec) for name, vec in self.vectors().items()}
        if normalized is not None:
            updates["normalized"] = normalized
        return replace(self, **updates)


@dataclass(frozen=True)
class Violation:
    kind: str
    vector: Optional[str] = None
    index: Optional[int] = None

    def __str__(self) -> str:
        if self.vector is None:
            return self.kind
        if self.index is None:
            return f"{self.kind}: {self.vector}"
        return f"{self.kind}: {self.vector}[{self.index}]"


@dataclass(frozen=True)
class ValidationResult:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def messages(self) -> list[str]:
        return [str(v) for v in self.violations]


def validate_field(f: SpanProbabilityField) -> ValidationResult:
    """Collect every invariant violation of ``f``; never raises."""
    out: list[Violation] = []
    n = f.n
    if n < 1:
        out.append(Violation("empty sentence"))
    if (f.p_signal_start is None) != (f.p_signal_end is None):
        missing = "p_signal_start" if f.p_signal_start is None else "p_signal_end"
        out.append(Violation("signal vectors must be paired", missing))
    if f.signal_presence is not None:
        sp = f.signal_presence
        if not math.isfinite(sp) or not 0.0 <= sp <= 1.0:
            out.append(Violation("signal_presence outside [0, 1]", "signal_presence"))

    for name, vec in f.vectors().items():
        if len(vec) != n:
            out.append(Violation("length mismatch", name))
        bad = [i for i, v in enumerate(vec) if not math.isfinite(v)]
        for i in bad:
            out.append(Violation("non-finite", name, i))
        if f.normalized and not bad and vec:
            if abs(math.fsum(vec) - 1.0) > NORMALIZATION_TOLERANCE:
                out.append(Violation("not normalized", name))
    return ValidationResult(tuple(out))


def require_valid(f: SpanProbabilityField) -> None:
    result = validate_field(f)
    if not result.ok:
        raise InvalidFieldError(f.id, result.violations)


def relation_score(f: SpanProbabilityField, cause: Span, effect: Span) -> float:
    """Additive score of a cause/effect pair.

    Terms are summed left to right in sentence order (first span start,
    first span end, second span start, second span end), so any two code
    paths scoring the same quadruple produce bit-identical floats.
    """
    if cause.end < effect.start:
        return (
            f.p_cause_start[cause.start]
            + f.p_cause_end[cause.end]
            + f.p_effect_start[effect.start]
            + f.p_effect_end[effect.end]
        )
    return (
        f.p_effect_start[effect.start]
        + f.p_effect_end[effect.end]
        + f.p_cause_start[cause.start]
        + f.p_cause_end[cause.end]
    )


@dataclass(frozen=True)
class RelationHypothesis:
    cause: Span
    effect: Span
    orientation: Orientation
    score: float
    signal: Optional[Span] = None
    signal_score: Optional[float] = None

    def __post_init__(self):
        if self.cause.overlaps(self.effect):
            raise ValueError(f"cause {tuple(self.cause)} overlaps effect {tuple(self.effect)}")
        orientation = Orientation(self.orientation)
        object.__setattr__(self, "orientation", orientation)
        if orientation is Orientation.C_BEFORE_E and not self.cause.end < self.effect.start:
            raise ValueError("CBeforeE requires the cause to precede the effect")
        if orientation is Orientation.C_AFTER_E and not self.effect.end < self.cause.start:
            raise ValueError("CAfterE requires the effect to precede the cause")
        if (self.signal is None) != (self.signal_score is None):
            raise ValueError("signal and signal_score must be given together")

    def sort_key(self) -> tuple:
        return hypothesis_sort_key(self)

    def with_signal(self, signal: Optional[Span], signal_score: Optional[float]) -> "RelationHypothesis":
        return replace(self, signal=signal, signal_score=signal_score)


def hypothesis_sort_key(h: RelationHypothesis) -> tuple:
    """Total best-first order shared by the decoder and the oracle.

    Higher score first, then CBeforeE before CAfterE, then smaller
    cause.start, effect.start, cause.end, effect.end.
    """
    return (-h.score, h.orientation.rank, h.cause.start, h.effect.start, h.cause.end, h.effect.end)


def orientation_of(cause: Span, effect: Span) -> Orientation:
    return Orientation.C_BEFORE_E if cause.end < effect.start else Orientation.C_AFTER_E


FORBID_OVERLAP = "forbid_overlap"
ALLOW_OVERLAP = "allow_overlap"

# inner search: exact top-m quadruples per outer pair, or one best inner pair
INNER_TOP_M = "top_m"
INNER_SINGLE = "single"


@dataclass(frozen=True)
class DecodeConfig:
    beam_k: int = 8
    num_answers_m: int = 1
    signal_threshold: float = 0.5
    signal_overlap_policy: str = FORBID_OVERLAP
    max_signal_length: Optional[int] = None
    inner_search: str = INNER_TOP_M

    def __post_init__(self):
        if int(self.beam_k) != self.beam_k or self.beam_k < 1:
            raise ValueError(f"beam_k must be a positive integer, got {self.beam_k!r}")
        if int(self.num_answers_m) != self.num_answers_m or self.num_answers_m < 1:
            raise ValueError(f"num_answers_m must be a positive integer, got {self.num_answers_m!r}")
        if not 0.0 <= self.signal_threshold <= 1.0:
            raise ValueError(f"signal_threshold must lie in [0, 1], got {self.signal_threshold!r}")
        if self.signal_overlap_policy not in (FORBID_OVERLAP, ALLOW_OVERLAP):
            raise ValueError(f"unknown signal_overlap_policy {self.signal_overlap_policy!r}")
        if self.max_signal_length is not None and self.max_signal_length < 1:
            raise ValueError("max_signal_length must be positive when set")
        if self.inner_search not in (INNER_TOP_M, INNER_SINGLE):
            raise ValueError(f"unknown inner_search {self.inner_search!r}")


@dataclass(frozen=True)
class BaselineDecodeResult:
    raw_cause_start: int
    raw_cause_end: int
    raw_effect_start: int
    raw_effect_end: int
    raw_signal_start: Optional[int] = None
    raw_signal_end: Optional[int] = None
    cause_valid: bool = field(init=False)
    effect_valid: bool = field(init=False)
    signal_valid: Optional[bool] = field(init=False)
    pair_disjoint: bool = field(init=False)

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "cause_valid", self.raw_cause_start <= self.raw_cause_end)
        set_(self, "effect_valid", self.raw_effect_start <= self.raw_effect_end)
        if self.raw_signal_start is None or self.raw_signal_end is None:
            set_(self, "signal_valid", None)
        else:
            set_(self, "signal_valid", self.raw_signal_start <= self.raw_signal_end)
        # an inverted raw range is taken to cover min..max
        c_lo, c_hi = sorted((self.raw_cause_start, self.raw_cause_end))
        e_lo, e_hi = sorted((self.raw_effect_start, self.raw_effect_end))
        set_(self, "pair_disjoint", c_hi < e_lo or e_hi < c_lo)
