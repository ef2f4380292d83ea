"""Inline ``<ARG0>/<ARG1>/<SIG>`` annotation format.

ARG0 marks the cause, ARG1 the effect and SIG the causal signal. Tags are
token separators: ``met</ARG0>.`` yields the tokens ``met`` and ``.``. A tag
may not split a word, so ``foo<ARG0>bar`` is rejected. Serialization joins
tokens with single spaces, attaching opening tags to the first token of a
span and closing tags to its last.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional

from .types import RelationHypothesis, Span, SpanProbabilityField

TAGS = {"ARG0": "cause", "ARG1": "effect", "SIG": "signal"}
_TAG_RE = re.compile(r"(</?(?:ARG0|ARG1|SIG)>)")
TAG_LITERALS = tuple(f"<{t}>" for t in TAGS) + tuple(f"</{t}>" for t in TAGS)


class AnnotationError(ValueError):
    """Malformed tagged string or relation; ``kind`` names the defect."""

    def __init__(self, kind: str, message: str):
        self.kind = kind
        super().__init__(f"{kind}: {message}")


def tokenize(text: str) -> list[str]:
    return text.split()


def contains_tag_literal(text: str) -> bool:
    return any(t in text for t in TAG_LITERALS)


@dataclass(frozen=True)
class AnnotatedRelation:
    tokens: tuple[str, ...]
    cause: Span
    effect: Span
    signal: Optional[Span] = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        n = len(self.tokens)
        for tok in self.tokens:
            if not tok or tok != tok.strip() or len(tok.split()) != 1:
                raise AnnotationError("bad_token", f"token {tok!r} is empty or contains whitespace")
            if contains_tag_literal(tok):
                raise AnnotationError("bad_token", f"token {tok!r} contains a tag literal")
        for name in ("cause", "effect", "signal"):
            span = getattr(self, name)
            if span is not None and span.end >= n:
                raise AnnotationError(
                    "out_of_bounds", f"{name} span [{span.start}, {span.end}] exceeds {n} tokens"
                )
        if self.cause.overlaps(self.effect):
            raise AnnotationError("overlapping_spans", "cause and effect overlap")
        if self.signal is not None and (
            self.signal.overlaps(self.cause) or self.signal.overlaps(self.effect)
        ):
            raise AnnotationError("overlapping_spans", "signal overlaps cause or effect")

    @property
    def plain_text(self) -> str:
        return " ".join(self.tokens)

    def span_text(self, which: str) -> str:
        span = getattr(self, which)
        if span is None:
            return ""
        return " ".join(self.tokens[span.start : span.end + 1])


def _check_tag_runs(pieces: list[str]) -> None:
    # pieces alternate text/tag; a run is a maximal sequence of adjacent tags
    i = 1
    while i < len(pieces):
        j = i
        while j + 2 < len(pieces) and pieces[j + 1] == "":
            j += 2
        before, after = pieces[i - 1][-1:], pieces[j + 1][:1]
        if before.isalnum() and after.isalnum():
            word = pieces[i - 1].split()[-1] + pieces[j + 1].split()[0]
            raise AnnotationError("tag_inside_token", f"{pieces[i]} splits the word {word!r}")
        i = j + 2


def parse_tagged(tagged: str) -> AnnotatedRelation:
    """Parse one tagged relation into token-indexed spans."""
    pieces = _TAG_RE.split(tagged)
    _check_tag_runs(pieces)
    tokens: list[str] = []
    spans: dict[str, Span] = {}
    stack: list[tuple[str, int]] = []

    for idx, piece in enumerate(pieces):
        if idx % 2 == 0:
            tokens.extend(tokenize(piece))
            continue
        name = piece.strip("</>")
        if not piece.startswith("</"):
            if name in spans or any(n == name for n, _ in stack):
                raise AnnotationError("duplicate_tag", f"<{name}> appears more than once")
            stack.append((name, len(tokens)))
            continue
        if not stack or all(n != name for n, _ in stack):
            raise AnnotationError("unmatched_close", f"</{name}> without an opening tag")
        top, start = stack[-1]
        if top != name:
            raise AnnotationError("interleaved_tags", f"</{name}> closes across <{top}>")
        if len(stack) > 1:
            raise AnnotationError("nested_tags", f"<{name}> is nested inside <{stack[-2][0]}>")
        stack.pop()
        if len(tokens) == start:
            raise AnnotationError("empty_span", f"<{name}> encloses no tokens")
        spans[name] = Span(start, len(tokens) - 1)

    if stack:
        raise AnnotationError("unclosed_tag", f"<{stack[-1][0]}> is never closed")
    for name in ("ARG0", "ARG1"):
        if name not in spans:
            raise AnnotationError("missing_tag", f"<{name}> is required")
    return AnnotatedRelation(
        tokens=tuple(tokens), cause=spans["ARG0"], effect=spans["ARG1"], signal=spans.get("SIG")
    )


def serialize_tagged(relation: AnnotatedRelation) -> str:
    opens: dict[int, str] = {}
    closes: dict[int, str] = {}
    for tag, attr in TAGS.items():
        span = getattr(relation, attr)
        if span is not None:
            opens[span.start] = f"<{tag}>"
            closes[span.end] = f"</{tag}>"
    return " ".join(
        opens.get(i, "") + tok + closes.get(i, "") for i, tok in enumerate(relation.tokens)
    )


def normalize_tagged(tagged: str) -> str:
    """Canonical spacing of a well-formed tagged string.

    Equal to ``serialize_tagged(parse_tagged(tagged))``; for inputs whose
    tags already sit against token edges this is plain whitespace
    collapsing.
    """
    return serialize_tagged(parse_tagged(tagged))


def hypothesis_to_relation(field: SpanProbabilityField, hyp: RelationHypothesis) -> AnnotatedRelation:
    n = field.n
    for name in ("cause", "effect", "signal"):
        span = getattr(hyp, name)
        if span is not None and span.end >= n:
            raise AnnotationError(
                "out_of_bounds", f"{name} span [{span.start}, {span.end}] exceeds {n} tokens of {field.id!r}"
            )
    return AnnotatedRelation(tokens=field.tokens, cause=hyp.cause, effect=hyp.effect, signal=hyp.signal)
