"""JSON Lines record formats used by the command line tools."""

from __future__ import annotations

import json
from typing import Any, Iterator, Optional, TextIO

from .annotation import AnnotatedRelation, parse_tagged
from .types import RelationHypothesis, Span, SpanProbabilityField

ARRAY_KEYS = {
    "cause_start": "p_cause_start",
    "cause_end": "p_cause_end",
    "effect_start": "p_effect_start",
    "effect_end": "p_effect_end",
    "signal_start": "p_signal_start",
    "signal_end": "p_signal_end",
}
REQUIRED_ARRAYS = ("cause_start", "cause_end", "effect_start", "effect_end")


class RecordError(ValueError):
    """A malformed input row; the message always names the record."""

    def __init__(self, record_id: Any, message: str):
        self.record_id = record_id
        super().__init__(f"record {record_id}: {message}")


def read_jsonl(stream: TextIO) -> Iterator[tuple[int, Any]]:
    """Yield (line number, decoded object) for every non-blank line.

    Lines that are not valid JSON yield a RecordError instead of an object.
    """
    for lineno, line in enumerate(stream, start=1):
        if not line.strip():
            continue
        try:
            yield lineno, json.loads(line)
        except json.JSONDecodeError as exc:
            yield lineno, RecordError(f"at line {lineno}", f"invalid JSON ({exc.msg})")


def dumps(obj: Any) -> str:
    return json.dumps(obj, ensure_ascii=False)


def record_id(obj: Any, lineno: int) -> str:
    if isinstance(obj, dict) and isinstance(obj.get("id"), (str, int)):
        return repr(str(obj["id"]))
    return f"at line {lineno}"


def field_from_record(obj: Any, lineno: int = 0) -> SpanProbabilityField:
    rid = record_id(obj, lineno)
    if not isinstance(obj, dict):
        raise RecordError(rid, "expected a JSON object")
    if "id" not in obj:
        raise RecordError(rid, "missing 'id'")
    tokens = obj.get("tokens")
    if not isinstance(tokens, list) or not all(isinstance(t, str) for t in tokens):
        raise RecordError(rid, "'tokens' must be a list of strings")
    arrays = obj.get("logits_or_probs")
    if not isinstance(arrays, dict):
        raise RecordError(rid, "'logits_or_probs' must be an object of named arrays")
    unknown = sorted(set(arrays) - set(ARRAY_KEYS))
    if unknown:
        raise RecordError(rid, f"unknown arrays {unknown}")
    kwargs: dict[str, Any] = {}
    for key, attr in ARRAY_KEYS.items():
        if key not in arrays:
            if key in REQUIRED_ARRAYS:
                raise RecordError(rid, f"missing array {key!r}")
            continue
        values = arrays[key]
        if not isinstance(values, list) or not all(
            isinstance(v, (int, float)) and not isinstance(v, bool) for v in values
        ):
            raise RecordError(rid, f"array {key!r} must contain only numbers")
        kwargs[attr] = values
    normalized = obj.get("normalized", False)
    if not isinstance(normalized, bool):
        raise RecordError(rid, "'normalized' must be a boolean")
    presence = obj.get("signal_presence")
    if presence is not None and (not isinstance(presence, (int, float)) or isinstance(presence, bool)):
        raise RecordError(rid, "'signal_presence' must be a number or null")
    return SpanProbabilityField(
        id=str(obj["id"]), tokens=tokens, signal_presence=presence, normalized=normalized, **kwargs
    )


def field_to_record(field: SpanProbabilityField) -> dict:
    arrays = {}
    for key, attr in ARRAY_KEYS.items():
        vec = getattr(field, attr)
        if vec is not None:
            arrays[key] = list(vec)
    return {
        "id": field.id,
        "tokens": list(field.tokens),
        "normalized": field.normalized,
        "signal_presence": field.signal_presence,
        "logits_or_probs": arrays,
    }


def format_score(x: float) -> float:
    # 10 significant digits
    return float(f"{x:.10g}")


def _span_json(span: Optional[Span]):
    return None if span is None else [span.start, span.end]


def hypothesis_to_json(h: RelationHypothesis) -> dict:
    return {
        "cause": _span_json(h.cause),
        "effect": _span_json(h.effect),
        "signal": _span_json(h.signal),
        "orientation": h.orientation.value,
        "score": format_score(h.score),
    }


def relations_from_record(obj: Any, lineno: int = 0) -> list[AnnotatedRelation]:
    """Parse the ``tagged`` column (string or list of strings) of a record."""
    rid = record_id(obj, lineno)
    if not isinstance(obj, dict) or "id" not in obj:
        raise RecordError(rid, "expected an object with an 'id'")
    tagged = obj.get("tagged")
    if isinstance(tagged, str):
        tagged = [tagged]
    if not isinstance(tagged, list) or not all(isinstance(t, str) for t in tagged):
        raise RecordError(rid, "'tagged' must be a string or a list of strings")
    out = []
    for pos, text in enumerate(tagged):
        try:
            out.append(parse_tagged(text))
        except ValueError as exc:
            raise RecordError(rid, f"tagged[{pos}] unparseable: {exc}") from exc
    return out
