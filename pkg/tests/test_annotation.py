import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causespan import (
    AnnotatedRelation,
    AnnotationError,
    Orientation,
    RelationHypothesis,
    Span,
    hypothesis_to_relation,
    normalize_tagged,
    parse_tagged,
    serialize_tagged,
    tokenize,
)

from helpers import make_field

FARMWORKERS = (
    "<ARG1>The farmworkers ' strike resumed on Tuesday</ARG1> when "
    "<ARG0>their demands were not met</ARG0>."
)


def test_tokenize():
    assert len(tokenize("their demands were not met")) == 5
    assert tokenize("") == []
    toks = tokenize("The farmworkers ' strike resumed on Tuesday")
    assert len(toks) == 7 and toks[2] == "'"
    assert tokenize("  a \t b\n") == ["a", "b"]


def test_parse_farmworkers():
    r = parse_tagged(FARMWORKERS)
    assert len(r.tokens) == 14
    assert r.effect == Span(0, 6) and r.span_text("effect") == "The farmworkers ' strike resumed on Tuesday"
    assert r.cause == Span(8, 12) and r.span_text("cause") == "their demands were not met"
    assert r.signal is None
    assert r.tokens[-1] == "."


def test_parse_minimal_with_signal():
    r = parse_tagged("<ARG0>a</ARG0> <SIG>so</SIG> <ARG1>b</ARG1>")
    assert (r.cause, r.signal, r.effect) == (Span(0, 0), Span(1, 1), Span(2, 2))


@pytest.mark.parametrize(
    "text,kind",
    [
        ("<ARG0>a <ARG1>b</ARG1></ARG0>", "nested_tags"),
        ("<ARG0>a <ARG1>b</ARG0> c</ARG1>", "interleaved_tags"),
        ("<ARG0>a</ARG0> b", "missing_tag"),
        ("<ARG0>a</ARG0> <ARG0>b</ARG0> <ARG1>c</ARG1>", "duplicate_tag"),
        ("<ARG0>a</ARG0> <SIG>x</SIG> <SIG>y</SIG> <ARG1>c</ARG1>", "duplicate_tag"),
        ("<ARG1>b</ARG1> <ARG0>a", "unclosed_tag"),
        ("a</ARG0> <ARG1>b</ARG1>", "unmatched_close"),
        ("<ARG0></ARG0> <ARG1>b</ARG1>", "empty_span"),
        ("foo<ARG0>bar</ARG0> <ARG1>b</ARG1>", "tag_inside_token"),
        ("<ARG0>a</ARG0><ARG1>b</ARG1>", "tag_inside_token"),
    ],
)
def test_parse_errors_are_distinct(text, kind):
    with pytest.raises(AnnotationError) as exc:
        parse_tagged(text)
    assert exc.value.kind == kind


def test_punctuation_after_tag_is_a_separate_token():
    r = parse_tagged("<ARG0>rain</ARG0>, so <ARG1>flood</ARG1>.")
    assert r.tokens == ("rain", ",", "so", "flood", ".")


def test_serialize_simple():
    r = AnnotatedRelation(tokens=("a", "b", "c"), cause=Span(0, 0), effect=Span(2, 2))
    assert serialize_tagged(r) == "<ARG0>a</ARG0> b <ARG1>c</ARG1>"


def test_farmworkers_round_trip():
    normalized = (
        "<ARG1>The farmworkers ' strike resumed on Tuesday</ARG1> when "
        "<ARG0>their demands were not met</ARG0> ."
    )
    assert serialize_tagged(parse_tagged(FARMWORKERS)) == normalized
    assert normalize_tagged(FARMWORKERS) == normalized
    assert parse_tagged(normalized) == parse_tagged(FARMWORKERS)


def test_round_trip_collapses_whitespace():
    text = "  <ARG0>a   b</ARG0>\tc \n<ARG1>d</ARG1>  "
    assert serialize_tagged(parse_tagged(text)) == " ".join(text.split())


def test_relation_rejects_bad_values():
    with pytest.raises(AnnotationError):
        AnnotatedRelation(tokens=("a", "b"), cause=Span(0, 1), effect=Span(1, 1))
    with pytest.raises(AnnotationError):
        AnnotatedRelation(tokens=("a", "b"), cause=Span(0, 0), effect=Span(2, 2))
    with pytest.raises(AnnotationError):
        AnnotatedRelation(tokens=("a", "b c"), cause=Span(0, 0), effect=Span(1, 1))
    with pytest.raises(AnnotationError):
        AnnotatedRelation(tokens=("a", "<SIG>"), cause=Span(0, 0), effect=Span(1, 1))


def test_hypothesis_to_relation():
    f = make_field([1, 0], [1, 0], [0, 1], [0, 1], tokens=["x", "y"])
    h = RelationHypothesis(Span(0, 0), Span(1, 1), Orientation.C_BEFORE_E, 4.0)
    assert serialize_tagged(hypothesis_to_relation(f, h)) == "<ARG0>x</ARG0> <ARG1>y</ARG1>"

    f3 = make_field([0.2, 0.3, 0.5], [0.2, 0.3, 0.5], [0.2, 0.3, 0.5], [0.2, 0.3, 0.5], tokens=["a", "b", "c"])
    h3 = RelationHypothesis(Span(0, 0), Span(2, 2), Orientation.C_BEFORE_E, 1.0, Span(1, 1), 0.5)
    tagged = serialize_tagged(hypothesis_to_relation(f3, h3))
    assert tagged.count("<SIG>") == 1 and tagged.count("</SIG>") == 1

    far = RelationHypothesis(Span(0, 0), Span(5, 5), Orientation.C_BEFORE_E, 1.0)
    with pytest.raises(AnnotationError):
        hypothesis_to_relation(f, far)


words = st.text(alphabet="abcxyz'.,-", min_size=1, max_size=5)


@st.composite
def relations(draw):
    n = draw(st.integers(2, 14))
    tokens = draw(st.lists(words, min_size=n, max_size=n))
    cuts = sorted(draw(st.lists(st.integers(0, n), min_size=6, max_size=6)))
    # carve up to three disjoint spans from sorted cut points
    intervals = [(cuts[0], cuts[1]), (cuts[2], cuts[3]), (cuts[4], cuts[5])]
    spans = [Span(a, b - 1) if b > a else None for a, b in intervals]
    if spans[0] is None or spans[1] is None:
        spans = [Span(0, 0), Span(n - 1, n - 1), None]
    order = draw(st.permutations([0, 1, 2]))
    cause, effect, signal = (spans[i] for i in order)
    if cause is None or effect is None:
        cause, effect, signal = spans
    return AnnotatedRelation(tokens=tuple(tokens), cause=cause, effect=effect, signal=signal)


@settings(max_examples=300)
@given(relations())
def test_parse_serialize_round_trip(rel):
    text = serialize_tagged(rel)
    assert parse_tagged(text) == rel
    assert serialize_tagged(parse_tagged(text)) == text


_alphabet = st.sampled_from(["<ARG0>", "</ARG0>", "<ARG1>", "</ARG1>", "<SIG>", "</SIG>", "<ARG", "a", "b", " ", ".", "<", ">", "/"])


@settings(max_examples=500)
@given(st.lists(_alphabet, max_size=25).map("".join))
def test_parser_never_crashes(text):
    try:
        r = parse_tagged(text)
    except AnnotationError:
        return
    assert parse_tagged(serialize_tagged(r)) == r
