"""Token-overlap span scoring for cause, effect and signal.

This metric is defined by this package and is not the official shared-task
scorer: relations within a sentence are paired greedily by mean cause/effect
token F1, then token intersections are micro-averaged over the corpus per
span type.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .annotation import AnnotatedRelation
from .types import Span

SPAN_TYPES = ("cause", "effect", "signal")
METRIC_VERSION = "token-micro-greedy/1"


class EvaluationError(ValueError):
    pass


def _token_set(spans: Iterable[Optional[Span]]) -> set[int]:
    out: set[int] = set()
    for span in spans:
        if span is not None:
            out.update(span.indices())
    return out


def _prf(inter: int, n_pred: int, n_gold: int) -> tuple[float, float, float]:
    if n_pred == 0 and n_gold == 0:
        return 1.0, 1.0, 1.0
    p = inter / n_pred if n_pred else 0.0
    r = inter / n_gold if n_gold else 0.0
    f = 2 * p * r / (p + r) if p + r > 0 else 0.0
    return p, r, f


def token_f1(pred: Iterable[Optional[Span]], gold: Iterable[Optional[Span]]) -> tuple[float, float, float]:
    """(precision, recall, f1) of the token sets covered by two span collections."""
    p, g = _token_set(pred), _token_set(gold)
    return _prf(len(p & g), len(p), len(g))


def _pair_score(pred: AnnotatedRelation, gold: AnnotatedRelation) -> float:
    return (token_f1([pred.cause], [gold.cause])[2] + token_f1([pred.effect], [gold.effect])[2]) / 2


def match_relations(
    preds: Sequence[AnnotatedRelation], golds: Sequence[AnnotatedRelation]
) -> list[tuple[int, int]]:
    """Greedy best-first pairing of predicted and gold relations of one sentence.

    Pairs are returned in the order chosen. Ties go to the lower prediction
    index, then the lower gold index.
    """
    ranked = sorted(
        (-_pair_score(p, g), pi, gi) for pi, p in enumerate(preds) for gi, g in enumerate(golds)
    )
    used_p: set[int] = set()
    used_g: set[int] = set()
    pairs = []
    for _, pi, gi in ranked:
        if pi in used_p or gi in used_g:
            continue
        pairs.append((pi, gi))
        used_p.add(pi)
        used_g.add(gi)
        if len(pairs) == min(len(preds), len(golds)):
            break
    return pairs


@dataclass
class TypeScore:
    intersection: int = 0
    predicted: int = 0
    gold: int = 0

    def add(self, pred: Optional[Span], gold: Optional[Span]) -> None:
        p, g = _token_set([pred]), _token_set([gold])
        self.intersection += len(p & g)
        self.predicted += len(p)
        self.gold += len(g)

    @property
    def precision(self) -> float:
        return _prf(self.intersection, self.predicted, self.gold)[0]

    @property
    def recall(self) -> float:
        return _prf(self.intersection, self.predicted, self.gold)[1]

    @property
    def f1(self) -> float:
        return _prf(self.intersection, self.predicted, self.gold)[2]


@dataclass
class EvalReport:
    per_type: dict[str, TypeScore] = field(default_factory=lambda: {t: TypeScore() for t in SPAN_TYPES})
    matched: int = 0
    predicted: int = 0
    gold: int = 0

    @property
    def overall_f1(self) -> float:
        present = [t for t in SPAN_TYPES if self.per_type[t].gold > 0] or list(SPAN_TYPES)
        return sum(self.per_type[t].f1 for t in present) / len(present)

    def to_dict(self) -> dict:
        return {
            "metric": METRIC_VERSION,
            "per_type": {
                t: {
                    "precision": s.precision,
                    "recall": s.recall,
                    "f1": s.f1,
                    "intersection_tokens": s.intersection,
                    "predicted_tokens": s.predicted,
                    "gold_tokens": s.gold,
                }
                for t, s in self.per_type.items()
            },
            "overall_f1": self.overall_f1,
            "counts": {"matched": self.matched, "predicted": self.predicted, "gold": self.gold},
        }

    def table(self) -> str:
        lines = [f"{'type':<8} {'P':>8} {'R':>8} {'F1':>8}"]
        for t, s in self.per_type.items():
            lines.append(f"{t:<8} {s.precision:>8.4f} {s.recall:>8.4f} {s.f1:>8.4f}")
        lines.append(f"{'overall':<8} {'':>8} {'':>8} {self.overall_f1:>8.4f}")
        return "\n".join(lines)


def score_sentence(
    report: EvalReport, preds: Sequence[AnnotatedRelation], golds: Sequence[AnnotatedRelation]
) -> None:
    pairs = match_relations(preds, golds)
    report.matched += len(pairs)
    report.predicted += len(preds)
    report.gold += len(golds)
    seen_p = {pi for pi, _ in pairs}
    seen_g = {gi for _, gi in pairs}
    for pi, gi in pairs:
        for t in SPAN_TYPES:
            report.per_type[t].add(getattr(preds[pi], t), getattr(golds[gi], t))
    for pi, p in enumerate(preds):
        if pi not in seen_p:
            for t in SPAN_TYPES:
                report.per_type[t].add(getattr(p, t), None)
    for gi, g in enumerate(golds):
        if gi not in seen_g:
            for t in SPAN_TYPES:
                report.per_type[t].add(None, getattr(g, t))


def score_corpus(
    predictions: Mapping[str, Sequence[AnnotatedRelation]],
    gold: Mapping[str, Sequence[AnnotatedRelation]],
) -> EvalReport:
    """Micro-averaged report over sentences keyed by id (summed in sorted id order)."""
    missing = sorted(set(gold) - set(predictions))
    extra = sorted(set(predictions) - set(gold))
    if missing or extra:
        raise EvaluationError(f"sentence ids differ: missing predictions {missing}, unknown ids {extra}")
    report = EvalReport()
    for sid in sorted(gold):
        golds, preds = gold[sid], predictions[sid]
        ref = golds[0].tokens if golds else None
        for rel in list(golds) + list(preds):
            if ref is not None and rel.tokens != ref:
                raise EvaluationError(f"sentence {sid!r}: relations are tokenized differently")
        score_sentence(report, preds, golds)
    return report
