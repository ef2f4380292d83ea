"""Command line entry points: decode, eval, augment, fixtures."""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import __version__
from .annotation import hypothesis_to_relation, serialize_tagged
from .augmentation import (
    DEFAULT_CONCURRENCY,
    DEFAULT_TIMEOUT,
    HttpParaphraseProvider,
    IdentityProvider,
    augment_many,
)
from .decoder import apply_softmax, decode, softmax
from .evaluation import EvaluationError, score_corpus
from .oracle import oracle_decode
from .records import (
    RecordError,
    dumps,
    field_from_record,
    field_to_record,
    hypothesis_to_json,
    read_jsonl,
    record_id,
    relations_from_record,
)
from .types import (
    ALLOW_OVERLAP,
    FORBID_OVERLAP,
    INNER_SINGLE,
    INNER_TOP_M,
    DecodeConfig,
    InvalidFieldError,
    SpanProbabilityField,
)

EXIT_OK, EXIT_INPUT, EXIT_PROVIDER = 0, 1, 2
ENDPOINT_ENV = "CAUSESPAN_PARAPHRASE_ENDPOINT"



def _report(errors: Sequence[str]) -> None:
    for msg in errors:
        print(f"error: {msg}", file=sys.stderr)


def _open_in(path: str):
    return sys.stdin if path == "-" else open(path, encoding="utf-8")


def _write_lines(path: str, lines: Sequence[str]) -> None:
    text = "".join(line + "\n" for line in lines)
    if path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def decode_record(obj, lineno: int, config: DecodeConfig, apply_sm: bool, emit_tagged: bool) -> dict:
    field = field_from_record(obj, lineno)
    if apply_sm:
        try:
            field = apply_softmax(field)
        except ValueError as exc:
            raise RecordError(repr(field.id), f"softmax failed: {exc}") from exc
    try:
        hyps = decode(field, config)
    except (InvalidFieldError, ValueError) as exc:
        raise RecordError(repr(field.id), str(exc)) from exc
    out = {"id": field.id, "relations": [hypothesis_to_json(h) for h in hyps]}
    if emit_tagged:
        out["tagged"] = [serialize_tagged(hypothesis_to_relation(field, h)) for h in hyps]
    return out


def cmd_decode(args) -> int:
    try:
        config = DecodeConfig(
            beam_k=args.k,
            num_answers_m=args.m,
            signal_threshold=args.signal_threshold,
            signal_overlap_policy=args.overlap_policy,
            max_signal_length=args.max_signal_length,
            inner_search=args.inner_search,
        )
    except ValueError as exc:
        _report([str(exc)])
        return EXIT_INPUT
    lines, errors = [], []
    try:
        with _open_in(args.input) as fh:
            for lineno, obj in read_jsonl(fh):
                try:
                    if isinstance(obj, RecordError):
                        raise obj
                    out = decode_record(obj, lineno, config, args.apply_softmax, args.emit_tagged)
                except RecordError as exc:
                    errors.append(str(exc))
                    continue
                lines.append(dumps(out))
    except OSError as exc:
        _report([f"cannot read {args.input}: {exc}"])
        return EXIT_INPUT
    _write_lines(args.output, lines)
    _report(errors)
    return EXIT_INPUT if errors else EXIT_OK


def _load_tagged(path: str) -> dict:
    out: dict = {}
    with _open_in(path) as fh:
        for lineno, obj in read_jsonl(fh):
            if isinstance(obj, RecordError):
                raise obj
            rels = relations_from_record(obj, lineno)
            sid = str(obj["id"])
            if sid in out:
                raise RecordError(repr(sid), f"duplicate id in {path}")
            out[sid] = rels
    return out


def cmd_eval(args) -> int:
    try:
        pred = _load_tagged(args.pred)
        gold = _load_tagged(args.gold)
        if not pred:
            # an empty prediction file means nothing was predicted for any sentence
            pred = {sid: [] for sid in gold}
        report = score_corpus(pred, gold)
    except (RecordError, EvaluationError, OSError) as exc:
        _report([str(exc)])
        return EXIT_INPUT
    print(json.dumps(report.to_dict(), indent=2, sort_keys=True))
    print(report.table())
    return EXIT_OK


def cmd_augment(args) -> int:
    ids, relations, errors = [], [], []
    try:
        with _open_in(args.input) as fh:
            for lineno, obj in read_jsonl(fh):
                try:
                    if isinstance(obj, RecordError):
                        raise obj
                    rels = relations_from_record(obj, lineno)
                    if len(rels) != 1:
                        raise RecordError(record_id(obj, lineno), "augmentation needs exactly one relation")
                except RecordError as exc:
                    errors.append(str(exc))
                    continue
                ids.append(str(obj["id"]))
                relations.append(rels[0])
    except OSError as exc:
        _report([f"cannot read {args.input}: {exc}"])
        return EXIT_INPUT
    if errors:
        _report(errors)
        return EXIT_INPUT

    if args.provider == "identity":
        provider = IdentityProvider()
    else:
        endpoint = args.endpoint or os.environ.get(ENDPOINT_ENV)
        if not endpoint:
            _report([f"--endpoint or ${ENDPOINT_ENV} is required for the http provider"])
            return EXIT_INPUT
        provider = HttpParaphraseProvider(endpoint, timeout=args.timeout, concurrency=args.concurrency)

    try:
        results = augment_many(relations, provider, args.n, args.concurrency, return_exceptions=True)
    finally:
        if isinstance(provider, HttpParaphraseProvider):
            provider.close()

    lines, failures = [], []
    for rid, result in zip(ids, results):
        if isinstance(result, Exception):
            failures.append(f"record {rid!r}: {result}")
            continue
        for idx, rel in enumerate(result):
            i, j = divmod(idx, args.n)
            lines.append(dumps({"id": f"{rid}-aug-{i}-{j}", "tagged": [serialize_tagged(rel)]}))
    if failures:
        _report(failures)
        return EXIT_PROVIDER
    _write_lines(args.output, lines)
    return EXIT_OK


def oracle_path(output: str) -> Path:
    p = Path(output)
    return p.with_name(p.stem + ".oracle" + p.suffix) if p.suffix else p.with_name(p.name + ".oracle")


def make_fixtures(count: int, min_n: int, max_n: int, seed: int, m: int = 5):
    """Seeded random normalized fields and their oracle decodes."""
    rng = np.random.default_rng(seed)
    fields, golden = [], []
    for idx in range(count):
        n = int(rng.integers(min_n, max_n + 1))
        vecs = [softmax(rng.normal(size=n)) for _ in range(6)]
        field = SpanProbabilityField(
            id=f"fx-{seed}-{idx}",
            tokens=[f"w{t}" for t in range(n)],
            p_cause_start=vecs[0],
            p_cause_end=vecs[1],
            p_effect_start=vecs[2],
            p_effect_end=vecs[3],
            p_signal_start=vecs[4],
            p_signal_end=vecs[5],
            signal_presence=float(rng.uniform()),
            normalized=True,
        )
        fields.append(field)
        golden.append({"id": field.id, "relations": [hypothesis_to_json(h) for h in oracle_decode(field, m)]})
    return fields, golden


def cmd_fixtures(args) -> int:
    if not 2 <= args.min_n <= args.max_n:
        _report(["need 2 <= --min-n <= --max-n"])
        return EXIT_INPUT
    fields, golden = make_fixtures(args.count, args.min_n, args.max_n, args.seed, args.m)
    try:
        _write_lines(args.output, [dumps(field_to_record(f)) for f in fields])
        _write_lines(str(oracle_path(args.output)), [dumps(g) for g in golden])
    except OSError as exc:
        _report([f"cannot write fixtures: {exc}"])
        return EXIT_INPUT
    return EXIT_OK


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causespan", description=__doc__)
    parser.add_argument("--version", action="version", version=__version__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("decode", help="decode probability records into relations")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--k", type=_positive, default=8, help="outer pairs kept per orientation")
    p.add_argument("--m", type=_positive, default=1, help="relations returned per record")
    p.add_argument("--signal-threshold", type=float, default=0.5)
    p.add_argument("--overlap-policy", choices=(FORBID_OVERLAP, ALLOW_OVERLAP), default=FORBID_OVERLAP)
    p.add_argument("--max-signal-length", type=_positive, default=None)
    p.add_argument("--inner-search", choices=(INNER_TOP_M, INNER_SINGLE), default=INNER_TOP_M)
    p.add_argument("--apply-softmax", action="store_true", help="treat arrays as logits")
    p.add_argument("--emit-tagged", action="store_true")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("eval", help="score tagged predictions against gold")
    p.add_argument("pred")
    p.add_argument("gold")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("augment", help="paraphrase-splice augmentation")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--n", type=_positive, default=2)
    p.add_argument("--provider", choices=("identity", "http"), default="identity")
    p.add_argument("--endpoint", default=None, help=f"paraphrase service base URL (default ${ENDPOINT_ENV})")
    p.add_argument("--concurrency", type=_positive, default=DEFAULT_CONCURRENCY)
    p.add_argument("--timeout", type=float, default=DEFAULT_TIMEOUT)
    p.set_defaults(func=cmd_augment)

    p = sub.add_parser("fixtures", help="write seeded random records plus oracle decodes")
    p.add_argument("output")
    p.add_argument("--count", type=_positive, default=100)
    p.add_argument("--min-n", type=int, default=2)
    p.add_argument("--max-n", type=int, default=12)
    p.add_argument("--m", type=_positive, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_fixtures)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
