"""Command-line pipeline over JSONL streams.

Subcommands: preprocess, split, stats, encode, decode, evaluate, oracle.
Every run that writes a file also writes ``<file>.manifest.json`` recording
the resolved parameters, paths, seed, and tool version, so any output can
be reproduced byte-for-byte. Exit codes: 0 success, 1 validation error,
2 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path
from typing import Iterator

from . import __version__
from .decoding import decode
from .encoding import EncodeOptions, MissingValuePolicy, PairOrder, encode, shuffle_pairs
from .metrics import EvalReport, evaluate
from .oracle import NoiseSpec, oracle_generate
from .preprocess import (
    PRESETS,
    DeriveError,
    derive,
    load_pipeline_config,
    read_raw_tuples,
    split,
    stats,
)
from .records import (
    Paradigm,
    RecordFormatError,
    iter_records,
    load_predictions,
    write_records,
)

log = logging.getLogger("avegen")

_PARADIGMS = {"word": Paradigm.WORD_SEQUENCE, "positional": Paradigm.POSITIONAL_SEQUENCE}


class CLIError(Exception):
    """Usage/validation failure that should exit with code 1."""


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on bad usage; route through CLIError for exit code 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        raise CLIError(message)


def _manifest(out_path: Path, subcommand: str, params: dict, inputs: list[str],
              outputs: list[str], seed: int | None, started: float) -> None:
    manifest = {
        "tool": "avegen",
        "version": __version__,
        "subcommand": subcommand,
        "parameters": params,
        "inputs": inputs,
        "outputs": outputs,
        "seed": seed,
        "duration_s": round(time.monotonic() - started, 6),
    }
    Path(str(out_path) + ".manifest.json").write_text(
        json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def _read_lines(path: str) -> Iterator[str]:
    with open(path, encoding="utf-8") as fp:
        yield from fp


def cmd_preprocess(args) -> int:
    started = time.monotonic()
    if args.preset:
        config = PRESETS[args.preset]
    elif args.config:
        config = load_pipeline_config(args.config)
    else:
        raise CLIError("preprocess needs --preset or --config")
    raw = read_raw_tuples(args.infile)
    result = derive(raw, config, lowercase=not args.case_sensitive)
    with open(args.out, "w", encoding="utf-8") as fp:
        n = write_records(fp, result.records)
    log.info("wrote %d records to %s", n, args.out)
    if args.report:
        Path(args.report).write_text(
            json.dumps(result.attrition, indent=2) + "\n", encoding="utf-8"
        )
    params = {
        "preset": args.preset,
        "config": args.config,
        "case_sensitive": args.case_sensitive,
        "resolved_config": {
            "min_attr_freq": config.min_attr_freq,
            "max_attr_freq": config.max_attr_freq,
            "drop_value_literals": sorted(config.drop_value_literals),
            "require_value_in_title": config.require_value_in_title,
            "null_markers": sorted(config.null_markers),
        },
    }
    outputs = [args.out] + ([args.report] if args.report else [])
    _manifest(Path(args.out), "preprocess", params, [args.infile], outputs, args.seed, started)
    return 0


def cmd_split(args) -> int:
    started = time.monotonic()
    try:
        ratios = tuple(float(r) for r in args.ratios.split(","))
    except ValueError:
        raise CLIError(f"--ratios must be three comma-separated numbers, got {args.ratios!r}")
    if len(ratios) != 3:
        raise CLIError(f"--ratios must have exactly three parts, got {args.ratios!r}")
    records = list(iter_records(_read_lines(args.infile), lowercase=not args.case_sensitive))
    train, valid, test = split(records, ratios, args.seed)
    outputs = []
    for name, part in (("train", train), ("valid", valid), ("test", test)):
        out = f"{args.out_prefix}.{name}.jsonl"
        with open(out, "w", encoding="utf-8") as fp:
            write_records(fp, part)
        outputs.append(out)
        log.info("%s: %d records", out, len(part))
    _manifest(
        Path(f"{args.out_prefix}.split"), "split",
        {"ratios": list(ratios), "case_sensitive": args.case_sensitive},
        [args.infile], outputs, args.seed, started,
    )
    return 0


def cmd_stats(args) -> int:
    report = {}
    for path in args.infiles:
        records = list(iter_records(_read_lines(path), lowercase=not args.case_sensitive))
        report[path] = stats(records, lowercase=not args.case_sensitive).as_dict()
    print(json.dumps(report, indent=2))
    return 0


def cmd_encode(args) -> int:
    started = time.monotonic()
    opts = EncodeOptions(
        paradigm=_PARADIGMS[args.paradigm],
        tokenizer_scheme=args.tokenizer,
        on_unfindable_value=MissingValuePolicy(args.on_missing),
        pair_order=PairOrder.INPUT if args.shuffle_seed is not None else PairOrder.TITLE,
    )
    lowercase = not args.case_sensitive
    n = 0
    with open(args.out, "w", encoding="utf-8") as out:
        for idx, record in enumerate(iter_records(_read_lines(args.infile), lowercase=lowercase)):
            if args.shuffle_seed is not None:
                record = shuffle_pairs(record, args.shuffle_seed + idx)
            target = encode(record, opts, lowercase=lowercase)
            out.write(json.dumps(
                {"id": record.id, "title": record.title, "target": target},
                ensure_ascii=False,
            ) + "\n")
            n += 1
    log.info("encoded %d records to %s", n, args.out)
    params = {
        "paradigm": args.paradigm,
        "tokenizer": args.tokenizer,
        "on_missing": args.on_missing,
        "shuffle_seed": args.shuffle_seed,
        "case_sensitive": args.case_sensitive,
    }
    _manifest(Path(args.out), "encode", params, [args.infile], [args.out], args.seed, started)
    return 0


def _iter_generations(path: str, titles_path: str | None, need_title: bool):
    titles: dict[str, str] = {}
    if titles_path:
        for record in iter_records(_read_lines(titles_path)):
            titles[record.id] = record.title
    for lineno, line in enumerate(_read_lines(path), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise RecordFormatError(f"line {lineno}: invalid JSON: {exc}") from None
        if not isinstance(obj, dict) or "id" not in obj:
            raise RecordFormatError(f"line {lineno}: expected an object with an 'id' field")
        generated = obj.get("generated")
        if not isinstance(generated, str):
            raise RecordFormatError(f"line {lineno}: 'generated' must be a string")
        record_id = str(obj["id"])
        title = obj.get("title") or titles.get(record_id, "")
        if need_title and not title.strip():
            raise RecordFormatError(
                f"line {lineno}: positional decoding needs a title "
                "(add a 'title' field or pass --titles)"
            )
        yield record_id, title, generated


def cmd_decode(args) -> int:
    started = time.monotonic()
    paradigm = _PARADIGMS[args.paradigm]
    lowercase = not args.case_sensitive
    need_title = paradigm is Paradigm.POSITIONAL_SEQUENCE
    n = 0
    with open(args.out, "w", encoding="utf-8") as out:
        for record_id, title, generated in _iter_generations(args.infile, args.titles, need_title):
            report = decode(generated, paradigm, title, args.tokenizer, lowercase=lowercase)
            out.write(json.dumps({
                "id": record_id,
                "pairs": [{"attribute": p.attribute, "value": p.value} for p in report.pairs],
                "discards": [
                    {"segment": d.segment, "reason": d.reason.value}
                    for d in report.discarded_segments
                ],
                "duplicates_removed": report.duplicates_removed,
            }, ensure_ascii=False) + "\n")
            n += 1
    log.info("decoded %d generations to %s", n, args.out)
    params = {
        "paradigm": args.paradigm,
        "tokenizer": args.tokenizer,
        "titles": args.titles,
        "case_sensitive": args.case_sensitive,
    }
    inputs = [args.infile] + ([args.titles] if args.titles else [])
    _manifest(Path(args.out), "decode", params, inputs, [args.out], args.seed, started)
    return 0


def _print_report(report: EvalReport, by_cardinality: bool) -> None:
    rows = [("joint", report.joint), ("attribute", report.attribute), ("value", report.value)]
    if by_cardinality:
        rows += [(card.value, score) for card, score in report.by_cardinality.items()]
    print(f"{'':12s}{'P':>10s}{'R':>10s}{'F1':>10s}")
    for name, score in rows:
        print(f"{name:12s}{score.precision:10.4f}{score.recall:10.4f}{score.f1:10.4f}")


def cmd_evaluate(args) -> int:
    started = time.monotonic()
    lowercase = not args.case_sensitive
    gold = list(iter_records(_read_lines(args.gold), lowercase=lowercase))
    predictions = load_predictions(_read_lines(args.pred))
    report = evaluate(gold, predictions, lowercase=lowercase, strict_ids=args.strict_ids)
    _print_report(report, args.by_cardinality)
    if args.report:
        Path(args.report).write_text(
            json.dumps(report.as_dict(), indent=2) + "\n", encoding="utf-8"
        )
        params = {
            "by_cardinality": args.by_cardinality,
            "case_sensitive": args.case_sensitive,
            "strict_ids": args.strict_ids,
        }
        _manifest(Path(args.report), "evaluate", params, [args.gold, args.pred],
                  [args.report], args.seed, started)
    return 0


def cmd_oracle(args) -> int:
    started = time.monotonic()
    noise = NoiseSpec(p_drop=args.p_drop, p_attr=args.p_attr, p_value=args.p_value)
    lowercase = not args.case_sensitive
    records = iter_records(_read_lines(args.infile), lowercase=lowercase)
    n = 0
    with open(args.out, "w", encoding="utf-8") as out:
        for record, generated in oracle_generate(
            records, _PARADIGMS[args.paradigm], noise, args.seed,
            tokenizer_scheme=args.tokenizer, lowercase=lowercase,
        ):
            out.write(json.dumps(
                {"id": record.id, "title": record.title, "generated": generated},
                ensure_ascii=False,
            ) + "\n")
            n += 1
    log.info("generated %d lines to %s", n, args.out)
    params = {
        "paradigm": args.paradigm,
        "tokenizer": args.tokenizer,
        "p_drop": args.p_drop,
        "p_attr": args.p_attr,
        "p_value": args.p_value,
        "case_sensitive": args.case_sensitive,
    }
    _manifest(Path(args.out), "oracle", params, [args.infile], [args.out], args.seed, started)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(prog="avegen", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"avegen {__version__}")

    common = _Parser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="seed for all randomness")
    common.add_argument("--case-sensitive", action="store_true",
                        help="match strings without lowercasing")
    common.add_argument("--quiet", action="store_true", help="suppress progress and warnings")

    sub = parser.add_subparsers(dest="subcommand", metavar="SUBCOMMAND")

    p = sub.add_parser("preprocess", parents=[common],
                       help="derive records from raw (title, attribute, value) tuples")
    p.add_argument("--preset", choices=sorted(PRESETS), help="named filtering profile")
    p.add_argument("--config", help="JSON pipeline config file")
    p.add_argument("--in", dest="infile", required=True, help="raw tuples (JSONL or TSV)")
    p.add_argument("--out", required=True, help="output records JSONL")
    p.add_argument("--report", help="write per-stage attrition counts to this JSON file")
    p.set_defaults(func=cmd_preprocess)

    p = sub.add_parser("split", parents=[common],
                       help="shuffled train/valid/test split")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--ratios", default="0.8,0.1,0.1")
    p.add_argument("--out-prefix", required=True,
                   help="writes <prefix>.train/.valid/.test.jsonl")
    p.set_defaults(func=cmd_split)

    p = sub.add_parser("stats", parents=[common],
                       help="corpus statistics (sentences, single/multi, attributes)")
    p.add_argument("--in", dest="infiles", nargs="+", required=True)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("encode", parents=[common],
                       help="serialize records into generation targets")
    p.add_argument("--paradigm", choices=sorted(_PARADIGMS), required=True)
    p.add_argument("--tokenizer", default="whitespace",
                   help='tokenizer scheme, e.g. "whitespace" or "mock-subword:4"')
    p.add_argument("--on-missing", choices=["skip", "error"], default="skip",
                   help="what to do when a value has no span in the title")
    p.add_argument("--shuffle-seed", type=int, default=None,
                   help="emit pairs in a seeded shuffled order instead of title order")
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_encode)

    p = sub.add_parser("decode", parents=[common],
                       help="parse generated text into pairs")
    p.add_argument("--paradigm", choices=sorted(_PARADIGMS), required=True)
    p.add_argument("--tokenizer", default="whitespace")
    p.add_argument("--titles", default=None,
                   help="records JSONL supplying titles when input lines lack them")
    p.add_argument("--in", dest="infile", required=True, help="generations JSONL")
    p.add_argument("--out", required=True, help="output pairs JSONL")
    p.set_defaults(func=cmd_decode)

    p = sub.add_parser("evaluate", parents=[common],
                       help="score predictions against gold records")
    p.add_argument("--gold", required=True, help="gold records JSONL")
    p.add_argument("--pred", required=True, help="predictions JSONL ({id, pairs})")
    p.add_argument("--by-cardinality", action="store_true",
                   help="also report single/multi subsets")
    p.add_argument("--strict-ids", action="store_true",
                   help="error when a gold record has no prediction entry")
    p.add_argument("--report", help="write the full report to this JSON file")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("oracle", parents=[common],
                       help="emit gold-derived generations, optionally noised")
    p.add_argument("--paradigm", choices=sorted(_PARADIGMS), required=True)
    p.add_argument("--tokenizer", default="whitespace")
    p.add_argument("--p-drop", type=float, default=0.0)
    p.add_argument("--p-attr", type=float, default=0.0)
    p.add_argument("--p-value", type=float, default=0.0)
    p.add_argument("--in", dest="infile", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_oracle)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except CLIError as exc:
        print(f"avegen: error: {exc}", file=sys.stderr)
        return 1
    if not getattr(args, "subcommand", None):
        parser.print_usage(sys.stderr)
        print("avegen: error: a subcommand is required", file=sys.stderr)
        return 1
    logging.basicConfig(
        level=logging.ERROR if args.quiet else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.func(args)
    except CLIError as exc:
        print(f"avegen: error: {exc}", file=sys.stderr)
        return 1
    except (RecordFormatError, DeriveError, ValueError) as exc:
        print(f"avegen: error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"avegen: i/o error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
