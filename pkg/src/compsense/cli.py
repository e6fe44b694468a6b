"""Command-line interface.

Exit status: 0 on success, 1 on operational failure (I/O, parse, format
errors), 2 on usage errors (bad flags, unknown words, unmet preconditions).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import __version__
from .contexts import Scheme
from .corpus import Vocabulary, iter_conllu, tokenize_plain
from .disambiguation import DisambiguationQuery, disambiguate, load_synonyms
from .errors import CompsenseError, UsageError
from .evaluation import (DEFAULT_RHOS, evaluate, evaluate_baseline, load_test_items, rho_sweep,
                         sweep_csv)
from .expansion import expand_terms
from .index import ApmiConfig, Estimator, LogBase, build_index, load_index, save_index
from .wup import baseline_disambiguate, load_taxonomy

EXIT_OK, EXIT_FAILURE, EXIT_USAGE = 0, 1, 2

_LOG_BASES = {"e": LogBase.NATURAL, "2": LogBase.BASE2, "10": LogBase.BASE10}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(s):
    v = float(s)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"must be > 0, got {s}")
    return v


def _nonneg_float(s):
    v = float(s)
    if not v >= 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {s}")
    return v


def _positive_int(s):
    v = int(s)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {s}")
    return v


def _rho_list(s):
    return [_positive_float(x) for x in s.split(",") if x.strip()]


def _read_corpus(path: Path, fmt: str):
    if fmt == "auto":
        fmt = "conllu" if path.suffix.lower() in (".conllu", ".conll") else "text"
    if fmt == "conllu":
        with open(path, "rb") as f:
            yield from iter_conllu(f)
    else:
        yield from tokenize_plain(path.read_text(encoding="utf-8"))


def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_build(args) -> int:
    with open(args.vocab, encoding="utf-8") as f:
        vocab = Vocabulary.from_lines(f)
    if len(vocab) == 0:
        raise UsageError("empty vocabulary")
    sentences = [s for p in args.corpus for s in _read_corpus(Path(p), args.input_format)]
    config = ApmiConfig(args.k, Estimator[args.estimator.upper()], _LOG_BASES[args.log])
    index = build_index(sentences, vocab, Scheme[args.context.upper()], config,
                        window=args.window, workers=args.threads)
    save_index(index, args.index)
    summary = {"words": index.n_words, "contexts": index.n_contexts,
               "nnz_vc": index.m_vc.nnz, "nnz_cv": index.m_cv.nnz,
               "sentences": len(sentences)}
    if args.format == "json":
        _emit(json.dumps(summary))
    else:
        _emit(" ".join(f"{k}={v}" for k, v in summary.items()))
    return EXIT_OK


def cmd_expand(args) -> int:
    index = load_index(args.index)
    words = [w.lower() for w in args.words]
    result = expand_terms(index, words, args.rho)
    shown = [(t, s) for t, s in result if t not in words and s > 0][:args.top]
    if args.format == "json":
        _emit(json.dumps([{"word": t, "score": s} for t, s in shown]))
    elif args.format == "csv":
        _emit("word,score\n" + "".join(f"{t},{s!r}\n" for t, s in shown))
    else:
        for t, s in shown:
            print(f"{t} {s}")
    return EXIT_OK


def cmd_disambiguate(args) -> int:
    index = load_index(args.index)
    with open(args.synonyms, encoding="utf-8") as f:
        lexicon = load_synonyms(f)
    query = DisambiguationQuery(args.compound, args.constituent, not args.omit_constituent)
    ans = disambiguate(index, query, lexicon, args.rho)
    if args.format == "json":
        _emit(json.dumps({"compound": query.compound, "constituent": query.constituent,
                          "chosen": ans.chosen, "no_signal": ans.no_signal,
                          "ranked": [{"synonym": t, "score": s} for t, s in ans.ranked_synonyms]}))
    else:
        flag = " (no-signal)" if ans.no_signal else ""
        print(f"chosen: {ans.chosen}{flag}")
        for t, s in ans.ranked_synonyms:
            print(f"{t} {s}")
    return EXIT_OK


def _write_report(report, fmt):
    if fmt == "json":
        _emit(report.to_json())
    else:
        _emit(report.to_text())


def cmd_evaluate(args) -> int:
    index = load_index(args.index)
    with open(args.items, encoding="utf-8") as f:
        items = load_test_items(f)
    report = evaluate(index, items, args.rho, not args.omit_constituent, args.threads)
    _write_report(report, args.format)
    return EXIT_OK


def cmd_sweep(args) -> int:
    index = load_index(args.index)
    with open(args.items, encoding="utf-8") as f:
        items = load_test_items(f)
    rows = rho_sweep(index, items, args.rhos, not args.omit_constituent, args.threads)
    if args.format == "json":
        _emit(json.dumps([{"rho": r, "accuracy": a} for r, a in rows]))
    elif args.format == "text":
        _emit("\n".join(f"{r:<6} {a:.4f}" for r, a in rows))
    else:
        _emit(sweep_csv(rows))
    return EXIT_OK


def cmd_baseline(args) -> int:
    with open(args.taxonomy, encoding="utf-8") as f:
        taxonomy = load_taxonomy(f)
    if args.items:
        with open(args.items, encoding="utf-8") as f:
            items = load_test_items(f)
        _write_report(evaluate_baseline(taxonomy, items), args.format)
        return EXIT_OK
    if not args.terms or len(args.terms) < 3:
        raise UsageError("baseline needs --items or: COMPOUND SYNONYM SYNONYM [SYNONYM ...]")
    compound, *synonyms = args.terms
    chosen, score = baseline_disambiguate(taxonomy, compound, synonyms)
    if args.format == "json":
        _emit(json.dumps({"compound": compound.lower(), "chosen": chosen, "score": score}))
    else:
        print(f"{chosen} {score}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    threads_default = os.cpu_count() or 1
    common = _Parser(add_help=False)
    common.add_argument("--threads", type=_positive_int, default=threads_default,
                        help="worker count for counting/evaluation (default: %(default)s)")

    p = _Parser(prog="compsense", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    b = sub.add_parser("build", parents=[common], help="build an APPMI index from a corpus")
    b.add_argument("corpus", nargs="+", help="CoNLL-U or plain-text corpus file(s)")
    b.add_argument("--vocab", required=True, help="vocabulary of interest, one term per line")
    b.add_argument("--index", required=True, help="output index path")
    b.add_argument("--k", type=_nonneg_float, default=5.0)
    b.add_argument("--estimator", choices=["joint", "conditional"], default="conditional")
    b.add_argument("--log", choices=list(_LOG_BASES), default="e")
    b.add_argument("--context", choices=["dep", "ngram"], default="dep")
    b.add_argument("--window", type=_positive_int, default=1)
    b.add_argument("--input-format", choices=["auto", "conllu", "text"], default="auto")
    b.add_argument("--format", choices=["json", "text"], default="text")
    b.set_defaults(func=cmd_build)

    e = sub.add_parser("expand", parents=[common], help="expand a set of words")
    e.add_argument("words", nargs="+")
    e.add_argument("--index", required=True)
    e.add_argument("--rho", type=_positive_float, default=1.5)
    e.add_argument("--top", type=_positive_int, default=20)
    e.add_argument("--format", choices=["json", "text", "csv"], default="text")
    e.set_defaults(func=cmd_expand)

    d = sub.add_parser("disambiguate", parents=[common], help="rank a constituent's synonyms")
    d.add_argument("compound")
    d.add_argument("constituent")
    d.add_argument("--index", required=True)
    d.add_argument("--synonyms", required=True, help="synonym lexicon TSV")
    d.add_argument("--rho", type=_positive_float, default=1.5)
    d.add_argument("--omit-constituent", action="store_true")
    d.add_argument("--format", choices=["json", "text"], default="text")
    d.set_defaults(func=cmd_disambiguate)

    v = sub.add_parser("evaluate", parents=[common], help="accuracy over annotated test items")
    v.add_argument("--index", required=True)
    v.add_argument("--items", required=True, help="JSON-lines test items")
    v.add_argument("--rho", type=_positive_float, default=1.5)
    v.add_argument("--omit-constituent", action="store_true")
    v.add_argument("--format", choices=["json", "text"], default="text")
    v.set_defaults(func=cmd_evaluate)

    s = sub.add_parser("sweep", parents=[common], help="accuracy for a range of rho values")
    s.add_argument("--index", required=True)
    s.add_argument("--items", required=True)
    s.add_argument("--rhos", type=_rho_list, default=list(DEFAULT_RHOS),
                   help="comma-separated rho values (default: 1.0,1.5,2.5,3.0,3.5,4.0,5.0)")
    s.add_argument("--omit-constituent", action="store_true")
    s.add_argument("--format", choices=["json", "text", "csv"], default="csv")
    s.set_defaults(func=cmd_sweep)

    w = sub.add_parser("baseline", parents=[common], help="Wu-Palmer baseline")
    w.add_argument("terms", nargs="*", help="COMPOUND SYNONYM SYNONYM ... (without --items)")
    w.add_argument("--taxonomy", required=True, help="taxonomy edge/lexicon file")
    w.add_argument("--items", help="JSON-lines test items to evaluate")
    w.add_argument("--format", choices=["json", "text"], default="text")
    w.set_defaults(func=cmd_baseline)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (CompsenseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
