"""Command-line front end.

Exit codes: 0 success, 1 domain error, 2 input or validation error.
Every command's output depends only on its inputs.
"""

from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

from . import __version__
from .baseline import lemma_baseline, lemma_filter, surviving_lemmas
from .cluster import clusters, split_by_topic
from .corpus import Corpus, corpus_stats, load_corpus
from .engine import CorefGraph, EngineConfig, evaluate, explain, measure
from .errors import DomainError, InputError, LegacyRuleWarning
from .formats import load_gazetteer, load_lexicon, read_partition_file, write_conll, \
    write_partitions
from .metrics import METRICS, Partition, format_table, score_run, table_to_json
from .ontology import check_cardinality, load_profiles
from .ruledsl import format_count_report, format_rules, lint_rules, load_rules, \
    rule_count_report

log = logging.getLogger("evcoref")

SCOPE_FLAGS = {"doc": "within_document", "topic": "within_topic", "global": "cross_topic"}
MODE_FLAGS = {"certain": "certain_only", "possible": "possible_only", "combined": "combined"}
RUN_LABELS = {"certain": "only certain", "possible": "only possible",
              "combined": "possible + certain"}
ALL_TOPICS = "_all"


# --- shared loading ------------------------------------------------------------

def _profiles(args):
    return load_profiles(args.profiles)


def _rules(args, profiles):
    return load_rules(args.rules, profiles)


def _corpus(args, profiles=None) -> Corpus:
    gaz = load_gazetteer(args.gazetteer) if getattr(args, "gazetteer", None) else None
    corpus = load_corpus(args.corpus, profiles, gaz)
    if getattr(args, "lexicon", None):
        corpus = lemma_filter(corpus, load_lexicon(args.lexicon))
    return corpus


def _config(args) -> EngineConfig:
    return EngineConfig(scope=SCOPE_FLAGS[args.scope], enable_cross_type=args.enable_cross_type,
                        possible_weight=args.possible_weight)


def _reason(args) -> tuple[Corpus, CorefGraph]:
    profiles = _profiles(args)
    rules = _rules(args, profiles)
    corpus = _corpus(args, profiles)
    return corpus, evaluate(corpus, rules, profiles, config=_config(args))


def _emit(text: str, path: str | None) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _metrics(args) -> list[str]:
    if "all" in args.metrics:
        return list(METRICS)
    return [m for m in METRICS if m in args.metrics]


def _by_topic(partition: Partition, corpus: Corpus, global_scoring: bool) -> dict[str, Partition]:
    if global_scoring:
        return {ALL_TOPICS: partition}
    return split_by_topic(partition, corpus.topic_mentions())


def _gold(corpus: Corpus, global_scoring: bool) -> dict[str, Partition]:
    gold = corpus.gold()
    missing = [t.topic_id for t in corpus.topics if t.gold is None]
    if missing:
        raise InputError(f"corpus has no gold for topic(s) {missing}")
    if global_scoring:
        blocks = [b for p in gold.values() for b in p.blocks]
        return {ALL_TOPICS: Partition(blocks)}
    return gold


def _write_partition(partition_by_topic: dict[str, Partition], path: str | None, fmt: str):
    text = write_conll(partition_by_topic) if fmt == "conll" else \
        write_partitions(partition_by_topic)
    _emit(text, path)


# --- commands ------------------------------------------------------------------

def cmd_reason(args) -> int:
    _, graph = _reason(args)
    if args.out:
        _emit(graph.serialize(), args.out)
    if args.log:
        _emit(graph.derivation_log(), args.log)
    n = graph.counts()
    print(f"certain: {n['certain']}, possible: {n['possible']}")
    print(f"rounds: {graph.rounds}")
    return 0


def cmd_cluster(args) -> int:
    corpus, graph = _reason(args)
    part = clusters(graph, MODE_FLAGS[args.mode])
    _write_partition(_by_topic(part, corpus, False), args.out, args.format)
    return 0


def cmd_baseline(args) -> int:
    corpus = _corpus(args)
    part = lemma_baseline(corpus, SCOPE_FLAGS[args.scope])
    if args.lexicon:
        log.info("%d distinct lemmas survive the lexicon filter", len(surviving_lemmas(corpus)))
    _write_partition(_by_topic(part, corpus, False), args.out, args.format)
    return 0


def _read_partitions(path: str, global_scoring: bool) -> dict[str, Partition]:
    parts = read_partition_file(path)
    if global_scoring:
        return {ALL_TOPICS: Partition([b for p in parts.values() for b in p.blocks])}
    return parts


def cmd_score(args) -> int:
    if args.key:
        keys = _read_partitions(args.key, args.global_scoring)
    elif args.corpus:
        keys = _gold(load_corpus(args.corpus), args.global_scoring)
    else:
        raise InputError("score needs --key or --corpus")
    metrics = _metrics(args)
    rows = {}
    for path in args.response:
        resp = _read_partitions(path, args.global_scoring)
        # topics without any response mention score as all-singletons
        resp = {t: resp.get(t, Partition([], keys[t].universe)) if t in keys else resp[t]
                for t in set(resp) | set(keys)}
        rows[Path(path).stem] = score_run(resp, keys, metrics, args.avg)
    sys.stdout.write(format_table(rows, metrics))
    if args.json:
        _emit(table_to_json(rows), args.json)
    return 0


def cmd_run(args) -> int:
    """Baseline plus the three rule configurations, scored against gold."""
    profiles = _profiles(args)
    rules = _rules(args, profiles)
    corpus = _corpus(args, profiles)
    keys = _gold(corpus, args.global_scoring)
    graph = evaluate(corpus, rules, profiles, config=_config(args))
    metrics = _metrics(args)
    rows = {"lemma baseline": score_run(
        _by_topic(lemma_baseline(corpus, SCOPE_FLAGS[args.scope]), corpus, args.global_scoring),
        keys, metrics, args.avg)}
    for flag in ("certain", "possible", "combined"):
        part = clusters(graph, MODE_FLAGS[flag])
        rows[RUN_LABELS[flag]] = score_run(_by_topic(part, corpus, args.global_scoring), keys,
                                           metrics, args.avg)
    n = graph.counts()
    print(f"certain: {n['certain']}, possible: {n['possible']}")
    sys.stdout.write(format_table(rows, metrics))
    if args.json:
        _emit(table_to_json(rows), args.json)
    return 0


def cmd_validate(args) -> int:
    profiles = _profiles(args)
    rules = _rules(args, profiles)
    corpus = _corpus(args, profiles)
    for msg in lint_rules(rules, profiles):
        print(f"warning: {msg}")
    for v in check_cardinality(corpus.events(), profiles):
        print(f"warning: {v}")
    missing = sorted({s for ev in corpus.events() for s in ev.subevents if s not in corpus})
    for s in missing:
        print(f"warning: subevent {s!r} is not a mention of this corpus")
    print(f"ok: {corpus_stats(corpus).summary_line()}, {len(rules)} rules, "
          f"{len(profiles)} profiles")
    return 0


def cmd_stats(args) -> int:
    stats = corpus_stats(_corpus(args))
    sys.stdout.write(stats.format())
    return 0


def cmd_explain(args) -> int:
    corpus, graph = _reason(args)
    for m in (args.a, args.b):
        if m not in corpus:
            raise InputError(f"unknown mention id {m!r}")
    trace = explain(graph, args.a, args.b, args.strength)
    for d in trace:
        print(d)
    print(f"mu({args.a}, {args.b}) = {measure(graph, args.a, args.b, args.possible_weight).value:g}")
    return 0


def cmd_rules(args) -> int:
    profiles = _profiles(args)
    rules = _rules(args, profiles)
    if args.canonical:
        sys.stdout.write(format_rules(rules))
    else:
        sys.stdout.write(format_count_report(rule_count_report(rules, list(profiles))))
    return 0


# --- argument parsing ------------------------------------------------------------

def _add_inputs(p, corpus=True, rules=False):
    if corpus:
        p.add_argument("--corpus", required=True, help="corpus file (JSON Lines)")
        p.add_argument("--gazetteer", help="place containment chains")
        p.add_argument("--lexicon", help="keep only mentions whose lemma is listed")
    if rules:
        p.add_argument("--rules", help="rule file (default: shipped rules)")
    p.add_argument("--profiles", help="event type profiles (default: shipped profiles)")


def _add_engine(p):
    p.add_argument("--scope", choices=sorted(SCOPE_FLAGS), default="topic")
    p.add_argument("--enable-cross-type", action="store_true",
                   help="also apply the cross-type Killing/Dying rule")
    p.add_argument("--possible-weight", type=float, default=0.5, metavar="W")


def _add_scoring(p):
    p.add_argument("--metrics", nargs="+", choices=list(METRICS) + ["all"], default=["all"])
    p.add_argument("--avg", choices=["micro", "macro"], default="micro")
    p.add_argument("--global-scoring", action="store_true",
                   help="score all topics as a single document")
    p.add_argument("--json", metavar="PATH", help="also write the table as JSON")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="evcoref", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    parser.add_argument("--seedless-deterministic", action=argparse.BooleanOptionalAction,
                        default=True, help="kept for compatibility; output is always "
                                           "deterministic")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("reason", help="derive coreference edges")
    _add_inputs(p, rules=True)
    _add_engine(p)
    p.add_argument("--out", help="write the edge list here")
    p.add_argument("--log", help="write the derivation log here")
    p.set_defaults(func=cmd_reason)

    p = sub.add_parser("cluster", help="derive edges and write response clusters")
    _add_inputs(p, rules=True)
    _add_engine(p)
    p.add_argument("--mode", choices=sorted(MODE_FLAGS), default="combined")
    p.add_argument("--format", choices=["native", "conll"], default="native")
    p.add_argument("--out")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("baseline", help="lemma-match clusters")
    _add_inputs(p)
    p.add_argument("--scope", choices=sorted(SCOPE_FLAGS), default="topic")
    p.add_argument("--format", choices=["native", "conll"], default="native")
    p.add_argument("--out")
    p.set_defaults(func=cmd_baseline)

    p = sub.add_parser("score", help="score response clusters against a key")
    p.add_argument("--response", nargs="+", required=True)
    p.add_argument("--key", help="key partition file (native or CoNLL)")
    p.add_argument("--corpus", help="take the key from this corpus' gold records")
    _add_scoring(p)
    p.set_defaults(func=cmd_score)

    p = sub.add_parser("run", help="baseline and rule configurations scored against gold")
    _add_inputs(p, rules=True)
    _add_engine(p)
    _add_scoring(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("validate", help="check corpus, rules and profiles")
    _add_inputs(p, rules=True)
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("stats", help="corpus counts")
    _add_inputs(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("explain", help="show how an edge was derived")
    _add_inputs(p, rules=True)
    _add_engine(p)
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--strength", choices=["certain", "possible"])
    p.set_defaults(func=cmd_explain)

    p = sub.add_parser("rules", help="per-type rule counts")
    _add_inputs(p, corpus=False, rules=True)
    p.add_argument("--canonical", action="store_true", help="print the rules re-formatted")
    p.set_defaults(func=cmd_rules)
    return parser


def _show_warning(message, category, filename, lineno, file=None, line=None):
    print(f"warning: {message}", file=sys.stderr)


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s", stream=sys.stderr)
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        if not args.verbose and args.command != "rules":
            # the shipped Dying row is kept verbatim on purpose; say so only when asked
            warnings.simplefilter("ignore", LegacyRuleWarning)
        warnings.showwarning = _show_warning
        try:
            return args.func(args)
        except InputError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2
        except DomainError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 1
        except OSError as exc:
            print(f"error: {exc}", file=sys.stderr)
            return 2


if __name__ == "__main__":
    sys.exit(main())
