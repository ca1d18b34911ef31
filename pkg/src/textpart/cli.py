"""Batch command line: ingest corpora, run clustering, evaluate results.

Subcommands:

    textpart ingest INPUT --output PREFIX [--stop-words FILE] [--min-count N]
    textpart cluster PREFIX --algo A --stop S [--k K] [--delta D]
                     [--restarts R] [--maxl L] [--eps E] [--seed S]
                     [--weighting tfidf|none] [--output REPORT]
    textpart eval REPORT LABELS

``TEXTPART_THREADS`` caps the worker count for restart-parallel phases
(0 = one worker per CPU). All numeric output uses the ``.`` decimal
separator regardless of locale.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from pathlib import Path

import numpy as np
import scipy.sparse as sp

from . import report as report_mod
from .corpus import (
    EmptyCorpusError,
    TermDocMatrix,
    build_matrix,
    read_corpus_dir,
    read_corpus_lines,
    read_labels,
    read_matrix,
    read_stop_words,
    tfidf_weight,
    tokenize,
    word_conditionals,
    write_matrix,
)
from .evaluate import nmi
from .partition import Partition
from .pddp import pddp_run
from .sgem import sgem_run
from .sib import sib_run

ALGOS = ("pddp", "pddp+sgem", "sib", "pddp+sib")


def _workers() -> int:
    raw = os.environ.get("TEXTPART_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"TEXTPART_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise ValueError("TEXTPART_THREADS must be >= 0")
    return value if value > 0 else (os.cpu_count() or 1)


def _subset_docs(m: TermDocMatrix, keep_ids: set[str]) -> TermDocMatrix:
    mask = np.array([d in keep_ids for d in m.doc_ids])
    kept = tuple(d for d in m.doc_ids if d in keep_ids)
    return TermDocMatrix(sp.csr_array(m.matrix[mask]), m.vocab, kept)


def run_clustering(
    tdm: TermDocMatrix,
    algo: str,
    stop: str,
    k: int | None = None,
    delta: float | None = None,
    restarts: int = 10,
    maxl: int = 50,
    eps: float = 0.0,
    seed: int = 0,
    weighting: str = "tfidf",
    workers: int = 1,
) -> report_mod.RunReport:
    """Run one clustering configuration and assemble its report.

    The reported wall-clock time covers the clustering phase only (not
    matrix loading or weighting transforms).
    """
    if weighting == "tfidf":
        weighted, dropped = tfidf_weight(tdm)
        if dropped:
            for d in dropped:
                print(f"dropped document with no informative terms: {d}", file=sys.stderr)
            tdm = _subset_docs(tdm, set(weighted.doc_ids))
    elif weighting == "none":
        weighted = tdm
    else:
        raise ValueError(f"unknown weighting {weighting!r}")
    if weighted.n_docs < 2:
        raise ValueError("fewer than 2 documents remain after weighting")

    matrix = weighted.matrix
    needs_joint = algo in ("sib", "pddp+sib")
    joint = word_conditionals(tdm) if needs_joint else None

    params: list[tuple[str, str]] = [("stop", stop), ("weighting", weighting)]
    tree = None
    started = time.perf_counter()

    if algo == "pddp":
        tree = pddp_run(matrix, stop=stop, k=k, seed=seed)
        part = tree.partition()
        if stop == "fixed":
            params.append(("k", str(k)))
    elif algo == "pddp+sgem":
        tree = pddp_run(matrix, stop=stop, k=k, seed=seed)
        part, _, _ = sgem_run(tree.partition(), matrix, delta=delta)
        if stop == "fixed":
            params.append(("k", str(k)))
        params.append(("delta", repr(delta) if delta is not None else "auto"))
    elif algo == "sib":
        if stop == "fixed":
            k_run = k
        else:
            tree = pddp_run(matrix, stop=stop, seed=seed)
            k_run = tree.n_leaves
        ib = sib_run(joint, k_run, n_restarts=restarts, max_loops=maxl, eps=eps,
                     seed=seed, workers=workers)
        part = Partition(ib.assignment, k_run)
        params.extend([("k", str(k_run)), ("restarts", str(restarts)),
                       ("maxl", str(maxl)), ("eps", repr(eps))])
    elif algo == "pddp+sib":
        tree = pddp_run(matrix, stop=stop, k=k, seed=seed)
        init = tree.partition()
        ib = sib_run(joint, init.k, max_loops=maxl, eps=eps, seed=seed,
                     init=init.labels, workers=workers)
        part = Partition(ib.assignment, init.k)
        if stop == "fixed":
            params.append(("k", str(k)))
        params.extend([("maxl", str(maxl)), ("eps", repr(eps))])
    else:
        raise ValueError(f"unknown algorithm {algo!r}")

    elapsed = time.perf_counter() - started
    if tree is not None and tree.warning:
        print("warning: leaves exhausted before the stopping rule fired", file=sys.stderr)

    labels = part.labels
    rep = report_mod.RunReport(
        algorithm=algo,
        seed=seed,
        params=params,
        k_found=int(np.unique(labels).size),
        time_seconds=elapsed,
        tree=report_mod.tree_records(tree) if tree is not None else None,
        assignments=[(doc_id, int(c)) for doc_id, c in zip(tdm.doc_ids, labels)],
    )
    return rep


def _cmd_ingest(args: argparse.Namespace) -> int:
    stop_words = read_stop_words(args.stop_words) if args.stop_words else frozenset()
    path = Path(args.input)
    if path.is_dir():
        texts, doc_ids = read_corpus_dir(path)
    else:
        texts, doc_ids = read_corpus_lines(path)
    docs = [tokenize(t, stop_words) for t in texts]
    tdm, dropped = build_matrix(docs, min_count=args.min_count, doc_ids=doc_ids)
    for d in dropped:
        print(f"dropped empty document: {d}", file=sys.stderr)
    write_matrix(tdm, args.output)
    print(f"{tdm.n_docs} {tdm.n_terms} {tdm.nnz}")
    return 0


def _cmd_cluster(args: argparse.Namespace) -> int:
    tdm = read_matrix(args.prefix)
    rep = run_clustering(
        tdm,
        algo=args.algo,
        stop=args.stop,
        k=args.k,
        delta=args.delta,
        restarts=args.restarts,
        maxl=args.maxl,
        eps=args.eps,
        seed=args.seed,
        weighting=args.weighting,
        workers=_workers(),
    )
    out = args.output if args.output else args.prefix + ".report"
    report_mod.write_report(rep, out)
    print(f"wrote {out} k_found={rep.k_found}")
    return 0


def _cmd_eval(args: argparse.Namespace) -> int:
    rep = report_mod.read_report(args.report)
    labels = read_labels(args.labels)
    if len(labels) != len(rep.assignments):
        raise ValueError(
            f"label count {len(labels)} does not match assignment count {len(rep.assignments)}"
        )
    clusters = [c for _, c in rep.assignments]
    value = nmi(np.asarray(clusters), np.asarray(labels))
    print(f"{value:.4f}")
    rep.nmi = value
    report_mod.write_report(rep, args.report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="textpart", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p_ing = sub.add_parser("ingest", help="tokenize a corpus and write the sparse matrix files")
    p_ing.add_argument("input", help="directory of .txt files, or one document per line")
    p_ing.add_argument("--output", required=True, help="output file prefix")
    p_ing.add_argument("--stop-words", help="file with one stop word per line")
    p_ing.add_argument("--min-count", type=int, default=2,
                       help="minimum corpus-wide term count (default 2)")
    p_ing.set_defaults(func=_cmd_ingest)

    p_clu = sub.add_parser("cluster", help="run a clustering pipeline and write a report")
    p_clu.add_argument("prefix", help="matrix file prefix written by ingest")
    p_clu.add_argument("--algo", required=True, choices=ALGOS)
    p_clu.add_argument("--stop", required=True, choices=("fixed", "csv", "bic"))
    p_clu.add_argument("--k", type=int)
    p_clu.add_argument("--delta", type=float, help="sGEM convergence threshold")
    p_clu.add_argument("--restarts", type=int, default=10)
    p_clu.add_argument("--maxl", type=int, default=50)
    p_clu.add_argument("--eps", type=float, default=0.0)
    p_clu.add_argument("--seed", type=int, default=0)
    p_clu.add_argument("--weighting", choices=("tfidf", "none"), default="tfidf",
                       help="'none' clusters the stored values as-is (synthetic vectors)")
    p_clu.add_argument("--output", help="report path (default: <prefix>.report)")
    p_clu.set_defaults(func=_cmd_cluster)

    p_eval = sub.add_parser("eval", help="score a report against gold labels")
    p_eval.add_argument("report")
    p_eval.add_argument("labels", help="one category per document, .docs order")
    p_eval.set_defaults(func=_cmd_eval)
    return parser


def _validate_cluster_flags(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if args.stop == "fixed" and (args.k is None or args.k < 1):
        parser.error("--stop fixed requires --k >= 1")
    if args.stop != "fixed" and args.k is not None:
        parser.error("--k is only valid with --stop fixed")
    if not 0.0 <= args.eps < 1.0:
        parser.error("--eps must be in [0, 1)")
    if args.restarts < 1:
        parser.error("--restarts must be >= 1")
    if args.maxl < 1:
        parser.error("--maxl must be >= 1")


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "cluster":
        _validate_cluster_flags(parser, args)
    try:
        return args.func(args)
    except (ValueError, EmptyCorpusError, OSError) as exc:
        print(f"textpart: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
