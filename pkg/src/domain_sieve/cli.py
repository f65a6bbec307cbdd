"""Command line front end: one subcommand per pipeline stage.

Stages communicate only through files with fixed names under the output
directory (dataset.tsv, vocab.tsv, model.txt, scores.tsv, groups.tsv,
selection.tsv, ...), so any stage can be rerun in isolation and stages
always find each other's artifacts. Every successful stage writes a
manifest_<stage>.json recording the config hash, input and output digests,
and versions.

Exit codes: 0 success, 1 runtime/data error, 2 configuration error
(including model/vocabulary fingerprint mismatches).

Progress goes to stderr; pass --log-jsonl PATH for machine-readable
events.
"""

import argparse
import json
import os
import platform
import sys
import time

import numpy as np

from domain_sieve import __version__, batcher, kernels, pipeline, ranker
from domain_sieve import config as config_mod
from domain_sieve import evaluation
from domain_sieve.batcher import NEGATIVE, POSITIVE
from domain_sieve.classifier import SvmParams, load_model, save_model
from domain_sieve.corpus_io import (CorpusHandle, SelectedDoc, collect_pairs,
                                    collect_texts, monolingual_stream,
                                    open_monolingual, open_parallel,
                                    sha256_file, write_selection)
from domain_sieve.errors import ConfigError, DataError, DomainSieveError
from domain_sieve.textproc import load_stopwords, load_vocabulary, save_vocabulary

STAGES = ("build-vocab", "make-dataset", "train", "score", "rank-select",
          "evaluate", "sweep", "run-all")

DATASET_FILE = "dataset.tsv"
VOCAB_FILE = "vocab.tsv"
MODEL_FILE = "model.txt"
SCORES_FILE = "scores.tsv"
GROUPS_FILE = "groups.tsv"
SELECTION_FILE = "selection.tsv"
SELECTION_MANIFEST_FILE = "selection_manifest.tsv"
BUCKETS_FILE = "buckets.tsv"


def _say(message):
    print(message, file=sys.stderr)


class _JsonLog:
    def __init__(self, path):
        self._fh = open(path, "a", encoding="utf-8") if path else None

    def event(self, name, **fields):
        if self._fh is None:
            return
        record = {"event": name}
        record.update(fields)
        self._fh.write(json.dumps(record, sort_keys=True) + "\n")
        self._fh.flush()

    def close(self):
        if self._fh is not None:
            self._fh.close()


def _corpus_handle(cfg):
    """corpus_path forms: 'pairs.tsv', 'src.txt,tgt.txt', or a plain
    one-sentence-per-line file (usable by every stage except score and
    rank-select, which need actual pairs)."""
    if not cfg.corpus_path:
        raise ConfigError("corpus_path is required for this command")
    if "," in cfg.corpus_path:
        source_path, target_path = (p.strip()
                                    for p in cfg.corpus_path.split(",", 1))
        return CorpusHandle.paired(source_path, target_path, side=cfg.side)
    if cfg.corpus_path.endswith(".tsv"):
        return CorpusHandle.tsv(cfg.corpus_path, side=cfg.side)
    return CorpusHandle.plain(cfg.corpus_path)


def _target_handle(cfg):
    if not cfg.target_path:
        raise ConfigError("target_path is required for this command")
    return CorpusHandle.plain(cfg.target_path)


def _out(cfg, name):
    return os.path.join(cfg.out_dir, name)


def _require(cfg, *names):
    paths = []
    for name in names:
        path = _out(cfg, name)
        if not os.path.exists(path):
            raise ConfigError(
                f"missing {path}; run the stage that produces {name} first"
            )
        paths.append(path)
    return paths


def _svm_params(cfg):
    return SvmParams(c=cfg.svm_c, tol=cfg.svm_tol, max_iter=cfg.svm_max_iter,
                     seed=cfg.seed)


def _negative_texts(cfg, batches):
    """Texts of the background sentences the dataset actually uses."""
    needed = set()
    for batch in batches:
        if batch.label == NEGATIVE:
            needed.update(batch.sentence_ids)
    if not needed:
        return {}
    return collect_texts(monolingual_stream(_corpus_handle(cfg)), needed)


def _texts_by_label(cfg, batches):
    target = [s.text for s in open_monolingual(_target_handle(cfg))]
    return {POSITIVE: target, NEGATIVE: _negative_texts(cfg, batches)}


def _write_manifest(cfg, cfg_hash, stage, inputs, outputs, started):
    data = {
        "subcommand": stage,
        "config": cfg_hash,
        "inputs": {path: sha256_file(path) for path in sorted(set(inputs))},
        "outputs": {os.path.basename(path): sha256_file(path)
                    for path in sorted(set(outputs))},
        "wall_time_s": round(time.perf_counter() - started, 3),
        "versions": {
            "domain_sieve": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "kernels": kernels.IMPLEMENTATION,
        },
    }
    path = _out(cfg, f"manifest_{stage.replace('-', '_')}.json")
    tmp = path + ".tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        json.dump(data, fh, indent=2, sort_keys=True)
        fh.write("\n")
    os.replace(tmp, path)
    return path


# --- stages ---


def _stage_make_dataset(cfg, cfg_hash, log):
    target_sentences = list(open_monolingual(_target_handle(cfg)))
    for note in config_mod.validate(cfg, target_count=len(target_sentences)):
        _say(f"note: {note}")
    background = monolingual_stream(_corpus_handle(cfg))
    dataset = pipeline.build_labeled_dataset(
        target_sentences, background, cfg.n, cfg.neg_pos_ratio, cfg.seed)
    out_path = _out(cfg, DATASET_FILE)
    batcher.save_dataset(dataset, out_path, target_path=cfg.target_path,
                         background_path=cfg.corpus_path, config_hash=cfg_hash)
    pos = len(dataset.by_label(POSITIVE))
    neg = len(dataset.by_label(NEGATIVE))
    _say(f"make-dataset: {pos} positive and {neg} negative documents of "
         f"n={cfg.n}")
    log.event("dataset", positives=pos, negatives=neg, n=cfg.n)
    corpus = _corpus_handle(cfg)
    return [cfg.target_path] + corpus.paths(), [out_path]


def _stage_build_vocab(cfg, cfg_hash, log):
    (dataset_path,) = _require(cfg, DATASET_FILE)
    dataset = batcher.load_dataset(dataset_path)
    texts = _texts_by_label(cfg, dataset.batches)
    stopwords = load_stopwords(cfg.stopwords)
    vocab = pipeline.vocabulary_from_dataset(dataset, texts, cfg.vocab_size,
                                             stopwords, cfg.stopwords)
    out_path = _out(cfg, VOCAB_FILE)
    save_vocabulary(vocab, out_path, config_hash=cfg_hash)
    _say(f"build-vocab: {len(vocab)} tokens "
         f"(fingerprint {vocab.fingerprint()[:12]})")
    log.event("vocabulary", size=len(vocab))
    return [dataset_path], [out_path]


def _stage_train(cfg, cfg_hash, log):
    dataset_path, vocab_path = _require(cfg, DATASET_FILE, VOCAB_FILE)
    dataset = batcher.load_dataset(dataset_path)
    vocab = load_vocabulary(vocab_path)
    train_set, test_set = pipeline.split_dataset(dataset, cfg.train_fraction,
                                                 cfg.seed)
    texts = _texts_by_label(cfg, train_set.batches)
    model = pipeline.train_from_dataset(
        train_set, texts, vocab, _svm_params(cfg), tf_mode=cfg.tf_mode,
        calib_fraction=cfg.calib_fraction)
    out_path = _out(cfg, MODEL_FILE)
    save_model(model, out_path, config_hash=cfg_hash)
    _say(f"train: {len(train_set.batches)} documents "
         f"({len(test_set.batches)} held out), {model.epochs} epochs, "
         f"stopped by {model.stop_reason}")
    log.event("train", documents=len(train_set.batches), epochs=model.epochs,
              stopped=model.stop_reason)
    return [dataset_path, vocab_path], [out_path]


def _stage_score(cfg, cfg_hash, log):
    model_path, vocab_path = _require(cfg, MODEL_FILE, VOCAB_FILE)
    vocab = load_vocabulary(vocab_path)
    model = load_model(model_path)
    corpus = _corpus_handle(cfg)
    grouping_seed = cfg.seed * 10 + 5
    docs = batcher.group_unlabeled(open_parallel(corpus), cfg.n, corpus.side,
                                   cfg.group_mode, grouping_seed)
    groups = []

    def recording(stream):
        for batch, texts in stream:
            groups.append((batch.batch_id, batch.sentence_ids))
            yield batch, texts

    scored = ranker.score_corpus(model, vocab, recording(docs), cfg.workers)
    scores_path = _out(cfg, SCORES_FILE)
    groups_path = _out(cfg, GROUPS_FILE)
    ranker.save_scores(scored, scores_path, config_hash=cfg_hash)
    groups.sort()
    batcher.save_groups(groups, groups_path, config_hash=cfg_hash)
    pairs = sum(doc.size for doc in scored)
    _say(f"score: {len(scored)} documents ({pairs} pairs), "
         f"workers={cfg.workers}")
    log.event("score", documents=len(scored), pairs=pairs)
    return [model_path, vocab_path] + corpus.paths(), [scores_path, groups_path]


def _stage_rank_select(cfg, cfg_hash, log):
    scores_path, groups_path = _require(cfg, SCORES_FILE, GROUPS_FILE)
    scored = ranker.load_scores(scores_path)
    groups = batcher.load_groups(groups_path)
    for note in config_mod.validate(cfg,
                                    pair_count=sum(d.size for d in scored)):
        _say(f"note: {note}")
    ranking = ranker.rank(scored)
    buckets = ranker.partition_buckets(ranking, cfg.num_buckets)
    buckets_path = _out(cfg, BUCKETS_FILE)
    ranker.save_buckets(buckets, buckets_path, config_hash=cfg_hash)
    selected = ranker.select_top_k(ranking, cfg.k_pairs)
    by_id = {doc.batch_id: doc for doc in scored}
    docs = []
    needed = []
    for doc_id in selected:
        if doc_id not in groups:
            raise DataError(f"groups file does not cover document {doc_id}")
        pair_ids = groups[doc_id]
        if len(pair_ids) != by_id[doc_id].size:
            raise DataError(
                f"document {doc_id}: scores say {by_id[doc_id].size} pairs, "
                f"groups file lists {len(pair_ids)}"
            )
        docs.append(SelectedDoc(doc_id=doc_id, score=by_id[doc_id].score,
                                num_pairs=len(pair_ids)))
        needed.extend(pair_ids)
    corpus = _corpus_handle(cfg)
    pair_map = collect_pairs(open_parallel(corpus), needed)
    stream = (pair_map[pid] for doc_id in selected for pid in groups[doc_id])
    selection_path = _out(cfg, SELECTION_FILE)
    manifest_path = _out(cfg, SELECTION_MANIFEST_FILE)
    summary = write_selection(stream, docs, selection_path, manifest_path,
                              config_hash=cfg_hash)
    overshoot = summary.pairs_written - cfg.k_pairs
    _say(f"rank-select: {summary.documents_written} documents, "
         f"{summary.pairs_written} pairs "
         f"(budget {cfg.k_pairs}, overshoot {max(overshoot, 0)})")
    log.event("selection", documents=summary.documents_written,
              pairs=summary.pairs_written, budget=cfg.k_pairs)
    return ([scores_path, groups_path] + corpus.paths(),
            [buckets_path, selection_path, manifest_path])


def _corpora_for_eval(cfg):
    target_sentences = list(open_monolingual(_target_handle(cfg)))
    corpus = _corpus_handle(cfg)
    background_sentences = list(monolingual_stream(corpus))
    texts = {POSITIVE: [s.text for s in target_sentences],
             NEGATIVE: [s.text for s in background_sentences]}
    return target_sentences, background_sentences, texts, corpus


def _stage_evaluate(cfg, cfg_hash, log, seeds):
    target_sentences, background_sentences, texts, corpus = _corpora_for_eval(cfg)
    results = evaluation.compare_methods(
        target_sentences, background_sentences, texts, n=cfg.n, seeds=seeds,
        params=_svm_params(cfg), ratio=cfg.neg_pos_ratio,
        train_fraction=cfg.train_fraction, vocab_size=cfg.vocab_size,
        stopwords=load_stopwords(cfg.stopwords), stopwords_id=cfg.stopwords,
        tf_mode=cfg.tf_mode)
    for r in results:
        _say(f"evaluate: {r.method:<9s} accuracy {r.mean_accuracy:.4f} "
             f"(stddev {r.stddev:.4f}, per {r.unit})")
        log.event("evaluate", method=r.method, accuracy=r.mean_accuracy,
                  stddev=r.stddev)
    outputs = evaluation.emit_report(results, None, cfg.out_dir,
                                     config_hash=cfg_hash)
    return [cfg.target_path] + corpus.paths(), outputs


def _stage_sweep(cfg, cfg_hash, log, n_values, seeds):
    target_sentences, background_sentences, texts, corpus = _corpora_for_eval(cfg)
    curve = evaluation.sweep_batch_size(
        target_sentences, background_sentences, texts, n_values, seeds=seeds,
        params=_svm_params(cfg), ratio=cfg.neg_pos_ratio,
        train_fraction=cfg.train_fraction, vocab_size=cfg.vocab_size,
        stopwords=load_stopwords(cfg.stopwords), stopwords_id=cfg.stopwords,
        tf_mode=cfg.tf_mode)
    for point in curve.points:
        _say(f"sweep: n={point.n:<4d} accuracy {point.mean_accuracy:.4f} "
             f"(stddev {point.stddev:.4f})")
        log.event("sweep", n=point.n, accuracy=point.mean_accuracy,
                  stddev=point.stddev)
    outputs = evaluation.emit_report(None, curve, cfg.out_dir,
                                     config_hash=cfg_hash)
    return [cfg.target_path] + corpus.paths(), outputs


def _parse_int_list(text, flag):
    try:
        values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise ConfigError(f"{flag} expects comma-separated integers, "
                          f"got {text!r}") from None
    if not values:
        raise ConfigError(f"{flag} lists no values")
    return values


def _build_parser():
    parser = argparse.ArgumentParser(
        prog="domain-sieve",
        description="Select target-domain training pairs from a mixed "
                    "parallel corpus using a document-level text classifier.")
    parser.add_argument("--help-config", action="store_true",
                        help="describe every configuration key and exit")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", metavar="PATH",
                        help="configuration file (defaults apply if omitted)")
    common.add_argument("--out", metavar="DIR", help="override out_dir")
    common.add_argument("--seed", type=int, metavar="N", help="override seed")
    common.add_argument("--workers", type=int, metavar="N",
                        help="override workers")
    common.add_argument("--log-jsonl", metavar="PATH",
                        help="append machine-readable events to PATH")
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.add_parser("make-dataset", parents=[common],
                   help="group target and background sentences into labeled "
                        "documents")
    sub.add_parser("build-vocab", parents=[common],
                   help="count the dataset's tokens and freeze the vocabulary")
    sub.add_parser("train", parents=[common],
                   help="train the document classifier")
    sub.add_parser("score", parents=[common],
                   help="score every corpus document with the trained model")
    sub.add_parser("rank-select", parents=[common],
                   help="rank scores, export the top pairs and the bucket "
                        "report")
    p_eval = sub.add_parser("evaluate", parents=[common],
                            help="compare batch, majority and sentence "
                                 "classification accuracy")
    p_eval.add_argument("--seeds", default="0,1,2,3,4", metavar="LIST",
                        help="comma-separated seeds (default 0,1,2,3,4)")
    p_sweep = sub.add_parser("sweep", parents=[common],
                             help="accuracy as a function of document size n")
    p_sweep.add_argument("--n-values", default="1,2,5,10,20,50",
                         metavar="LIST", help="comma-separated n values")
    p_sweep.add_argument("--seeds", default="0,1,2,3,4", metavar="LIST",
                         help="comma-separated seeds (default 0,1,2,3,4)")
    sub.add_parser("run-all", parents=[common],
                   help="make-dataset, build-vocab, train, score and "
                        "rank-select in sequence")
    return parser


_RUN_ALL_ORDER = ("make-dataset", "build-vocab", "train", "score",
                  "rank-select")


def main(argv=None):
    parser = _build_parser()
    args = parser.parse_args(argv)
    if args.help_config:
        print(config_mod.help_config(), end="")
        return 0
    if args.command is None:
        parser.print_help(sys.stderr)
        return 2

    log = None
    try:
        cfg = config_mod.load_config(args.config)
        cfg = config_mod.apply_overrides(cfg, out_dir=args.out,
                                         seed=args.seed, workers=args.workers)
        cfg_hash = config_mod.config_hash(cfg)
        os.makedirs(cfg.out_dir, exist_ok=True)
        log = _JsonLog(args.log_jsonl)

        def run_stage(stage):
            started = time.perf_counter()
            log.event("stage_start", stage=stage, config=cfg_hash)
            if stage == "make-dataset":
                inputs, outputs = _stage_make_dataset(cfg, cfg_hash, log)
            elif stage == "build-vocab":
                inputs, outputs = _stage_build_vocab(cfg, cfg_hash, log)
            elif stage == "train":
                inputs, outputs = _stage_train(cfg, cfg_hash, log)
            elif stage == "score":
                inputs, outputs = _stage_score(cfg, cfg_hash, log)
            elif stage == "rank-select":
                inputs, outputs = _stage_rank_select(cfg, cfg_hash, log)
            elif stage == "evaluate":
                inputs, outputs = _stage_evaluate(
                    cfg, cfg_hash, log, _parse_int_list(args.seeds, "--seeds"))
            elif stage == "sweep":
                inputs, outputs = _stage_sweep(
                    cfg, cfg_hash, log,
                    _parse_int_list(args.n_values, "--n-values"),
                    _parse_int_list(args.seeds, "--seeds"))
            else:
                raise AssertionError(stage)
            _write_manifest(cfg, cfg_hash, stage, inputs, outputs, started)
            log.event("stage_end", stage=stage)
            return inputs, outputs

        if args.command == "run-all":
            started = time.perf_counter()
            all_inputs, all_outputs = [], []
            for stage in _RUN_ALL_ORDER:
                inputs, outputs = run_stage(stage)
                all_inputs.extend(inputs)
                all_outputs.extend(outputs)
            _write_manifest(cfg, cfg_hash, "run-all",
                            [p for p in all_inputs
                             if not p.startswith(cfg.out_dir)],
                            all_outputs, started)
        else:
            run_stage(args.command)
        return 0
    except DomainSieveError as exc:
        stage = args.command or "config"
        print(f"domain-sieve {stage}: {exc}", file=sys.stderr)
        return 2 if isinstance(exc, ConfigError) else 1
    finally:
        if log is not None:
            log.close()


if __name__ == "__main__":
    sys.exit(main())
