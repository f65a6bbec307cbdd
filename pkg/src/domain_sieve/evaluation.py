"""Accuracy experiments: method comparison, batch-size sweep, reports.

Three ways of using the classifier are compared on held-out data. "batch"
classifies whole pooled documents with a document-trained model. "sentence"
classifies single sentences with a sentence-trained model (batch size 1).
"majority" reuses that sentence model on documents, taking the majority of
per-sentence decisions. Accuracies are per-unit: per document for batch and
majority, per sentence for sentence mode; reports carry the unit so the
numbers cannot be silently mixed.

The sweep retrains on the same corpora while the batch size n varies,
rebuilding grouping, vocabulary and model per (n, seed) cell.
"""

import csv
import os
import warnings
from dataclasses import dataclass
from statistics import pstdev

from domain_sieve import kernels, pipeline
from domain_sieve.batcher import POSITIVE
from domain_sieve.classifier import (SvmParams, batch_majority_classify,
                                     check_fingerprint, decision_score)
from domain_sieve.errors import DataError
from domain_sieve.textproc import load_stopwords
from domain_sieve.vectorizer import build_table, vector_from_counts

BATCH = "batch"
SENTENCE = "sentence"
MAJORITY = "majority"
EVAL_MODES = (BATCH, SENTENCE, MAJORITY)


@dataclass(frozen=True)
class EvalReport:
    accuracy: float
    precision: float
    recall: float
    f1: float
    tp: int
    fp: int
    tn: int
    fn: int
    mode: str
    unit: str
    n: int

    @property
    def total(self):
        return self.tp + self.fp + self.tn + self.fn


@dataclass(frozen=True)
class MethodResult:
    method: str
    unit: str
    mean_accuracy: float
    stddev: float
    per_seed: tuple


@dataclass(frozen=True)
class SweepPoint:
    n: int
    mean_accuracy: float
    stddev: float
    num_seeds: int


@dataclass(frozen=True)
class SweepCurve:
    points: tuple

    def __post_init__(self):
        ns = [p.n for p in self.points]
        if ns != sorted(set(ns)):
            raise DataError("sweep points must have strictly increasing n")


def _report(outcomes, mode, unit, n):
    tp = fp = tn = fn = 0
    for truth_pos, pred_pos in outcomes:
        if truth_pos and pred_pos:
            tp += 1
        elif truth_pos:
            fn += 1
        elif pred_pos:
            fp += 1
        else:
            tn += 1
    total = tp + fp + tn + fn
    if total == 0:
        raise DataError("nothing to evaluate")
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return EvalReport(accuracy=(tp + tn) / total, precision=precision,
                      recall=recall, f1=f1, tp=tp, fp=fp, tn=tn, fn=fn,
                      mode=mode, unit=unit, n=n)


def evaluate(model, vocab, test_set, texts_by_label, mode):
    """Confusion metrics of a model over a labeled test split."""
    if mode not in EVAL_MODES:
        raise DataError(f"unknown evaluation mode: {mode!r}")
    if not test_set.batches:
        raise DataError("empty test split")
    check_fingerprint(model, vocab)
    if mode == MAJORITY and test_set.n == 1:
        warnings.warn("majority vote over single-sentence batches "
                      "degenerates to batch mode", stacklevel=2)
    table = build_table(vocab)
    outcomes = []
    for batch in test_set.batches:
        texts = texts_by_label[batch.label]
        truth = batch.label == POSITIVE
        if mode == BATCH:
            indices, counts = kernels.doc_counts(
                table, [texts[i] for i in batch.sentence_ids])
            vec = vector_from_counts(indices, counts, model.tf_mode,
                                     model.corpus_max)
            outcomes.append((truth, decision_score(model, vec) > 0.0))
        else:
            vecs = []
            for i in batch.sentence_ids:
                indices, counts = kernels.doc_counts(table, [texts[i]])
                vecs.append(vector_from_counts(indices, counts, model.tf_mode,
                                               model.corpus_max))
            if mode == SENTENCE:
                outcomes.extend(
                    (truth, decision_score(model, v) > 0.0) for v in vecs)
            else:
                pred = batch_majority_classify(model, vecs)
                outcomes.append((truth, pred == POSITIVE))
    unit = "sentences" if mode == SENTENCE else "documents"
    return _report(outcomes, mode, unit, test_set.n)


def _one_pipeline(target, background, texts_by_label, n, seed, params,
                  ratio, train_fraction, vocab_size, stopwords, stopwords_id,
                  tf_mode):
    dataset = pipeline.build_labeled_dataset(target, background, n, ratio, seed)
    train_set, test_set = pipeline.split_dataset(dataset, train_fraction, seed)
    vocab = pipeline.vocabulary_from_dataset(dataset, texts_by_label,
                                             vocab_size, stopwords,
                                             stopwords_id)
    model = pipeline.train_from_dataset(train_set, texts_by_label, vocab,
                                        params, tf_mode=tf_mode,
                                        calib_fraction=0.0)
    return vocab, model, test_set


def compare_methods(target, background, texts_by_label, n=100,
                    seeds=(0, 1, 2, 3, 4), params=None, ratio=2.0,
                    train_fraction=0.3, vocab_size=70_000, stopwords=None,
                    stopwords_id="en-v1", tf_mode="doc-max"):
    """Per-seed accuracies of the three methods on the same corpora.

    Each seed regroups both corpora and retrains from scratch: one model at
    batch size n for batch mode, one at batch size 1 that serves both the
    sentence row and the majority row (voting over the n-sized test
    documents). Calibration is skipped; it does not affect decisions.
    """
    if params is None:
        params = SvmParams()
    if stopwords is None:
        stopwords = load_stopwords(stopwords_id)
    accs = {BATCH: [], MAJORITY: [], SENTENCE: []}
    for seed in seeds:
        vocab_n, model_n, test_n = _one_pipeline(
            target, background, texts_by_label, n, seed, params, ratio,
            train_fraction, vocab_size, stopwords, stopwords_id, tf_mode)
        accs[BATCH].append(
            evaluate(model_n, vocab_n, test_n, texts_by_label, BATCH).accuracy)
        vocab_1, model_1, test_1 = _one_pipeline(
            target, background, texts_by_label, 1, seed, params, ratio,
            train_fraction, vocab_size, stopwords, stopwords_id, tf_mode)
        accs[SENTENCE].append(
            evaluate(model_1, vocab_1, test_1, texts_by_label, SENTENCE).accuracy)
        accs[MAJORITY].append(
            evaluate(model_1, vocab_1, test_n, texts_by_label, MAJORITY).accuracy)
    results = []
    for method in (BATCH, MAJORITY, SENTENCE):
        values = accs[method]
        unit = "sentences" if method == SENTENCE else "documents"
        results.append(MethodResult(
            method=method, unit=unit,
            mean_accuracy=sum(values) / len(values),
            stddev=pstdev(values), per_seed=tuple(values)))
    return results


def sweep_batch_size(target, background, texts_by_label, n_values,
                     seeds=(0, 1, 2, 3, 4), params=None, ratio=2.0,
                     train_fraction=0.3, vocab_size=70_000,
                     stopwords=None, stopwords_id="en-v1",
                     tf_mode="doc-max"):
    """Mean batch-mode accuracy per batch size, over several regroupings."""
    if params is None:
        params = SvmParams()
    if stopwords is None:
        stopwords = load_stopwords(stopwords_id)
    if not n_values or not seeds:
        raise DataError("sweep needs at least one n value and one seed")
    points = []
    for n in sorted(set(n_values)):
        values = []
        for seed in seeds:
            vocab, model, test_set = _one_pipeline(
                target, background, texts_by_label, n, seed, params, ratio,
                train_fraction, vocab_size, stopwords, stopwords_id, tf_mode)
            values.append(
                evaluate(model, vocab, test_set, texts_by_label, BATCH).accuracy)
        points.append(SweepPoint(n=n, mean_accuracy=sum(values) / len(values),
                                 stddev=pstdev(values), num_seeds=len(seeds)))
    return SweepCurve(points=tuple(points))


# --- report files ---


def _sweep_svg(curve, config_hash=""):
    """Static line plot, accuracy vs batch size, stddev error bars.

    Hand-assembled so that reruns are byte-identical; points sit at evenly
    spaced categorical x positions labeled with their n values.
    """
    width, height = 640, 400
    left, right, top, bottom = 60, 20, 20, 50
    plot_w = width - left - right
    plot_h = height - top - bottom
    points = curve.points
    if points:
        lo = min(p.mean_accuracy - p.stddev for p in points)
        y_min = min(0.5, max(0.0, (int(lo * 20) - 1) / 20))
    else:
        y_min = 0.5
    y_max = 1.0

    def sx(i):
        if len(points) == 1:
            return left + plot_w / 2
        return left + plot_w * i / (len(points) - 1)

    def sy(v):
        frac = (v - y_min) / (y_max - y_min)
        return top + plot_h * (1.0 - frac)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
        f'height="{height}" viewBox="0 0 {width} {height}">',
    ]
    if config_hash:
        parts.append(f"<!-- config={config_hash} -->")
    parts.append(
        "<style>.curve{fill:none;stroke:#1a6091;stroke-width:1.5}"
        ".marker{fill:#1a6091}.errorbar{stroke:#1a6091;stroke-width:1}"
        ".axis{stroke:#333;stroke-width:1}.grid{stroke:#ddd;stroke-width:0.5}"
        "text{font-family:sans-serif;font-size:11px;fill:#333}</style>")
    ticks = int(round((y_max - y_min) / 0.05))
    for t in range(ticks + 1):
        v = y_min + t * 0.05
        y = sy(v)
        parts.append(f'<line class="grid" x1="{left}" y1="{y:.1f}" '
                     f'x2="{width - right}" y2="{y:.1f}"/>')
        parts.append(f'<text x="{left - 8}" y="{y + 4:.1f}" '
                     f'text-anchor="end">{v:.2f}</text>')
    parts.append(f'<line class="axis" x1="{left}" y1="{top}" x2="{left}" '
                 f'y2="{height - bottom}"/>')
    parts.append(f'<line class="axis" x1="{left}" y1="{height - bottom}" '
                 f'x2="{width - right}" y2="{height - bottom}"/>')
    coords = []
    for i, p in enumerate(points):
        x = sx(i)
        y = sy(p.mean_accuracy)
        if p.stddev > 0:
            y_hi = sy(min(y_max, p.mean_accuracy + p.stddev))
            y_lo = sy(max(y_min, p.mean_accuracy - p.stddev))
            parts.append(f'<line class="errorbar" x1="{x:.1f}" y1="{y_hi:.1f}" '
                         f'x2="{x:.1f}" y2="{y_lo:.1f}"/>')
            for cap in (y_hi, y_lo):
                parts.append(f'<line class="errorbar" x1="{x - 4:.1f}" '
                             f'y1="{cap:.1f}" x2="{x + 4:.1f}" y2="{cap:.1f}"/>')
        coords.append(f"{x:.1f},{y:.1f}")
        parts.append(f'<text x="{x:.1f}" y="{height - bottom + 16}" '
                     f'text-anchor="middle">{p.n}</text>')
    if len(coords) > 1:
        parts.append(f'<polyline class="curve" points="{" ".join(coords)}"/>')
    for (coord, p) in zip(coords, points):
        x, y = coord.split(",")
        parts.append(f'<circle class="marker" cx="{x}" cy="{y}" r="3.5"/>')
    parts.append(f'<text x="{left + plot_w / 2:.1f}" y="{height - 12}" '
                 f'text-anchor="middle">batch size n</text>')
    parts.append(f'<text x="16" y="{top + plot_h / 2:.1f}" text-anchor="middle" '
                 f'transform="rotate(-90 16 {top + plot_h / 2:.1f})">'
                 f'accuracy</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_report(results, curve, out_dir, config_hash=""):
    """Write comparison/sweep csv files and the sweep plot; list them all
    in reports_manifest.txt. Reruns with the same inputs are byte-identical."""
    os.makedirs(out_dir, exist_ok=True)
    written = []

    def _open(name):
        written.append(name)
        return open(os.path.join(out_dir, name), "w", encoding="utf-8",
                    newline="")

    if results is not None:
        with _open("comparison.csv") as fh:
            if config_hash:
                fh.write(f"#config={config_hash}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["method", "unit", "num_seeds", "mean_accuracy",
                        "stddev"])
            for r in results:
                w.writerow([r.method, r.unit, len(r.per_seed),
                            f"{r.mean_accuracy:.4f}", f"{r.stddev:.4f}"])
    if curve is not None:
        with _open("sweep.csv") as fh:
            if config_hash:
                fh.write(f"#config={config_hash}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "mean_accuracy", "stddev", "num_seeds"])
            for p in curve.points:
                w.writerow([p.n, f"{p.mean_accuracy:.4f}", f"{p.stddev:.4f}",
                            p.num_seeds])
        with _open("sweep.svg") as fh:
            fh.write(_sweep_svg(curve, config_hash))
    with _open("reports_manifest.txt") as fh:
        for name in written[:-1]:
            fh.write(name + "\n")
    return [os.path.join(out_dir, name) for name in written]
