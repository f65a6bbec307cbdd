"""Score pseudo-documents, rank them, take the top of the ranking.

Selection is rank-based on raw decision scores, so no probability threshold
has to be tuned: documents are sorted by descending score (ties broken by
ascending batch id, which makes the order total and reproducible) and the
budget is spent from the top. Calibrated probabilities, when the model
carries them, ride along for reporting only.

Scoring can fan out over worker processes. Each worker rebuilds the token
table from the vocabulary and runs the same counts -> tf -> dot-product
arithmetic in float64, and results are merged by batch id, so the output is
identical whatever the worker count or scheduling.
"""

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from domain_sieve import kernels
from domain_sieve.classifier import check_fingerprint, sigmoid_ab
from domain_sieve.errors import DataError, FileFormatError
from domain_sieve.vectorizer import CORPUS_MAX, tf_weights

SCORES_MAGIC = "#domain-sieve-scores v1"
BUCKETS_MAGIC = "#domain-sieve-buckets v1"

SCORE_COLUMNS = ("batch_id", "score", "proba", "size")


@dataclass(frozen=True)
class ScoredDocument:
    batch_id: int
    score: float
    proba: float | None
    size: int

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise DataError(f"non-finite score for document {self.batch_id}")
        if self.size < 1:
            raise DataError(f"document {self.batch_id} has no pairs")


@dataclass(frozen=True)
class RankedSelection:
    documents: tuple
    key: str = "(-score, batch_id)"

    def __len__(self):
        return len(self.documents)

    def __iter__(self):
        return iter(self.documents)


@dataclass(frozen=True)
class Bucket:
    label: str
    doc_ids: tuple
    pair_count: int


class _DocScorer:
    """Per-process scoring state: token table plus model arrays."""

    def __init__(self, tokens, weights, bias, tf_mode, corpus_max, platt_ab):
        self.table = kernels.TokenTable(tokens)
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = float(bias)
        self.tf_mode = tf_mode
        self.corpus_max = corpus_max
        self.platt_ab = platt_ab

    def score(self, texts):
        indices, counts = kernels.doc_counts(self.table, texts)
        if indices.size == 0:
            return self.bias
        tf = tf_weights(counts, self.tf_mode, self.corpus_max)
        return float(self.weights[indices] @ tf) + self.bias

    def score_payload(self, payload):
        batch_id, texts, size = payload
        s = self.score(texts)
        proba = None
        if self.platt_ab is not None:
            proba = _sigmoid(self.platt_ab, s)
        return ScoredDocument(batch_id=batch_id, score=s, proba=proba, size=size)


def _sigmoid(ab, score):
    z = ab[0] * score + ab[1]
    if z >= 0:
        e = math.exp(-z)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(z))


_WORKER_SCORER = None


def _pool_init(tokens, weights, bias, tf_mode, corpus_max, platt_ab):
    global _WORKER_SCORER
    _WORKER_SCORER = _DocScorer(tokens, weights, bias, tf_mode, corpus_max,
                                platt_ab)


def _pool_score(payload):
    return _WORKER_SCORER.score_payload(payload)


def score_corpus(model, vocab, docs, workers=1):
    """Score a stream of (Batch, sentence texts) pseudo-documents.

    Each document is tokenized with the shared rules, its sentences' tokens
    are pooled into one bag of words, vectorized against the vocabulary
    under the model's tf mode, and scored. The returned list is ordered by
    batch_id no matter how many workers ran.
    """
    if workers < 1:
        raise DataError(f"workers must be >= 1, got {workers}")
    check_fingerprint(model, vocab)
    if model.tf_mode == CORPUS_MAX and model.corpus_max is None:
        raise DataError("model uses corpus-max tf but carries no corpus_max")
    platt_ab = None
    if model.platt is not None:
        platt_ab = (model.platt.a, model.platt.b)
    args = (vocab.tokens_by_index(), model.weights, model.bias,
            model.tf_mode, model.corpus_max, platt_ab)
    payloads = ((batch.batch_id, texts, batch.size) for batch, texts in docs)

    if workers == 1:
        scorer = _DocScorer(*args)
        scored = [scorer.score_payload(p) for p in payloads]
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_pool_init,
                                 initargs=args) as pool:
            scored = list(pool.map(_pool_score, payloads, chunksize=8))

    scored.sort(key=lambda d: d.batch_id)
    for prev, cur in zip(scored, scored[1:]):
        if prev.batch_id == cur.batch_id:
            raise DataError(f"duplicate document id {cur.batch_id}")
    return scored


def rank(scored):
    """Sort by descending score, ascending batch_id on ties."""
    ids = {d.batch_id for d in scored}
    if len(ids) != len(scored):
        raise DataError("duplicate document ids in score list")
    ordered = sorted(scored, key=lambda d: (-d.score, d.batch_id))
    return RankedSelection(documents=tuple(ordered))


def select_top_k(ranking, k_pairs):
    """Ids of the smallest rank prefix holding at least k_pairs pairs.

    Documents are never split: the document that crosses the budget is
    included whole, so the result may overshoot by up to max doc size - 1.
    A corpus smaller than the budget is returned in full.
    """
    if k_pairs < 1:
        raise DataError(f"selection budget must be >= 1, got {k_pairs}")
    taken = []
    total = 0
    for doc in ranking:
        taken.append(doc.batch_id)
        total += doc.size
        if total >= k_pairs:
            break
    return taken


def bucket_labels(num_buckets):
    bounds = [round(100 * i / num_buckets) for i in range(num_buckets + 1)]
    return [f"{lo}%-{hi}%" for lo, hi in zip(bounds, bounds[1:])]


def partition_buckets(ranking, num_buckets=4):
    """Contiguous rank slices of near-equal document count.

    The first (len mod num_buckets) buckets take one extra document, so
    sizes differ by at most one and the slices concatenate back to the
    full ranking.
    """
    n = len(ranking)
    if not 1 <= num_buckets <= n:
        raise DataError(
            f"cannot cut {n} documents into {num_buckets} buckets"
        )
    base, extra = divmod(n, num_buckets)
    docs = list(ranking)
    labels = bucket_labels(num_buckets)
    buckets = []
    start = 0
    for i in range(num_buckets):
        size = base + (1 if i < extra else 0)
        chunk = docs[start:start + size]
        buckets.append(Bucket(
            label=labels[i],
            doc_ids=tuple(d.batch_id for d in chunk),
            pair_count=sum(d.size for d in chunk),
        ))
        start += size
    return buckets


# --- files ---


def save_scores(scored, path, config_hash=""):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(SCORES_MAGIC + "\n")
        if config_hash:
            fh.write(f"#config={config_hash}\n")
        fh.write("\t".join(SCORE_COLUMNS) + "\n")
        for doc in scored:
            proba = "" if doc.proba is None else f"{doc.proba:.6f}"
            fh.write(f"{doc.batch_id}\t{doc.score:.6f}\t{proba}\t{doc.size}\n")


def load_scores(path):
    scored = []
    header_seen = False
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line_no == 1:
                if line != SCORES_MAGIC:
                    raise FileFormatError(f"{path}:1: bad scores header: {line!r}")
                continue
            if line.startswith("#") or not line:
                continue
            if not header_seen:
                if line != "\t".join(SCORE_COLUMNS):
                    raise FileFormatError(
                        f"{path}:{line_no}: expected column header, got {line!r}"
                    )
                header_seen = True
                continue
            cols = line.split("\t")
            if len(cols) != 4:
                raise FileFormatError(
                    f"{path}:{line_no}: expected 4 columns, got {len(cols)}"
                )
            try:
                scored.append(ScoredDocument(
                    batch_id=int(cols[0]),
                    score=float(cols[1]),
                    proba=float(cols[2]) if cols[2] else None,
                    size=int(cols[3]),
                ))
            except ValueError:
                raise FileFormatError(
                    f"{path}:{line_no}: malformed score row: {line!r}"
                ) from None
    if not header_seen:
        raise FileFormatError(f"{path}: missing column header")
    return scored


def save_buckets(buckets, path, config_hash=""):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(BUCKETS_MAGIC + "\n")
        if config_hash:
            fh.write(f"#config={config_hash}\n")
        fh.write("label\tnum_docs\tnum_pairs\n")
        for b in buckets:
            fh.write(f"{b.label}\t{len(b.doc_ids)}\t{b.pair_count}\n")
