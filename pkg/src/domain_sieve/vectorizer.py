"""Term-frequency vectors over a fixed vocabulary.

Two normalizations are supported:

* doc-max (default): weight = count / max count within the document, so the
  heaviest in-vocabulary term of every non-empty vector weighs exactly 1.0.
* corpus-max: weight = min(count, M) / M for a corpus-wide reference count M
  (taken over the training collection), clamped to 1.0.

Out-of-vocabulary tokens contribute nothing, to either the counts or the
denominators.
"""

from dataclasses import dataclass

import numpy as np

from domain_sieve import kernels
from domain_sieve.errors import DataError

DOC_MAX = "doc-max"
CORPUS_MAX = "corpus-max"
TF_MODES = (DOC_MAX, CORPUS_MAX)


@dataclass(frozen=True)
class SparseVector:
    """Sorted (index, weight) pairs as parallel arrays."""

    indices: np.ndarray  # int32, strictly increasing
    weights: np.ndarray  # float64, in (0, 1]

    @property
    def nnz(self):
        return len(self.indices)

    def pairs(self):
        return list(zip(self.indices.tolist(), self.weights.tolist()))


EMPTY_VECTOR = SparseVector(indices=np.empty(0, dtype=np.int32),
                            weights=np.empty(0, dtype=np.float64))


def build_table(vocab):
    """Kernel lookup table for a Vocabulary (token -> index)."""
    return kernels.TokenTable(vocab.tokens_by_index())


def document_counts(table, texts):
    """In-vocabulary term counts for one document given as sentence texts."""
    return kernels.doc_counts(table, texts)


def tf_weights(counts, mode=DOC_MAX, corpus_max=None):
    """Normalize an int count array to term-frequency weights."""
    counts = np.asarray(counts, dtype=np.float64)
    if counts.size == 0:
        return counts
    if mode == DOC_MAX:
        return counts / counts.max()
    if mode == CORPUS_MAX:
        if corpus_max is None or corpus_max < 1:
            raise DataError("corpus-max weighting needs a positive reference count")
        return np.minimum(counts, float(corpus_max)) / float(corpus_max)
    raise DataError(f"unknown tf mode: {mode!r}")


def vector_from_counts(indices, counts, mode=DOC_MAX, corpus_max=None):
    if len(indices) == 0:
        return EMPTY_VECTOR
    return SparseVector(indices=indices, weights=tf_weights(counts, mode, corpus_max))


def vectorize(tokens, vocab, mode=DOC_MAX, corpus_max=None):
    """Vectorize an already-tokenized document against a Vocabulary.

    Convenience path for tests and small inputs; bulk scoring goes through
    build_table + document_counts instead.
    """
    counts = {}
    for token in tokens:
        idx = vocab.index_of(token)
        if idx >= 0:
            counts[idx] = counts.get(idx, 0) + 1
    if not counts:
        return EMPTY_VECTOR
    order = sorted(counts)
    idx = np.fromiter(order, dtype=np.int32, count=len(order))
    cnt = np.fromiter((counts[i] for i in order), dtype=np.int64, count=len(order))
    return vector_from_counts(idx, cnt, mode, corpus_max)


def corpus_max_count(documents, table):
    """Largest in-vocabulary term count over a collection of documents,
    each given as a list of sentence texts. Zero for an all-OOV collection."""
    best = 0
    for texts in documents:
        _, cnt = kernels.doc_counts(table, texts)
        if cnt.size and int(cnt.max()) > best:
            best = int(cnt.max())
    return best
