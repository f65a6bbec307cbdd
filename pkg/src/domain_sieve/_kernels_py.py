"""Pure-Python reference implementation of the hot kernels.

`domain_sieve._kernels` (Cython) must match this module exactly for tokenize
and doc_counts (string and integer outputs are bit-identical). svm_epochs is
allowed to differ from the compiled version in floating-point rounding only:
both walk the same coordinate order (the permutations come from the same
seeded generator) but accumulate dot products in a different order.

Everything here is deliberately dependency-light; the heavy lifting in real
runs is done by the compiled twin.
"""

import numpy as np

from domain_sieve.token_rules import NUM_TOKEN, PUNCT_CHARS

IMPLEMENTATION = "python"


def tokenize(text):
    """Split one sentence into tokens. See token_rules for the rule list."""
    out = []
    for raw in text.lower().split():
        token = raw.strip(PUNCT_CHARS)
        if not token:
            continue
        out.append(NUM_TOKEN if token.isdigit() else token)
    return out


class TokenTable:
    """Token -> contiguous index lookup, built from tokens in index order.

    Not thread-safe; when scoring fans out to worker processes each worker
    builds its own table.
    """

    def __init__(self, tokens):
        index = {}
        for i, tok in enumerate(tokens):
            if tok in index:
                raise ValueError(f"duplicate token in table: {tok!r}")
            index[tok] = i
        self._index = index
        self.size = len(index)

    def lookup(self, token):
        """Return the index of token, or -1 if absent."""
        return self._index.get(token, -1)


def doc_counts(table, texts):
    """Count in-vocabulary term occurrences over a list of sentences.

    Returns (indices, counts): int32 indices sorted ascending and int64
    counts aligned with them. Tokens outside the table contribute nothing.
    """
    counts = {}
    for text in texts:
        for token in tokenize(text):
            idx = table._index.get(token, -1)
            if idx >= 0:
                counts[idx] = counts.get(idx, 0) + 1
    if not counts:
        return np.empty(0, dtype=np.int32), np.empty(0, dtype=np.int64)
    order = sorted(counts)
    idx = np.fromiter(order, dtype=np.int32, count=len(order))
    cnt = np.fromiter((counts[i] for i in order), dtype=np.int64, count=len(order))
    return idx, cnt


def svm_epochs(indptr, indices, data, y, c, tol, max_iter, seed, w, alpha):
    """Dual coordinate descent epochs for the L1-hinge linear SVM.

    The rows of the CSR matrix (indptr int32, indices int32, data float64)
    already carry the constant bias feature. w (dim) and alpha (n) are
    updated in place. One epoch visits every example once in a freshly
    drawn seeded permutation. Convergence is declared when the spread of
    projected gradients over an epoch drops below tol.

    Returns (epochs_run, converged, last_gap).
    """
    n = y.shape[0]
    qii = np.empty(n, dtype=np.float64)
    for i in range(n):
        row = data[indptr[i]:indptr[i + 1]]
        qii[i] = float(row @ row)
    rng = np.random.default_rng(seed)
    gap = np.inf
    for epoch in range(1, max_iter + 1):
        perm = rng.permutation(n)
        pg_max = -np.inf
        pg_min = np.inf
        for i in perm:
            lo = indptr[i]
            hi = indptr[i + 1]
            idx = indices[lo:hi]
            val = data[lo:hi]
            g = y[i] * float(w[idx] @ val) - 1.0
            a = alpha[i]
            if a <= 0.0:
                pg = g if g < 0.0 else 0.0
            elif a >= c:
                pg = g if g > 0.0 else 0.0
            else:
                pg = g
            if pg > pg_max:
                pg_max = pg
            if pg < pg_min:
                pg_min = pg
            if pg > 1e-12 or pg < -1e-12:
                new_a = a - g / qii[i]
                if new_a < 0.0:
                    new_a = 0.0
                elif new_a > c:
                    new_a = c
                d = (new_a - a) * y[i]
                if d != 0.0:
                    w[idx] += d * val
                    alpha[i] = new_a
        gap = pg_max - pg_min
        if gap < tol:
            return epoch, True, gap
    return max_iter, False, gap
