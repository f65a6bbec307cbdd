"""Compare the compiled kernels against the pure-Python fallback.

Times the three hot paths on generated data: tokenization, fused
document counting, and SVM training epochs, plus end-to-end corpus
scoring through each implementation. Results are verified to agree
before a timing is reported.

Run from the repository root:

    python3 benchmarks/bench_kernels.py [--docs 2000] [--doc-size 100]
"""

import argparse
import time

import numpy as np

from domain_sieve import fixtures, pipeline
from domain_sieve.batcher import POSITIVE, NEGATIVE
from domain_sieve.classifier import SvmParams
from domain_sieve.corpus_io import Sentence
from domain_sieve.kernels import available_implementations
from domain_sieve.textproc import build_vocabulary, load_stopwords


def _time(fn, repeats=3):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def bench(num_docs, doc_size):
    impls = available_implementations()
    if "compiled" not in impls:
        print("compiled kernels not available; nothing to compare")
    names = sorted(impls)

    sentences = fixtures.web_corpus(num_docs * doc_size, seed=3)
    docs = [sentences[i:i + doc_size]
            for i in range(0, len(sentences), doc_size)]
    stopwords = load_stopwords("en-v1")
    vocab = build_vocabulary(sentences, max_size=70_000, stopwords=stopwords,
                             stopwords_id="en-v1")
    tokens = vocab.tokens_by_index()
    total_sentences = len(sentences)

    print(f"corpus: {num_docs} documents x {doc_size} sentences "
          f"({total_sentences} sentences), vocabulary {len(vocab)}")
    print()

    rows = []

    def add(op, results):
        rows.append((op, results))

    # tokenize
    results = {}
    reference = None
    for name in names:
        impl = impls[name]
        seconds, out = _time(
            lambda impl=impl: [impl.tokenize(s) for s in sentences[:100_000]])
        if reference is None:
            reference = out
        else:
            assert out == reference, f"{name} tokenization disagrees"
        results[name] = seconds
    add(f"tokenize ({min(100_000, total_sentences)} sentences)", results)

    # fused document counts
    results = {}
    reference = None
    for name in names:
        impl = impls[name]
        table = impl.TokenTable(tokens)
        seconds, out = _time(
            lambda impl=impl, table=table: [impl.doc_counts(table, d)
                                            for d in docs])
        flat = [(idx.tolist(), cnt.tolist()) for idx, cnt in out]
        if reference is None:
            reference = flat
        else:
            assert flat == reference, f"{name} counting disagrees"
        results[name] = seconds
    add(f"doc_counts ({num_docs} documents)", results)

    # solver epochs on a real training problem
    news = fixtures.news_corpus(5000, seed=3)
    web = fixtures.web_corpus(11000, seed=3)
    texts = {POSITIVE: news, NEGATIVE: web}
    pos = [Sentence(id=i, text=t) for i, t in enumerate(news)]
    neg = [Sentence(id=i, text=t) for i, t in enumerate(web)]
    dataset = pipeline.build_labeled_dataset(pos, neg, 1, 2.0, 0)
    train_vocab = pipeline.vocabulary_from_dataset(dataset, texts, 70_000,
                                                   stopwords, "en-v1")
    vectors = pipeline.vectorize_batches(dataset.batches, texts, train_vocab)
    labels = np.asarray(pipeline.labels_of(dataset.batches), dtype=np.float64)
    dim = len(train_vocab)
    n = len(vectors)
    indptr = np.zeros(n + 1, dtype=np.int32)
    idx_parts, val_parts = [], []
    for i, vec in enumerate(vectors):
        idx_parts.append(np.append(vec.indices, dim).astype(np.int32))
        val_parts.append(np.append(vec.weights, 1.0))
        indptr[i + 1] = indptr[i] + vec.nnz + 1
    indices = np.concatenate(idx_parts)
    data = np.concatenate(val_parts)
    params = SvmParams(max_iter=60, tol=1e-12)  # fixed workload, no early stop

    results = {}
    reference = None
    for name in names:
        impl = impls[name]

        def run(impl=impl):
            w = np.zeros(dim + 1)
            alpha = np.zeros(n)
            impl.svm_epochs(indptr, indices, data, labels, params.c,
                            params.tol, params.max_iter, params.seed, w, alpha)
            return w

        seconds, w = _time(run, repeats=1 if name == "python" else 3)
        if reference is None:
            reference = w
        else:
            worst = float(np.max(np.abs(w - reference)))
            assert worst < 1e-8, f"{name} solver diverges by {worst}"
        results[name] = seconds
    add(f"svm_epochs ({n} examples, {params.max_iter} epochs)", results)

    width = max(len(op) for op, _ in rows) + 2
    header = f"{'operation':<{width}}" + "".join(f"{n:>12}" for n in names)
    if len(names) == 2:
        header += f"{'speedup':>10}"
    print(header)
    for op, results in rows:
        line = f"{op:<{width}}"
        for name in names:
            line += f"{results[name]:>11.3f}s"
        if len(names) == 2:
            line += f"{results['python'] / results['compiled']:>9.1f}x"
        print(line)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--docs", type=int, default=2000)
    parser.add_argument("--doc-size", type=int, default=100)
    args = parser.parse_args()
    bench(args.docs, args.doc_size)


if __name__ == "__main__":
    main()
