"""Glue between corpora, batching, vocabulary, vectors and the classifier.

Sentence ids are positions within their own corpus, so positive and
negative batches resolve texts against different lists; every function
here that touches texts takes a {label: texts} mapping. A single base seed
fans out into distinct sub-seeds for grouping, sampling, assembly and
splitting, which keeps stages decoupled but the whole build reproducible.
"""

from domain_sieve import batcher, kernels
from domain_sieve.batcher import NEGATIVE, POSITIVE
from domain_sieve.classifier import SvmParams, train_calibrated, train_svm
from domain_sieve.errors import DataError
from domain_sieve.textproc import build_vocabulary
from domain_sieve.vectorizer import DOC_MAX, CORPUS_MAX, build_table, vector_from_counts


def subseeds(seed):
    """Stable sub-seeds: grouping, sampling, assembly, split."""
    base = seed * 10
    return base + 1, base + 2, base + 3, base + 4


def build_labeled_dataset(target_sentences, background_sentences, n,
                          ratio=2.0, seed=0):
    """Group the target sample into positive batches and sample background
    batches at the configured ratio."""
    group_seed, sample_seed, assemble_seed, _ = subseeds(seed)
    positives = batcher.make_positive_batches(target_sentences, n, group_seed)
    need = int(ratio * len(positives))
    if need < 1:
        raise DataError(
            f"ratio {ratio} with {len(positives)} positive batches "
            "yields no negatives"
        )
    negatives = batcher.make_negative_batches(background_sentences, n, need,
                                              sample_seed)
    return batcher.assemble_dataset(positives, negatives, ratio=ratio,
                                    seed=assemble_seed, n=n)


def split_dataset(dataset, train_fraction=0.3, seed=0):
    _, _, _, split_seed = subseeds(seed)
    return batcher.split_train_test(dataset, train_fraction, split_seed)


def dataset_texts(batches, texts_by_label):
    """Yield each batch's sentence texts; ids are unique within a label."""
    for batch in batches:
        texts = texts_by_label[batch.label]
        yield [texts[i] for i in batch.sentence_ids]


def vocabulary_from_dataset(dataset, texts_by_label, max_size,
                            stopwords, stopwords_id):
    def sentences():
        for batch in dataset.batches:
            texts = texts_by_label[batch.label]
            for i in batch.sentence_ids:
                yield texts[i]

    return build_vocabulary(sentences(), max_size=max_size,
                            stopwords=stopwords, stopwords_id=stopwords_id)


def vectorize_batches(batches, texts_by_label, vocab, tf_mode=DOC_MAX,
                      corpus_max=None, table=None):
    """One sparse vector per batch, all sentences pooled into one bag."""
    if table is None:
        table = build_table(vocab)
    vectors = []
    for batch in batches:
        texts = texts_by_label[batch.label]
        indices, counts = kernels.doc_counts(
            table, [texts[i] for i in batch.sentence_ids])
        vectors.append(vector_from_counts(indices, counts, tf_mode, corpus_max))
    return vectors


def training_corpus_max(batches, texts_by_label, table):
    """Largest in-vocabulary token count over the training documents."""
    best = 0
    for batch in batches:
        texts = texts_by_label[batch.label]
        _, counts = kernels.doc_counts(
            table, [texts[i] for i in batch.sentence_ids])
        if counts.size:
            best = max(best, int(counts.max()))
    if best < 1:
        raise DataError("no in-vocabulary tokens in any training document")
    return best


def labels_of(batches):
    return [1 if b.label == POSITIVE else -1 for b in batches]


def train_from_dataset(train_set, texts_by_label, vocab, params=None,
                       tf_mode=DOC_MAX, calib_fraction=0.2):
    """Vectorize the training split and fit the calibrated classifier."""
    if params is None:
        params = SvmParams()
    table = build_table(vocab)
    corpus_max = None
    if tf_mode == CORPUS_MAX:
        corpus_max = training_corpus_max(train_set.batches, texts_by_label,
                                         table)
    vectors = vectorize_batches(train_set.batches, texts_by_label, vocab,
                                tf_mode, corpus_max, table=table)
    labels = labels_of(train_set.batches)
    if calib_fraction > 0.0:
        return train_calibrated(vectors, labels, params, dim=len(vocab),
                                vocab_fingerprint=vocab.fingerprint(),
                                tf_mode=tf_mode, corpus_max=corpus_max,
                                calib_fraction=calib_fraction)
    return train_svm(vectors, labels, params, dim=len(vocab),
                     vocab_fingerprint=vocab.fingerprint(),
                     tf_mode=tf_mode, corpus_max=corpus_max)
