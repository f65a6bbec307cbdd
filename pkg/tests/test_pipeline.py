import pytest

from domain_sieve import pipeline
from domain_sieve.batcher import NEGATIVE, POSITIVE
from domain_sieve.classifier import SvmParams
from domain_sieve.corpus_io import Sentence
from domain_sieve.errors import DataError
from domain_sieve.textproc import build_vocabulary
from domain_sieve.vectorizer import CORPUS_MAX, build_table


def _corpus(words, count, prefix=""):
    texts = [f"{prefix}{words[i % len(words)]} common filler {i}"
             for i in range(count)]
    return [Sentence(id=i, text=t) for i, t in enumerate(texts)], texts


@pytest.fixture
def tiny():
    pos_sents, pos_texts = _corpus(["inland", "harbor"], 40)
    neg_sents, neg_texts = _corpus(["outer", "rim"], 120)
    texts = {POSITIVE: [s.text for s in pos_sents],
             NEGATIVE: [s.text for s in neg_sents]}
    return pos_sents, neg_sents, texts


def test_subseeds_distinct_and_stable():
    assert pipeline.subseeds(13) == (131, 132, 133, 134)
    assert len(set(pipeline.subseeds(0))) == 4


class TestBuildLabeledDataset:
    def test_counts_follow_ratio(self, tiny):
        pos, neg, _ = tiny
        ds = pipeline.build_labeled_dataset(pos, neg, n=4, ratio=2.0, seed=0)
        assert len(ds.by_label(POSITIVE)) == 10
        assert len(ds.by_label(NEGATIVE)) == 20
        assert ds.n == 4

    def test_contiguous_ids(self, tiny):
        pos, neg, _ = tiny
        ds = pipeline.build_labeled_dataset(pos, neg, n=4, seed=0)
        assert [b.batch_id for b in ds.batches] == list(range(30))

    def test_deterministic(self, tiny):
        pos, neg, _ = tiny
        one = pipeline.build_labeled_dataset(pos, neg, n=4, seed=3)
        two = pipeline.build_labeled_dataset(pos, neg, n=4, seed=3)
        assert [b.sentence_ids for b in one.batches] == \
            [b.sentence_ids for b in two.batches]

    def test_ratio_too_small(self, tiny):
        pos, neg, _ = tiny
        with pytest.raises(DataError, match="yields no negatives"):
            pipeline.build_labeled_dataset(pos, neg, n=40, ratio=0.4, seed=0)


def test_split_dataset_uses_dedicated_seed(tiny):
    pos, neg, _ = tiny
    ds = pipeline.build_labeled_dataset(pos, neg, n=4, seed=0)
    train, test = pipeline.split_dataset(ds, train_fraction=0.3, seed=0)
    assert len(train.batches) == 3 + 6
    assert len(test.batches) == 7 + 14


def test_dataset_texts_resolve_per_label(tiny):
    pos, neg, texts = tiny
    ds = pipeline.build_labeled_dataset(pos, neg, n=4, seed=1)
    for batch, batch_texts in zip(ds.batches, pipeline.dataset_texts(
            ds.batches, texts)):
        source = texts[batch.label]
        assert batch_texts == [source[i] for i in batch.sentence_ids]


def test_vocabulary_from_dataset(tiny):
    pos, neg, texts = tiny
    ds = pipeline.build_labeled_dataset(pos, neg, n=4, seed=0)
    vocab = pipeline.vocabulary_from_dataset(ds, texts, max_size=1000,
                                             stopwords=frozenset(),
                                             stopwords_id="none")
    # every positive sentence is covered by some batch, so both target
    # marker words are in; the shared filler dominates the counts
    assert "inland" in vocab and "harbor" in vocab
    assert vocab.index_of("filler") <= 2


def test_vectorize_batches_pools_sentences(tiny):
    pos, neg, texts = tiny
    ds = pipeline.build_labeled_dataset(pos, neg, n=4, seed=0)
    vocab = pipeline.vocabulary_from_dataset(ds, texts, 1000,
                                             frozenset(), "none")
    vectors = pipeline.vectorize_batches(ds.batches, texts, vocab)
    assert len(vectors) == len(ds.batches)
    # "common" appears once per sentence: 4 occurrences = the doc max
    idx = vocab.index_of("common")
    first = dict(vectors[0].pairs())
    assert first[idx] == 1.0


def test_training_corpus_max(tiny):
    pos, neg, texts = tiny
    ds = pipeline.build_labeled_dataset(pos, neg, n=4, seed=0)
    vocab = pipeline.vocabulary_from_dataset(ds, texts, 1000,
                                             frozenset(), "none")
    best = pipeline.training_corpus_max(ds.batches, texts, build_table(vocab))
    assert best == 4  # shared words show up once per sentence, n=4


def test_training_corpus_max_all_oov(tiny):
    pos, neg, texts = tiny
    ds = pipeline.build_labeled_dataset(pos, neg, n=4, seed=0)
    foreign = build_vocabulary(["zzz"], max_size=5, stopwords=frozenset(),
                               stopwords_id="none")
    with pytest.raises(DataError, match="no in-vocabulary tokens"):
        pipeline.training_corpus_max(ds.batches, texts, build_table(foreign))


def test_labels_of(tiny):
    pos, neg, _ = tiny
    ds = pipeline.build_labeled_dataset(pos, neg, n=4, seed=0)
    labels = pipeline.labels_of(ds.batches)
    assert set(labels) == {1, -1}
    assert all((lab == 1) == (b.label == POSITIVE)
               for lab, b in zip(labels, ds.batches))


class TestTrainFromDataset:
    def _fitted(self, tiny, **kwargs):
        pos, neg, texts = tiny
        ds = pipeline.build_labeled_dataset(pos, neg, n=4, seed=0)
        train, _ = pipeline.split_dataset(ds, 0.5, seed=0)
        vocab = pipeline.vocabulary_from_dataset(ds, texts, 1000,
                                                 frozenset(), "none")
        model = pipeline.train_from_dataset(train, texts, vocab,
                                            SvmParams(), **kwargs)
        return model, vocab

    def test_calibrated_by_default(self, tiny):
        model, vocab = self._fitted(tiny)
        assert model.platt is not None
        assert model.vocab_fingerprint == vocab.fingerprint()

    def test_calibration_disabled(self, tiny):
        model, _ = self._fitted(tiny, calib_fraction=0.0)
        assert model.platt is None

    def test_corpus_max_mode_records_reference(self, tiny):
        model, _ = self._fitted(tiny, tf_mode=CORPUS_MAX)
        assert model.tf_mode == CORPUS_MAX
        assert model.corpus_max == 4

    def test_separable_domains_learned(self, tiny):
        # marker words are disjoint between the classes here, so even a
        # small training set separates them
        model, vocab = self._fitted(tiny, calib_fraction=0.0)
        w = model.weights
        assert w[vocab.index_of("inland")] > w[vocab.index_of("outer")]
