import pytest

from domain_sieve import batcher
from domain_sieve.batcher import (CONSECUTIVE, NEGATIVE, POSITIVE, RANDOM,
                                  UNLABELED, Batch, LabeledDataset,
                                  assemble_dataset, group_unlabeled,
                                  load_dataset, load_groups,
                                  make_negative_batches,
                                  make_positive_batches, save_dataset,
                                  save_groups, split_train_test)
from domain_sieve.corpus_io import Sentence, SentencePair
from domain_sieve.errors import DataError, FileFormatError


def _sents(n, prefix="s"):
    return [Sentence(id=i, text=f"{prefix} {i}") for i in range(n)]


class TestPositiveBatches:
    def test_partitions_without_overlap(self):
        batches = make_positive_batches(_sents(10), n=3, seed=0)
        assert len(batches) == 3  # partial group of 1 dropped
        seen = [i for b in batches for i in b.sentence_ids]
        assert len(seen) == len(set(seen)) == 9
        assert all(b.size == 3 for b in batches)
        assert all(b.label == POSITIVE for b in batches)

    def test_deterministic_per_seed(self):
        a = make_positive_batches(_sents(30), n=5, seed=4)
        b = make_positive_batches(_sents(30), n=5, seed=4)
        c = make_positive_batches(_sents(30), n=5, seed=5)
        assert [x.sentence_ids for x in a] == [x.sentence_ids for x in b]
        assert [x.sentence_ids for x in a] != [x.sentence_ids for x in c]

    def test_blank_sentences_skipped(self):
        sents = _sents(4) + [Sentence(id=9, text="   ")]
        batches = make_positive_batches(sents, n=2, seed=0)
        assert 9 not in {i for b in batches for i in b.sentence_ids}

    def test_too_few_sentences(self):
        with pytest.raises(DataError, match="needs at least n=5"):
            make_positive_batches(_sents(4), n=5, seed=0)

    def test_bad_n(self):
        with pytest.raises(DataError, match="batch size"):
            make_positive_batches(_sents(4), n=0, seed=0)


class TestNegativeBatches:
    def test_samples_without_replacement(self):
        batches = make_negative_batches(iter(_sents(100)), n=4, count=6, seed=1)
        assert len(batches) == 6
        ids = [i for b in batches for i in b.sentence_ids]
        assert len(ids) == len(set(ids)) == 24
        assert all(0 <= i < 100 for i in ids)
        assert all(b.label == NEGATIVE for b in batches)

    def test_exact_supply_keeps_everything(self):
        batches = make_negative_batches(iter(_sents(12)), n=3, count=4, seed=9)
        ids = sorted(i for b in batches for i in b.sentence_ids)
        assert ids == list(range(12))

    def test_streaming_input(self):
        # a generator works: one pass, no materialization required
        stream = (Sentence(id=i, text="x") for i in range(50))
        assert len(make_negative_batches(stream, n=5, count=2, seed=0)) == 2

    def test_insufficient_background(self):
        with pytest.raises(DataError, match="needs at least n\\*count=30"):
            make_negative_batches(iter(_sents(29)), n=3, count=10, seed=0)

    def test_deterministic_per_seed(self):
        draw = lambda s: [b.sentence_ids for b in
                          make_negative_batches(iter(_sents(200)), 4, 5, s)]
        assert draw(3) == draw(3)
        assert draw(3) != draw(4)


class TestAssemble:
    def _batches(self, count, label, n=2):
        return [Batch(batch_id=i, sentence_ids=(2 * i, 2 * i + 1), label=label)
                for i in range(count)]

    def test_ratio_two_to_one(self):
        ds = assemble_dataset(self._batches(4, POSITIVE),
                              self._batches(10, NEGATIVE), ratio=2.0, seed=0)
        assert len(ds.by_label(POSITIVE)) == 4
        assert len(ds.by_label(NEGATIVE)) == 8
        assert [b.batch_id for b in ds.batches] == list(range(12))

    def test_not_enough_negatives(self):
        with pytest.raises(DataError, match="need 8 negative"):
            assemble_dataset(self._batches(4, POSITIVE),
                             self._batches(7, NEGATIVE), ratio=2.0)

    def test_bad_ratio(self):
        with pytest.raises(DataError, match="ratio"):
            assemble_dataset(self._batches(2, POSITIVE),
                             self._batches(2, NEGATIVE), ratio=0.0)

    def test_no_positives(self):
        with pytest.raises(DataError, match="no positive"):
            assemble_dataset([], self._batches(2, NEGATIVE))

    def test_order_shuffled_but_content_kept(self):
        pos = self._batches(5, POSITIVE)
        neg = self._batches(10, NEGATIVE)
        ds = assemble_dataset(pos, neg, ratio=2.0, seed=11)
        kept = {(b.label, b.sentence_ids) for b in ds.batches}
        expected = {(POSITIVE, b.sentence_ids) for b in pos} | \
                   {(NEGATIVE, b.sentence_ids) for b in neg}
        assert kept == expected


class TestSplit:
    def _dataset(self, pos=10, neg=20):
        batches = [Batch(batch_id=i, sentence_ids=(i,), label=POSITIVE)
                   for i in range(pos)]
        batches += [Batch(batch_id=pos + i, sentence_ids=(i,), label=NEGATIVE)
                    for i in range(neg)]
        return LabeledDataset(batches=batches, n=1, neg_pos_ratio=2.0, seed=0)

    def test_stratified_floor_counts(self):
        train, test = split_train_test(self._dataset(), train_fraction=0.3,
                                       seed=0)
        assert len(train.by_label(POSITIVE)) == 3
        assert len(train.by_label(NEGATIVE)) == 6
        assert len(test.by_label(POSITIVE)) == 7
        assert len(test.by_label(NEGATIVE)) == 14

    def test_union_is_whole_dataset(self):
        ds = self._dataset()
        train, test = split_train_test(ds, 0.3, seed=2)
        got = sorted(b.batch_id for b in train.batches + test.batches)
        assert got == sorted(b.batch_id for b in ds.batches)

    def test_missing_class(self):
        ds = LabeledDataset(
            batches=[Batch(batch_id=0, sentence_ids=(0,), label=POSITIVE)],
            n=1, neg_pos_ratio=2.0, seed=0)
        with pytest.raises(DataError, match="no negative batches"):
            split_train_test(ds, 0.3)

    def test_bad_fraction(self):
        with pytest.raises(DataError, match="train fraction"):
            split_train_test(self._dataset(), 1.0)


def _pairs(n):
    return [SentencePair(id=i, source_text=f"src {i}", target_text=f"tgt {i}")
            for i in range(n)]


class TestGroupUnlabeled:
    def test_consecutive_keeps_partial_tail(self):
        out = list(group_unlabeled(iter(_pairs(10)), n=4, side="source"))
        assert [b.sentence_ids for b, _ in out] == \
            [(0, 1, 2, 3), (4, 5, 6, 7), (8, 9)]
        assert out[2][1] == ["src 8", "src 9"]
        assert all(b.label == UNLABELED for b, _ in out)

    def test_target_side(self):
        out = list(group_unlabeled(iter(_pairs(2)), n=2, side="target"))
        assert out[0][1] == ["tgt 0", "tgt 1"]

    def test_random_mode_covers_everything_once(self):
        out = list(group_unlabeled(iter(_pairs(10)), n=4, side="source",
                                   mode=RANDOM, seed=5))
        ids = sorted(i for b, _ in out for i in b.sentence_ids)
        assert ids == list(range(10))
        # at least one group differs from file order
        ordered = [(0, 1, 2, 3), (4, 5, 6, 7), (8, 9)]
        assert [b.sentence_ids for b, _ in out] != ordered

    def test_random_mode_texts_track_ids(self):
        for batch, texts in group_unlabeled(iter(_pairs(9)), n=2,
                                            side="source", mode=RANDOM, seed=1):
            assert texts == [f"src {i}" for i in batch.sentence_ids]

    def test_unknown_mode(self):
        with pytest.raises(DataError, match="grouping mode"):
            list(group_unlabeled(iter(_pairs(4)), n=2, side="source",
                                 mode="sorted"))


class TestDatasetFile:
    def test_round_trip(self, tmp_path):
        ds = assemble_dataset(
            [Batch(batch_id=0, sentence_ids=(3, 1), label=POSITIVE)],
            [Batch(batch_id=0, sentence_ids=(2, 0), label=NEGATIVE),
             Batch(batch_id=1, sentence_ids=(4, 5), label=NEGATIVE)],
            ratio=2.0, seed=7, n=2)
        path = tmp_path / "d.tsv"
        save_dataset(ds, path, target_path="t.txt", background_path="b.tsv",
                     config_hash="00ff")
        loaded = load_dataset(path)
        assert [(b.batch_id, b.sentence_ids, b.label) for b in loaded.batches] \
            == [(b.batch_id, b.sentence_ids, b.label) for b in ds.batches]
        assert loaded.n == 2
        assert loaded.neg_pos_ratio == 2.0
        assert loaded.seed == 7
        assert loaded.meta["target"] == "t.txt"
        assert loaded.meta["config"] == "00ff"

    def test_bad_header(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("#not a dataset\n")
        with pytest.raises(FileFormatError, match="bad dataset header"):
            load_dataset(path)

    def test_bad_label(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("#domain-sieve-dataset v1\n#n=1\n0\tmaybe\t1\n")
        with pytest.raises(FileFormatError, match="bad label"):
            load_dataset(path)

    def test_no_batches(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("#domain-sieve-dataset v1\n#n=1\n")
        with pytest.raises(FileFormatError, match="no batches"):
            load_dataset(path)


class TestGroupsFile:
    def test_round_trip(self, tmp_path):
        path = tmp_path / "g.tsv"
        save_groups([(0, (0, 1, 2)), (1, (3, 4))], path, config_hash="aa")
        assert load_groups(path) == {0: (0, 1, 2), 1: (3, 4)}

    def test_duplicate_id(self, tmp_path):
        path = tmp_path / "g.tsv"
        path.write_text("#domain-sieve-groups v1\n0\t1,2\n0\t3\n")
        with pytest.raises(FileFormatError, match="duplicate document id"):
            load_groups(path)

    def test_non_integer(self, tmp_path):
        path = tmp_path / "g.tsv"
        path.write_text("#domain-sieve-groups v1\n0\t1,x\n")
        with pytest.raises(FileFormatError, match="non-integer"):
            load_groups(path)

    def test_empty(self, tmp_path):
        path = tmp_path / "g.tsv"
        path.write_text("#domain-sieve-groups v1\n")
        with pytest.raises(FileFormatError, match="no documents"):
            load_groups(path)
