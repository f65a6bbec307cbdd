"""Grouping sentences into classification batches and datasets.

A batch is the classification unit: n sentences treated as one pseudo
document. Positive batches partition a shuffle of the whole target sample
(the final partial group is discarded). Negative batches are reservoir
sampled without replacement from the background corpus, so one streaming
pass suffices no matter how large that corpus is. Unlabeled batches for
scoring group the corpus in consecutive file order (the partial tail is
kept), which lets selection map documents back to pair id ranges.

Every operation is a pure function of (inputs, seed).
"""

import random
from dataclasses import dataclass, field

from domain_sieve.corpus_io import side_text
from domain_sieve.errors import DataError, FileFormatError

POSITIVE = "positive"
NEGATIVE = "negative"
UNLABELED = "unlabeled"

CONSECUTIVE = "consecutive"
RANDOM = "random"

DATASET_MAGIC = "#domain-sieve-dataset v1"
GROUPS_MAGIC = "#domain-sieve-groups v1"


@dataclass(frozen=True)
class Batch:
    batch_id: int
    sentence_ids: tuple
    label: str

    @property
    def size(self):
        return len(self.sentence_ids)


@dataclass
class LabeledDataset:
    batches: list
    n: int
    neg_pos_ratio: float
    seed: int
    meta: dict = field(default_factory=dict)

    def by_label(self, label):
        return [b for b in self.batches if b.label == label]


def _usable(sentence):
    return bool(sentence.text.strip())


def make_positive_batches(sentences, n, seed):
    """Shuffle all nonempty sentence ids and partition into groups of n,
    discarding the final partial group."""
    if n < 1:
        raise DataError(f"batch size must be >= 1, got {n}")
    ids = [s.id for s in sentences if _usable(s)]
    if len(ids) < n:
        raise DataError(
            f"target sample has {len(ids)} usable sentences, needs at least n={n}"
        )
    rng = random.Random(seed)
    rng.shuffle(ids)
    total = (len(ids) // n) * n
    return [
        Batch(batch_id=i // n, sentence_ids=tuple(ids[i:i + n]), label=POSITIVE)
        for i in range(0, total, n)
    ]


def make_negative_batches(sentences, n, count, seed):
    """Reservoir-sample n*count nonempty sentences uniformly without
    replacement, shuffle, and partition into count batches of n."""
    if n < 1 or count < 1:
        raise DataError(f"need n >= 1 and count >= 1, got n={n} count={count}")
    k = n * count
    rng = random.Random(seed)
    reservoir = []
    seen = 0
    for sent in sentences:
        if not _usable(sent):
            continue
        if seen < k:
            reservoir.append(sent.id)
        else:
            j = rng.randint(0, seen)
            if j < k:
                reservoir[j] = sent.id
        seen += 1
    if seen < k:
        raise DataError(
            f"background corpus has {seen} usable sentences, "
            f"needs at least n*count={k}"
        )
    rng.shuffle(reservoir)
    return [
        Batch(batch_id=i // n, sentence_ids=tuple(reservoir[i:i + n]), label=NEGATIVE)
        for i in range(0, k, n)
    ]


def assemble_dataset(positives, negatives, ratio=2.0, seed=0, n=None):
    """Keep all positives plus the first floor(ratio*|pos|) negatives and
    shuffle the combined order. Batch ids are reassigned contiguously."""
    if ratio <= 0:
        raise DataError(f"negative:positive ratio must be positive, got {ratio}")
    if not positives:
        raise DataError("no positive batches")
    need = int(ratio * len(positives))
    if len(negatives) < need:
        raise DataError(
            f"need {need} negative batches for ratio {ratio}, have {len(negatives)}"
        )
    combined = list(positives) + list(negatives[:need])
    rng = random.Random(seed)
    rng.shuffle(combined)
    batches = [
        Batch(batch_id=i, sentence_ids=b.sentence_ids, label=b.label)
        for i, b in enumerate(combined)
    ]
    if n is None:
        n = positives[0].size
    return LabeledDataset(batches=batches, n=n, neg_pos_ratio=ratio, seed=seed)


def split_train_test(dataset, train_fraction=0.3, seed=0):
    """Stratified split: floor(train_fraction * count) of each label goes to
    train, the rest to test."""
    if not 0.0 < train_fraction < 1.0:
        raise DataError(f"train fraction must be in (0, 1), got {train_fraction}")
    rng = random.Random(seed)
    train, test = [], []
    for label in (POSITIVE, NEGATIVE):
        group = dataset.by_label(label)
        if not group:
            raise DataError(f"dataset has no {label} batches")
        group = list(group)
        rng.shuffle(group)
        cut = int(train_fraction * len(group))
        train.extend(group[:cut])
        test.extend(group[cut:])
    rng.shuffle(train)
    rng.shuffle(test)

    def _mk(batches):
        return LabeledDataset(batches=batches, n=dataset.n,
                              neg_pos_ratio=dataset.neg_pos_ratio, seed=seed)

    return _mk(train), _mk(test)


def group_unlabeled(pairs, n, side, mode=CONSECUTIVE, seed=0):
    """Group a parallel corpus into scoring documents of n pairs.

    Yields (Batch, texts) where texts are the declared monolingual side of
    the batch's pairs. Consecutive mode streams; the final partial group is
    kept. Random mode (ablation) materializes the whole corpus in memory.
    """
    if n < 1:
        raise DataError(f"batch size must be >= 1, got {n}")
    if mode == CONSECUTIVE:
        ids, texts = [], []
        gid = 0
        for pair in pairs:
            ids.append(pair.id)
            texts.append(side_text(pair, side))
            if len(ids) == n:
                yield Batch(batch_id=gid, sentence_ids=tuple(ids), label=UNLABELED), texts
                ids, texts = [], []
                gid += 1
        if ids:
            yield Batch(batch_id=gid, sentence_ids=tuple(ids), label=UNLABELED), texts
    elif mode == RANDOM:
        everything = [(pair.id, side_text(pair, side)) for pair in pairs]
        rng = random.Random(seed)
        rng.shuffle(everything)
        for gid, start in enumerate(range(0, len(everything), n)):
            chunk = everything[start:start + n]
            yield (
                Batch(batch_id=gid, sentence_ids=tuple(i for i, _ in chunk),
                      label=UNLABELED),
                [t for _, t in chunk],
            )
    else:
        raise DataError(f"unknown grouping mode: {mode!r}")


def save_groups(groups, path, config_hash=""):
    """Sidecar mapping scoring documents back to their pair ids.

    `groups` is an iterable of (batch_id, sentence_ids); selection uses
    this file to pull a ranked document's pairs out of the corpus without
    re-deriving the grouping.
    """
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(GROUPS_MAGIC + "\n")
        if config_hash:
            fh.write(f"#config={config_hash}\n")
        for batch_id, ids in groups:
            fh.write(f"{batch_id}\t{','.join(str(i) for i in ids)}\n")


def load_groups(path):
    groups = {}
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line_no == 1:
                if line != GROUPS_MAGIC:
                    raise FileFormatError(f"{path}:1: bad groups header: {line!r}")
                continue
            if line.startswith("#") or not line:
                continue
            cols = line.split("\t")
            if len(cols) != 2 or not cols[1]:
                raise FileFormatError(
                    f"{path}:{line_no}: expected batch_id<TAB>pair ids"
                )
            try:
                batch_id = int(cols[0])
                ids = tuple(int(v) for v in cols[1].split(","))
            except ValueError:
                raise FileFormatError(f"{path}:{line_no}: non-integer id") from None
            if batch_id in groups:
                raise FileFormatError(
                    f"{path}:{line_no}: duplicate document id {batch_id}"
                )
            groups[batch_id] = ids
    if not groups:
        raise FileFormatError(f"{path}: no documents listed")
    return groups


def save_dataset(dataset, path, target_path="", background_path="", config_hash=""):
    """Dataset manifest: batch_id<TAB>label<TAB>comma-separated sentence ids."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(DATASET_MAGIC + "\n")
        fh.write(f"#n={dataset.n}\n")
        fh.write(f"#ratio={dataset.neg_pos_ratio!r}\n")
        fh.write(f"#seed={dataset.seed}\n")
        fh.write(f"#target={target_path}\n")
        fh.write(f"#background={background_path}\n")
        if config_hash:
            fh.write(f"#config={config_hash}\n")
        for batch in dataset.batches:
            ids = ",".join(str(i) for i in batch.sentence_ids)
            fh.write(f"{batch.batch_id}\t{batch.label}\t{ids}\n")


def load_dataset(path):
    meta = {}
    batches = []
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line_no == 1:
                if line != DATASET_MAGIC:
                    raise FileFormatError(f"{path}:1: bad dataset header: {line!r}")
                continue
            if line.startswith("#"):
                if "=" in line:
                    key, value = line[1:].split("=", 1)
                    meta[key] = value
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise FileFormatError(
                    f"{path}:{line_no}: expected batch_id<TAB>label<TAB>ids"
                )
            if cols[1] not in (POSITIVE, NEGATIVE, UNLABELED):
                raise FileFormatError(f"{path}:{line_no}: bad label {cols[1]!r}")
            try:
                batch_id = int(cols[0])
                ids = tuple(int(v) for v in cols[2].split(",")) if cols[2] else ()
            except ValueError:
                raise FileFormatError(f"{path}:{line_no}: non-integer id") from None
            batches.append(Batch(batch_id=batch_id, sentence_ids=ids, label=cols[1]))
    try:
        dataset = LabeledDataset(
            batches=batches,
            n=int(meta.get("n", 0)),
            neg_pos_ratio=float(meta.get("ratio", 0.0)),
            seed=int(meta.get("seed", 0)),
            meta=meta,
        )
    except ValueError:
        raise FileFormatError(f"{path}: malformed header metadata") from None
    if not batches:
        raise FileFormatError(f"{path}: dataset has no batches")
    return dataset
