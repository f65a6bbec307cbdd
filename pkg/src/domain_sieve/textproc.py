"""Tokenization and vocabulary handling.

The vocabulary keeps the most frequent non-stop-word tokens of a sentence
stream, capped at max_size, with contiguous indices assigned in descending
count order (ties broken lexicographically). That total order makes the
vocabulary a pure function of the corpus and the stop word list, and makes
growing max_size purely additive.
"""

import hashlib
from collections import Counter
from dataclasses import dataclass
from importlib import resources

from domain_sieve import kernels
from domain_sieve.errors import DataError, FileFormatError
from domain_sieve.token_rules import NUM_TOKEN, PUNCT_CHARS  # re-export  # noqa: F401

VOCAB_MAGIC = "#domain-sieve-vocab v1"


def tokenize(text):
    """Tokenize one sentence. See domain_sieve.token_rules for the rules."""
    return kernels.tokenize(text)


def load_stopwords(stopwords_id="en-v1"):
    """Load a versioned stop word list shipped with the package."""
    name = f"stopwords_{stopwords_id.replace('-', '_')}.txt"
    try:
        data = resources.files("domain_sieve").joinpath("data").joinpath(name).read_text("utf-8")
    except FileNotFoundError:
        raise DataError(f"unknown stop word list id: {stopwords_id!r}") from None
    words = frozenset(
        line.strip() for line in data.splitlines()
        if line.strip() and not line.startswith("#")
    )
    if not words:
        raise DataError(f"stop word list {stopwords_id!r} is empty")
    return words


@dataclass(frozen=True)
class VocabEntry:
    index: int
    count: int


@dataclass
class Vocabulary:
    entries: dict  # token -> VocabEntry
    max_size: int
    stopwords_id: str

    def __len__(self):
        return len(self.entries)

    def __contains__(self, token):
        return token in self.entries

    def index_of(self, token):
        entry = self.entries.get(token)
        return -1 if entry is None else entry.index

    def tokens_by_index(self):
        """Tokens as a list positioned by index."""
        out = [None] * len(self.entries)
        for token, entry in self.entries.items():
            out[entry.index] = token
        return out

    def fingerprint(self):
        """sha256 of the canonical serialized content. Stable between the
        in-memory vocabulary and its saved file."""
        return hashlib.sha256(serialize_vocabulary(self)).hexdigest()


def build_vocabulary(sentences, max_size, stopwords, stopwords_id):
    """Count tokens over a stream of sentence texts and keep the top
    max_size non-stop-word tokens.

    `sentences` may yield plain strings or objects with a .text attribute.
    """
    if max_size < 1:
        raise DataError(f"vocabulary max_size must be >= 1, got {max_size}")
    counts = Counter()
    for sent in sentences:
        text = sent if isinstance(sent, str) else sent.text
        counts.update(kernels.tokenize(text))
    for word in stopwords:
        counts.pop(word, None)
    if not counts:
        raise DataError("no tokens survive stop word removal; vocabulary is empty")
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))[:max_size]
    entries = {
        token: VocabEntry(index=i, count=count)
        for i, (token, count) in enumerate(ranked)
    }
    return Vocabulary(entries=entries, max_size=max_size, stopwords_id=stopwords_id)


def serialize_vocabulary(vocab):
    """Canonical byte serialization: header, max_size, then one
    token<TAB>index<TAB>count line per entry in index order."""
    lines = [f"{VOCAB_MAGIC} stopwords={vocab.stopwords_id}",
             f"#max_size={vocab.max_size}"]
    for token in vocab.tokens_by_index():
        entry = vocab.entries[token]
        lines.append(f"{token}\t{entry.index}\t{entry.count}")
    return ("\n".join(lines) + "\n").encode("utf-8")


def save_vocabulary(vocab, path, config_hash=""):
    data = serialize_vocabulary(vocab).decode("utf-8").splitlines(keepends=True)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(data[0])
        fh.write(data[1])
        if config_hash:
            fh.write(f"#config={config_hash}\n")
        fh.writelines(data[2:])


def load_vocabulary(path):
    entries = {}
    max_size = None
    stopwords_id = None
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line_no == 1:
                if not line.startswith(VOCAB_MAGIC + " stopwords="):
                    raise FileFormatError(f"{path}:1: bad vocabulary header: {line!r}")
                stopwords_id = line.split("stopwords=", 1)[1]
                continue
            if line.startswith("#"):
                if line.startswith("#max_size="):
                    max_size = int(line.split("=", 1)[1])
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise FileFormatError(
                    f"{path}:{line_no}: expected token<TAB>index<TAB>count"
                )
            token, idx_s, count_s = cols
            try:
                index, count = int(idx_s), int(count_s)
            except ValueError:
                raise FileFormatError(
                    f"{path}:{line_no}: non-integer index or count"
                ) from None
            if token in entries:
                raise FileFormatError(f"{path}:{line_no}: duplicate token {token!r}")
            if index != len(entries):
                raise FileFormatError(
                    f"{path}:{line_no}: non-contiguous index {index} "
                    f"(expected {len(entries)})"
                )
            if count < 1:
                raise FileFormatError(f"{path}:{line_no}: count must be positive")
            entries[token] = VocabEntry(index=index, count=count)
    if not entries:
        raise FileFormatError(f"{path}: vocabulary has no entries")
    if max_size is None:
        raise FileFormatError(f"{path}: missing #max_size header")
    return Vocabulary(entries=entries, max_size=max_size, stopwords_id=stopwords_id)
