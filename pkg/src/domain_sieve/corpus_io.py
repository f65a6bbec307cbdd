"""Corpus readers and the selection writer.

All text enters the pipeline through this module: lines are decoded as
UTF-8 (a bad byte is a fatal error carrying its absolute byte offset),
normalized to NFC, and stripped of line endings. Sentence ids are the
0-based position in the file, which keeps every downstream artifact
meaningful without materializing the corpus.

Readers are generators; memory stays bounded by the in-flight sentence.
"""

import hashlib
import unicodedata
from dataclasses import dataclass

from domain_sieve.errors import CorpusFormatError

PLAIN = "plain"
TSV = "tsv"
PAIRED = "paired"

SOURCE = "source"
TARGET = "target"


@dataclass(frozen=True)
class Sentence:
    id: int
    text: str


@dataclass(frozen=True)
class SentencePair:
    id: int
    source_text: str
    target_text: str


@dataclass(frozen=True)
class CorpusHandle:
    """Where a corpus lives and how to read it.

    format "plain": one sentence per line at `path`.
    format "tsv":   source<TAB>target per line at `path`.
    format "paired": two aligned files, `source_path` and `target_path`.
    `side` declares which half is in the classifier's language.
    """

    format: str
    path: str | None = None
    source_path: str | None = None
    target_path: str | None = None
    side: str = SOURCE

    @classmethod
    def plain(cls, path):
        return cls(format=PLAIN, path=str(path))

    @classmethod
    def tsv(cls, path, side=SOURCE):
        return cls(format=TSV, path=str(path), side=side)

    @classmethod
    def paired(cls, source_path, target_path, side=SOURCE):
        return cls(format=PAIRED, source_path=str(source_path),
                   target_path=str(target_path), side=side)

    def paths(self):
        if self.format == PAIRED:
            return [self.source_path, self.target_path]
        return [self.path]


def _clean(text):
    if text.endswith("\n"):
        text = text[:-1]
    if text.endswith("\r"):
        text = text[:-1]
    if not text.isascii():
        text = unicodedata.normalize("NFC", text)
    return text


def iter_lines(path):
    """Yield (line_number, text) with 1-based line numbers. Decoding errors
    report the absolute byte offset of the offending byte."""
    offset = 0
    with open(path, "rb") as fh:
        for line_no, raw in enumerate(fh, start=1):
            try:
                text = raw.decode("utf-8")
            except UnicodeDecodeError as exc:
                raise CorpusFormatError(
                    f"{path}: invalid UTF-8 at byte offset {offset + exc.start} "
                    f"(line {line_no})"
                ) from exc
            yield line_no, _clean(text)
            offset += len(raw)


def open_monolingual(handle):
    """Stream Sentence records from a plain one-sentence-per-line corpus."""
    if handle.format != PLAIN:
        raise CorpusFormatError(
            f"open_monolingual expects a plain corpus, got format {handle.format!r}"
        )
    for line_no, text in iter_lines(handle.path):
        yield Sentence(id=line_no - 1, text=text)


def open_parallel(handle):
    """Stream SentencePair records from a tsv or paired-files corpus."""
    if handle.format == TSV:
        for line_no, text in iter_lines(handle.path):
            cols = text.split("\t")
            if len(cols) != 2:
                raise CorpusFormatError(
                    f"{handle.path}:{line_no}: expected exactly one tab, "
                    f"found {len(cols) - 1}"
                )
            yield SentencePair(id=line_no - 1, source_text=cols[0], target_text=cols[1])
    elif handle.format == PAIRED:
        src_iter = iter_lines(handle.source_path)
        tgt_iter = iter_lines(handle.target_path)
        sentinel = object()
        pair_id = 0
        while True:
            src = next(src_iter, sentinel)
            tgt = next(tgt_iter, sentinel)
            if src is sentinel and tgt is sentinel:
                return
            if src is sentinel or tgt is sentinel:
                shorter = handle.source_path if src is sentinel else handle.target_path
                raise CorpusFormatError(
                    f"paired corpus length mismatch: {shorter} ends at line {pair_id}"
                )
            # tabs inside paired-file text would corrupt any tsv export
            yield SentencePair(
                id=pair_id,
                source_text=src[1].replace("\t", " "),
                target_text=tgt[1].replace("\t", " "),
            )
            pair_id += 1
    else:
        raise CorpusFormatError(
            f"open_parallel expects a tsv or paired corpus, got format {handle.format!r}"
        )


def side_text(pair, side):
    return pair.source_text if side == SOURCE else pair.target_text


def monolingual_stream(handle):
    """Stream Sentence records from any corpus: plain files directly, parallel
    corpora through their declared language side."""
    if handle.format == PLAIN:
        yield from open_monolingual(handle)
    else:
        for pair in open_parallel(handle):
            yield Sentence(id=pair.id, text=side_text(pair, handle.side))


def collect_texts(sentences, ids):
    """One streaming pass collecting {id: text} for the requested ids."""
    wanted = set(ids)
    found = {}
    for sent in sentences:
        if sent.id in wanted:
            found[sent.id] = sent.text
            if len(found) == len(wanted):
                break
    missing = wanted - found.keys()
    if missing:
        raise CorpusFormatError(
            f"{len(missing)} sentence ids not present in corpus "
            f"(first missing: {min(missing)})"
        )
    return found


def collect_pairs(pairs, ids):
    """Same as collect_texts but keeps whole pairs: {id: SentencePair}."""
    wanted = set(ids)
    found = {}
    for pair in pairs:
        if pair.id in wanted:
            found[pair.id] = pair
            if len(found) == len(wanted):
                break
    missing = wanted - found.keys()
    if missing:
        raise CorpusFormatError(
            f"{len(missing)} pair ids not present in corpus "
            f"(first missing: {min(missing)})"
        )
    return found


@dataclass(frozen=True)
class SelectedDoc:
    """One document of the ranked selection, in output order."""
    doc_id: int
    score: float
    num_pairs: int


@dataclass(frozen=True)
class SelectionSummary:
    pairs_written: int
    documents_written: int


def write_selection(pairs, docs, out_path, manifest_path, config_hash=""):
    """Write the selected pairs as source<TAB>target lines plus a manifest.

    `pairs` must stream the pairs of each entry of `docs` in order (the
    caller produces them in ranked order). The pairs file itself carries no
    comment lines so that open_parallel round-trips it; provenance lives in
    the manifest: doc_id, score, first_line (0-based into the pairs file)
    and num_pairs per document.
    """
    pair_iter = iter(pairs)
    line = 0
    with open(out_path, "w", encoding="utf-8") as out, \
            open(manifest_path, "w", encoding="utf-8") as man:
        man.write("#domain-sieve-selection v1\n")
        if config_hash:
            man.write(f"#config={config_hash}\n")
        man.write("doc_id\tscore\tfirst_line\tnum_pairs\n")
        for doc in docs:
            man.write(f"{doc.doc_id}\t{doc.score:.6f}\t{line}\t{doc.num_pairs}\n")
            for _ in range(doc.num_pairs):
                try:
                    pair = next(pair_iter)
                except StopIteration:
                    raise CorpusFormatError(
                        f"selection stream exhausted inside document {doc.doc_id}"
                    ) from None
                for text in (pair.source_text, pair.target_text):
                    if "\t" in text or "\n" in text or "\r" in text:
                        raise CorpusFormatError(
                            f"pair {pair.id} contains tab or line-break characters"
                        )
                out.write(f"{pair.source_text}\t{pair.target_text}\n")
                line += 1
    return SelectionSummary(pairs_written=line, documents_written=len(docs))


def sha256_file(path):
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()
