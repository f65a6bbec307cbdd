"""Bundled desk-scale corpora: seeded generators, no shipped text dumps.

Real two-domain corpora are far too large to vendor, so the test and demo
inputs are produced by procedural generators with fixed word pools. Two
ready-made domains are provided: a newswire-flavored one (the stand-in
target domain) and a web-boilerplate-flavored one (the background). Both
draw most tokens from one shared content pool, so single sentences are
often ambiguous on purpose; domain identity only becomes reliable when
many sentences are pooled. A parameterized two-domain generator with a
configurable vocabulary overlap is also provided for property tests.

All output is a pure function of the arguments: the word pools are built
once from module-fixed seeds, and sentence sampling uses only the caller's
seed. Rebuilding a corpus with the same arguments yields identical text.

Run `python3 -m domain_sieve.fixtures --out DIR` to materialize a demo
target sample and a mixed parallel corpus for the command line tools.
"""

import argparse
import os
import sys

import numpy as np

from domain_sieve.corpus_io import SentencePair
from domain_sieve.textproc import load_stopwords

NEWS_SIZE = 50_000
WEB_SIZE = 110_000

# Fraction of tokens drawn from the domain pool rather than the shared
# pool. Tuned so that a lone sentence frequently carries no domain word at
# all while a 100-sentence document always carries plenty.
DOMAIN_TOKEN_RATE = 0.10

_POOL_SEED = 0xD05E
_SYLLABLES = [c + v for c in "bcdfghjklmnprstvz" for v in "aeiou"]

_NEWS_SEED_WORDS = [
    "minister", "parliament", "election", "government", "economy",
    "inflation", "treaty", "budget", "court", "ruling", "opposition",
    "coalition", "referendum", "sanctions", "summit", "ambassador",
    "legislation", "senate", "deficit", "unemployment", "ceasefire",
    "spokesman", "quarterly", "exports", "tariff", "championship",
    "midfielder", "tournament", "investigation", "prosecutor", "verdict",
    "campaign", "ballot", "diplomatic", "municipal", "pension",
]

_WEB_SEED_WORDS = [
    "cookie", "login", "checkout", "cart", "shipping", "username",
    "password", "newsletter", "subscribe", "unsubscribe", "browser",
    "javascript", "forum", "thread", "moderator", "homepage", "faq",
    "wishlist", "voucher", "signup", "profile", "avatar", "download",
    "upload", "admin", "plugin", "widget", "sitemap", "captcha",
    "webmaster", "hyperlink", "bookmark", "popup", "slideshow",
    "testimonial", "pricing",
]

_SHARED_SEED_WORDS = [
    "report", "people", "company", "service", "group", "market", "city",
    "program", "project", "public", "week", "month", "member", "national",
    "local", "official", "support", "change", "issue", "result", "level",
    "area", "team", "case", "question", "problem", "development", "home",
    "business", "world", "work", "part", "number", "today", "country",
]


def _word_stream(rng, taken, stopwords):
    while True:
        n = int(rng.integers(2, 5))
        word = "".join(_SYLLABLES[i] for i in rng.integers(0, len(_SYLLABLES), n))
        if word in taken or word in stopwords:
            continue
        taken.add(word)
        yield word


def _build_pools():
    rng = np.random.default_rng(_POOL_SEED)
    stopwords = load_stopwords("en-v1")
    taken = set(_NEWS_SEED_WORDS) | set(_WEB_SEED_WORDS) | set(_SHARED_SEED_WORDS)
    stream = _word_stream(rng, taken, stopwords)
    shared = _SHARED_SEED_WORDS + [next(stream) for _ in range(2400)]
    news = _NEWS_SEED_WORDS + [next(stream) for _ in range(700)]
    web = _WEB_SEED_WORDS + [next(stream) for _ in range(700)]
    return shared, news, web


_POOLS = None


def _pools():
    global _POOLS
    if _POOLS is None:
        _POOLS = _build_pools()
    return _POOLS


def _zipf_cdf(size, alpha):
    weights = np.arange(1, size + 1, dtype=np.float64) ** -alpha
    cdf = np.cumsum(weights)
    return cdf / cdf[-1]


def _compose(rng, count, shared, shared_cdf, domain, domain_cdf, domain_rate):
    """Assemble `count` sentences, most tokens shared, a few domain-bound."""
    lengths = rng.integers(6, 17, size=count)
    total = int(lengths.sum())
    from_domain = rng.random(total) < domain_rate
    shared_pick = np.searchsorted(shared_cdf, rng.random(total), side="right")
    domain_pick = np.searchsorted(domain_cdf, rng.random(total), side="right")
    as_number = rng.random(total) < 0.03
    numbers = rng.integers(1, 2030, size=total)
    commas = rng.random(count) < 0.3
    questions = rng.random(count) < 0.01

    sentences = []
    pos = 0
    for s in range(count):
        n = int(lengths[s])
        words = []
        for j in range(pos, pos + n):
            if as_number[j]:
                words.append(str(numbers[j]))
            elif from_domain[j]:
                words.append(domain[domain_pick[j]])
            else:
                words.append(shared[shared_pick[j]])
        pos += n
        words[0] = words[0].capitalize()
        if commas[s] and n > 3:
            words[n // 2] = words[n // 2] + ","
        sentences.append(" ".join(words) + ("?" if questions[s] else "."))
    return sentences


def news_corpus(count=NEWS_SIZE, seed=0, domain_rate=DOMAIN_TOKEN_RATE):
    """Newswire-flavored sentences; the stand-in target domain."""
    shared, news, _ = _pools()
    rng = np.random.default_rng((seed, 1))
    return _compose(rng, count, shared, _zipf_cdf(len(shared), 1.05),
                    news, _zipf_cdf(len(news), 0.9), domain_rate)


def web_corpus(count=WEB_SIZE, seed=0, domain_rate=DOMAIN_TOKEN_RATE):
    """Web-boilerplate-flavored sentences; the background domain."""
    shared, _, web = _pools()
    rng = np.random.default_rng((seed, 2))
    return _compose(rng, count, shared, _zipf_cdf(len(shared), 1.05),
                    web, _zipf_cdf(len(web), 0.9), domain_rate)


class SyntheticDomain:
    """Unigram sentence source over a slice of a generated word list."""

    def __init__(self, words, cdf, tag):
        self.words = words
        self._cdf = cdf
        self._tag = tag

    def sentences(self, count, seed=0):
        rng = np.random.default_rng((seed, self._tag))
        lengths = rng.integers(5, 13, size=count)
        total = int(lengths.sum())
        picks = np.searchsorted(self._cdf, rng.random(total), side="right")
        out = []
        pos = 0
        for s in range(count):
            n = int(lengths[s])
            out.append(" ".join(self.words[picks[j]] for j in range(pos, pos + n)))
            pos += n
        return out


def synthetic_domains(vocab_size=800, overlap=0.5, alpha=1.0, seed=0):
    """Two unigram domains whose vocabularies share `overlap` of their types.

    overlap=0 gives disjoint vocabularies (trivially separable), overlap=1
    the same vocabulary in reversed frequency order. Useful for probing how
    separability degrades as the lexical overlap grows.
    """
    if not 0.0 <= overlap <= 1.0:
        raise ValueError(f"overlap must be in [0, 1], got {overlap}")
    rng = np.random.default_rng((_POOL_SEED, seed, 3))
    stopwords = load_stopwords("en-v1")
    shared_count = round(overlap * vocab_size)
    total = 2 * vocab_size - shared_count
    taken = set()
    stream = _word_stream(rng, taken, stopwords)
    words = [next(stream) for _ in range(total)]
    a_words = words[:vocab_size]
    b_words = words[vocab_size - shared_count:]
    b_words = b_words[::-1]  # shared types sit at opposite frequency ranks
    cdf = _zipf_cdf(vocab_size, alpha)
    return SyntheticDomain(a_words, cdf, 4), SyntheticDomain(b_words, cdf, 5)


def pseudo_translate(text):
    """Deterministic stand-in for the other language side of a pair.

    Reverses word order and rotates vowels, keeping digits intact. Not a
    language, but distinct enough that source and target sides can never
    be confused in a file.
    """
    rot = str.maketrans("aeiouAEIOU", "eiouaEIOUA")
    return " ".join(reversed(text.translate(rot).split()))


def planted_parallel_corpus(num_docs=2000, doc_size=100,
                            planted_fraction=0.25, seed=0):
    """Mixed parallel corpus with a known in-domain subset.

    Returns (pairs, planted_ids): the pairs in corpus order and the set of
    document ids (under consecutive grouping into `doc_size`-pair blocks)
    whose source text comes from the news generator. Everything else is
    web-boilerplate. Used to check that ranking actually digs the planted
    documents out.
    """
    num_planted = round(planted_fraction * num_docs)
    rng = np.random.default_rng((seed, 6))
    flags = np.zeros(num_docs, dtype=bool)
    flags[:num_planted] = True
    rng.shuffle(flags)
    news_pool = iter(news_corpus(num_planted * doc_size, seed=seed * 1000 + 7))
    web_pool = iter(web_corpus((num_docs - num_planted) * doc_size,
                               seed=seed * 1000 + 8))
    pairs = []
    for doc in range(num_docs):
        pool = news_pool if flags[doc] else web_pool
        for _ in range(doc_size):
            text = next(pool)
            pairs.append(SentencePair(id=len(pairs), source_text=text,
                                      target_text=pseudo_translate(text)))
    return pairs, {i for i in range(num_docs) if flags[i]}


def write_demo_files(out_dir, target_count=20_000, num_docs=2000,
                     doc_size=100, background_count=60_000, seed=0):
    """Materialize demo inputs.

    target.txt: monolingual target-domain sample. corpus.tsv: the mixed
    parallel corpus to select from, with planted_ids.txt naming its
    in-domain documents. background.txt: a clean out-of-domain sample for
    the accuracy experiments (using corpus.tsv as the background works too,
    but its planted 25% then contaminates the negative labels).
    """
    os.makedirs(out_dir, exist_ok=True)
    target_path = os.path.join(out_dir, "target.txt")
    corpus_path = os.path.join(out_dir, "corpus.tsv")
    background_path = os.path.join(out_dir, "background.txt")
    truth_path = os.path.join(out_dir, "planted_ids.txt")
    with open(target_path, "w", encoding="utf-8") as fh:
        for line in news_corpus(target_count, seed=seed * 1000 + 9):
            fh.write(line + "\n")
    with open(background_path, "w", encoding="utf-8") as fh:
        for line in web_corpus(background_count, seed=seed * 1000 + 10):
            fh.write(line + "\n")
    pairs, planted = planted_parallel_corpus(num_docs, doc_size,
                                             seed=seed)
    with open(corpus_path, "w", encoding="utf-8") as fh:
        for pair in pairs:
            fh.write(f"{pair.source_text}\t{pair.target_text}\n")
    with open(truth_path, "w", encoding="utf-8") as fh:
        fh.write("# ids of documents planted from the target domain\n")
        for doc_id in sorted(planted):
            fh.write(f"{doc_id}\n")
    return [target_path, corpus_path, background_path, truth_path]


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="python3 -m domain_sieve.fixtures",
        description="Write demo corpora for the pipeline tools.",
    )
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--target-count", type=int, default=20_000)
    parser.add_argument("--num-docs", type=int, default=2000)
    parser.add_argument("--doc-size", type=int, default=100)
    parser.add_argument("--background-count", type=int, default=60_000)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args(argv)
    files = write_demo_files(args.out, args.target_count, args.num_docs,
                             args.doc_size, args.background_count, args.seed)
    for path in files:
        print(path, file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
