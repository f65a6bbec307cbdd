import pytest

from domain_sieve import fixtures
from domain_sieve.batcher import NEGATIVE, POSITIVE
from domain_sieve.corpus_io import Sentence


def as_sentences(texts):
    return [Sentence(id=i, text=t) for i, t in enumerate(texts)]


@pytest.fixture(scope="session")
def news_texts():
    return fixtures.news_corpus()


@pytest.fixture(scope="session")
def web_texts():
    return fixtures.web_corpus()


@pytest.fixture(scope="session")
def two_domain(news_texts, web_texts):
    """(positives, negatives, texts_by_label) over the bundled corpora."""
    return (as_sentences(news_texts), as_sentences(web_texts),
            {POSITIVE: news_texts, NEGATIVE: web_texts})


@pytest.fixture(scope="session")
def small_two_domain():
    """Cut-down corpora for tests that train but don't measure accuracy."""
    news = fixtures.news_corpus(3000, seed=77)
    web = fixtures.web_corpus(6600, seed=77)
    return (as_sentences(news), as_sentences(web),
            {POSITIVE: news, NEGATIVE: web})
