"""Kernel behavior, plus parity between the compiled and pure implementations.

tokenize and doc_counts must be bit-identical across implementations. The
solver epochs walk the same coordinate order (same seeded permutations) but
may accumulate floating point differently, so they get an allclose check.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from domain_sieve import kernels
from domain_sieve.token_rules import NUM_TOKEN

IMPLS = kernels.available_implementations()


def test_compiled_extension_present():
    # losing the extension would silently turn every parity test into
    # python-vs-python; fail loudly instead
    assert "compiled" in IMPLS


@pytest.mark.parametrize("impl", list(IMPLS.values()), ids=list(IMPLS))
class TestTokenize:
    def test_lowercases_and_splits(self, impl):
        assert impl.tokenize("The Cat SAT") == ["the", "cat", "sat"]

    def test_strips_edge_punctuation(self, impl):
        assert impl.tokenize('"Hello," she said...') == ["hello", "she", "said"]

    def test_keeps_interior_punctuation(self, impl):
        assert impl.tokenize("don't re-enter co-op") == ["don't", "re-enter", "co-op"]

    def test_digit_tokens_become_placeholder(self, impl):
        assert impl.tokenize("in 2019 all 42 targets") == \
            ["in", NUM_TOKEN, "all", NUM_TOKEN, "targets"]

    def test_mixed_alphanumerics_survive(self, impl):
        # interior dot keeps 3.14 from being purely digits
        assert impl.tokenize("x42 3.14 9am") == ["x42", "3.14", "9am"]

    def test_number_with_edge_punctuation(self, impl):
        assert impl.tokenize("(2019)...") == [NUM_TOKEN]

    def test_empty_inputs(self, impl):
        assert impl.tokenize("") == []
        assert impl.tokenize(" \t  \n") == []

    def test_pure_punctuation_dropped(self, impl):
        assert impl.tokenize("... ! «» —") == []

    def test_typographic_quotes_stripped(self, impl):
        assert impl.tokenize("“quoted” ‘once’") == ["quoted", "once"]

    def test_unicode_text(self, impl):
        assert impl.tokenize("Überraschung, naïve café!") == \
            ["überraschung", "naïve", "café"]


@pytest.mark.parametrize("impl", list(IMPLS.values()), ids=list(IMPLS))
class TestTokenTable:
    def test_lookup(self, impl):
        table = impl.TokenTable(["alpha", "beta", "gamma"])
        assert table.size == 3
        assert table.lookup("beta") == 1
        assert table.lookup("delta") == -1

    def test_duplicate_token_rejected(self, impl):
        with pytest.raises(ValueError, match="duplicate"):
            impl.TokenTable(["a", "b", "a"])

    def test_empty_table(self, impl):
        assert impl.TokenTable([]).size == 0


@pytest.mark.parametrize("impl", list(IMPLS.values()), ids=list(IMPLS))
class TestDocCounts:
    def test_counts_and_order(self, impl):
        table = impl.TokenTable(["cat", "dog", "bird"])
        idx, cnt = impl.doc_counts(table, ["The dog saw the dog.", "A cat!"])
        assert idx.tolist() == [0, 1]
        assert cnt.tolist() == [1, 2]

    def test_dtypes(self, impl):
        table = impl.TokenTable(["cat"])
        idx, cnt = impl.doc_counts(table, ["cat cat"])
        assert idx.dtype == np.int32
        assert cnt.dtype == np.int64

    def test_out_of_vocabulary_ignored(self, impl):
        table = impl.TokenTable(["cat"])
        idx, cnt = impl.doc_counts(table, ["dog bird fish"])
        assert idx.size == 0 and cnt.size == 0

    def test_empty_document(self, impl):
        table = impl.TokenTable(["cat"])
        idx, cnt = impl.doc_counts(table, [])
        assert idx.size == 0 and cnt.size == 0

    def test_counts_pool_across_sentences(self, impl):
        table = impl.TokenTable(["a", "b"])
        one = impl.doc_counts(table, ["a b", "b a", "a"])
        assert one[1].tolist() == [3, 2]


needs_both = pytest.mark.skipif(len(IMPLS) < 2,
                                reason="compiled kernels not built")

TEXT = st.text(max_size=120)


@needs_both
@settings(max_examples=300, deadline=None)
@given(TEXT)
def test_tokenize_parity(text):
    outs = [impl.tokenize(text) for impl in IMPLS.values()]
    assert outs[0] == outs[1]


@needs_both
@settings(max_examples=100, deadline=None)
@given(st.lists(TEXT, max_size=8))
def test_doc_counts_parity(texts):
    py = IMPLS["python"]
    vocab_tokens = sorted({t for txt in texts for t in py.tokenize(txt)})[:50]
    results = []
    for impl in IMPLS.values():
        table = impl.TokenTable(vocab_tokens)
        idx, cnt = impl.doc_counts(table, texts)
        results.append((idx.tolist(), cnt.tolist()))
    assert results[0] == results[1]


def _random_csr(rng, n, dim, density=0.5):
    """Random CSR rows with the constant bias feature at index dim."""
    indptr = [0]
    indices = []
    data = []
    for _ in range(n):
        keep = np.flatnonzero(rng.random(dim) < density)
        for j in keep:
            indices.append(j)
            data.append(rng.uniform(0.05, 1.0))
        indices.append(dim)
        data.append(1.0)
        indptr.append(len(indices))
    return (np.asarray(indptr, dtype=np.int32),
            np.asarray(indices, dtype=np.int32),
            np.asarray(data, dtype=np.float64))


class TestSvmEpochs:
    def _run(self, impl, seed=3, tol=1e-8):
        rng = np.random.default_rng(404)
        n, dim = 30, 6
        indptr, indices, data = _random_csr(rng, n, dim)
        y = np.where(rng.random(n) < 0.5, 1.0, -1.0)
        y[0], y[1] = 1.0, -1.0  # both classes whatever the draw
        w = np.zeros(dim + 1)
        alpha = np.zeros(n)
        out = impl.svm_epochs(indptr, indices, data, y, 1.0, tol, 2000,
                              seed, w, alpha)
        return out, w, alpha

    def test_reruns_identical(self):
        out1, w1, a1 = self._run(kernels)
        out2, w2, a2 = self._run(kernels)
        assert out1 == out2
        assert np.array_equal(w1, w2)
        assert np.array_equal(a1, a2)

    def test_converges_and_respects_box(self):
        (epochs, converged, gap), _, alpha = self._run(kernels)
        assert converged
        assert epochs < 2000
        assert gap < 1e-8
        assert alpha.min() >= 0.0
        assert alpha.max() <= 1.0

    def test_epoch_cap(self):
        rng = np.random.default_rng(7)
        indptr, indices, data = _random_csr(rng, 20, 4)
        y = np.where(rng.random(20) < 0.5, 1.0, -1.0)
        y[:2] = (1.0, -1.0)
        w = np.zeros(5)
        alpha = np.zeros(20)
        epochs, converged, _ = kernels.svm_epochs(
            indptr, indices, data, y, 1.0, 1e-300, 3, 0, w, alpha)
        assert epochs == 3
        assert not converged

    @needs_both
    def test_cross_implementation_agreement(self):
        runs = {}
        for name, impl in IMPLS.items():
            runs[name] = self._run(impl)
        (out_a, w_a, alpha_a) = runs["python"]
        (out_b, w_b, alpha_b) = runs["compiled"]
        assert out_a[0] == out_b[0]  # same epoch count
        assert out_a[1] == out_b[1]
        np.testing.assert_allclose(w_a, w_b, rtol=1e-12, atol=1e-14)
        np.testing.assert_allclose(alpha_a, alpha_b, rtol=1e-12, atol=1e-14)
