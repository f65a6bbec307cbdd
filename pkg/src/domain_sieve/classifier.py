"""Linear SVM trained by dual coordinate descent, plus Platt calibration.

The primal problem is L2-regularized L1-hinge classification with the bias
handled as an augmented constant feature of value 1 (so the bias is
regularized the same way as the weights):

    min_w  0.5 * ||w||^2  +  C * sum_i max(0, 1 - y_i <w, x_i>)

The dual is a box-constrained QP solved coordinate-wise: each dual variable
stays in [0, C], examples are visited in a fresh seeded permutation per
epoch, and convergence is declared when the spread of projected gradients
over an epoch falls below tol. Which condition stopped training (tol or the
epoch cap) is recorded on the model.

Calibrated probabilities use Platt scaling, P(y=1|s) = 1/(1+exp(A*s+B)),
fitted by Newton iterations with backtracking on the smoothed-target
negative log-likelihood.
"""

import math
import random
from dataclasses import dataclass, field

import numpy as np

from domain_sieve import kernels
from domain_sieve.errors import DataError, FileFormatError, FingerprintError
from domain_sieve.vectorizer import DOC_MAX, TF_MODES

MODEL_MAGIC = "#domain-sieve-model v1"

STOP_TOL = "tol"
STOP_MAX_ITER = "max_iter"


@dataclass(frozen=True)
class SvmParams:
    c: float = 1.0
    tol: float = 1e-4
    max_iter: int = 1000
    seed: int = 13


@dataclass(frozen=True)
class PlattParams:
    a: float
    b: float
    converged: bool = True


@dataclass
class LinearModel:
    weights: np.ndarray
    bias: float
    vocab_fingerprint: str
    params: SvmParams
    platt: PlattParams | None = None
    tf_mode: str = DOC_MAX
    corpus_max: int | None = None
    stop_reason: str = STOP_TOL
    epochs: int = 0
    dual: np.ndarray | None = field(default=None, repr=False)

    @property
    def dim(self):
        return len(self.weights)


def _as_csr(vectors, dim):
    """CSR arrays with the constant bias feature appended at index dim."""
    n = len(vectors)
    nnz = sum(v.nnz for v in vectors) + n
    if nnz >= 2**31:
        raise DataError("training matrix too large for 32-bit indexing")
    indptr = np.zeros(n + 1, dtype=np.int32)
    indices = np.empty(nnz, dtype=np.int32)
    data = np.empty(nnz, dtype=np.float64)
    pos = 0
    for i, vec in enumerate(vectors):
        k = vec.nnz
        if k:
            if int(vec.indices[-1]) >= dim:
                raise DataError(
                    f"vector index {int(vec.indices[-1])} outside dimension {dim}"
                )
            indices[pos:pos + k] = vec.indices
            data[pos:pos + k] = vec.weights
        indices[pos + k] = dim
        data[pos + k] = 1.0
        pos += k + 1
        indptr[i + 1] = pos
    if not np.isfinite(data).all():
        raise DataError("training vectors contain NaN or infinite weights")
    return indptr, indices, data


def train_svm(vectors, labels, params, dim, vocab_fingerprint="",
              tf_mode=DOC_MAX, corpus_max=None):
    """Train on SparseVectors with labels in {+1, -1}."""
    if len(vectors) != len(labels):
        raise DataError(f"{len(vectors)} vectors but {len(labels)} labels")
    if not vectors:
        raise DataError("empty training set")
    y = np.asarray(labels, dtype=np.float64)
    if not np.all(np.isin(y, (-1.0, 1.0))):
        raise DataError("labels must be +1 or -1")
    if (y > 0).all() or (y < 0).all():
        raise DataError("training set contains a single class; need both labels")
    if params.c <= 0 or params.tol <= 0 or params.max_iter < 1:
        raise DataError(f"bad solver hyperparameters: {params}")
    if tf_mode not in TF_MODES:
        raise DataError(f"unknown tf mode: {tf_mode!r}")

    indptr, indices, data = _as_csr(vectors, dim)
    w = np.zeros(dim + 1, dtype=np.float64)
    alpha = np.zeros(len(vectors), dtype=np.float64)
    epochs, converged, _gap = kernels.svm_epochs(
        indptr, indices, data, y, params.c, params.tol, params.max_iter,
        params.seed, w, alpha,
    )
    return LinearModel(
        weights=w[:dim].copy(),
        bias=float(w[dim]),
        vocab_fingerprint=vocab_fingerprint,
        params=params,
        tf_mode=tf_mode,
        corpus_max=corpus_max,
        stop_reason=STOP_TOL if converged else STOP_MAX_ITER,
        epochs=epochs,
        dual=alpha,
    )


def decision_score(model, vec):
    return float(model.weights[vec.indices] @ vec.weights) + model.bias


def classify(model, vec, threshold=0.0):
    """Positive iff the decision score exceeds threshold; ties go negative."""
    return "positive" if decision_score(model, vec) > threshold else "negative"


def batch_majority_classify(model, sentence_vectors):
    """Majority vote of per-sentence decisions; ties go negative."""
    if not sentence_vectors:
        raise DataError("majority vote over an empty sentence list")
    votes = sum(1 if decision_score(model, v) > 0.0 else -1
                for v in sentence_vectors)
    return "positive" if votes > 0 else "negative"


def primal_objective(model, vectors, labels, c=None):
    """Objective of the augmented formulation (bias regularized)."""
    if c is None:
        c = model.params.c
    reg = 0.5 * (float(model.weights @ model.weights) + model.bias ** 2)
    hinge = sum(
        max(0.0, 1.0 - label * decision_score(model, vec))
        for vec, label in zip(vectors, labels)
    )
    return reg + c * hinge


# --- Platt scaling ---


def _platt_objective(a, b, scores, targets):
    z = a * scores + b
    pos = z >= 0
    out = np.empty_like(z)
    out[pos] = targets[pos] * z[pos] + np.log1p(np.exp(-z[pos]))
    out[~pos] = (targets[~pos] - 1.0) * z[~pos] + np.log1p(np.exp(z[~pos]))
    return float(out.sum())


def fit_platt(scores, labels, max_newton_iter=100):
    """Fit (A, B) of P(y=1|s) = 1/(1+exp(A*s+B)) on held-out scores.

    Targets are smoothed the standard way: (N+ + 1)/(N+ + 2) for positives,
    1/(N- + 2) for negatives, which keeps the fit finite even on perfectly
    separated scores. If Newton hits the iteration cap the best iterate is
    returned with converged=False.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(labels)
    if s.size != y.size:
        raise DataError(f"{s.size} scores but {y.size} labels")
    n_pos = int((y > 0).sum())
    n_neg = int((y <= 0).sum())
    if n_pos == 0 or n_neg == 0:
        raise DataError("calibration needs scores from both classes")
    if np.all(s == s[0]):
        raise DataError(
            "degenerate calibration set: all scores identical; "
            "use a larger held-out slice"
        )
    hi = (n_pos + 1.0) / (n_pos + 2.0)
    lo = 1.0 / (n_neg + 2.0)
    t = np.where(y > 0, hi, lo)

    a = 0.0
    b = math.log((n_neg + 1.0) / (n_pos + 1.0))
    f = _platt_objective(a, b, s, t)
    best = (f, a, b)
    converged = False
    for _ in range(max_newton_iter):
        z = a * s + b
        p = np.where(z >= 0, np.exp(-z) / (1.0 + np.exp(-z)), 1.0 / (1.0 + np.exp(z)))
        d = t - p
        g1 = float(s @ d)
        g2 = float(d.sum())
        if max(abs(g1), abs(g2)) < 1e-8:
            converged = True
            break
        pq = p * (1.0 - p)
        h11 = float((s * s) @ pq) + 1e-12
        h12 = float(s @ pq)
        h22 = float(pq.sum()) + 1e-12
        det = h11 * h22 - h12 * h12
        if det <= 0.0:
            break
        da = -(h22 * g1 - h12 * g2) / det
        db = -(h11 * g2 - h12 * g1) / det
        slope = g1 * da + g2 * db  # negative along a descent direction
        step = 1.0
        accepted = False
        while step >= 1e-10:
            na = a + step * da
            nb = b + step * db
            nf = _platt_objective(na, nb, s, t)
            if nf <= f + 1e-4 * step * slope:
                accepted = True
                break
            step *= 0.5
        if not accepted:
            break
        a, b, f = na, nb, nf
        if f < best[0]:
            best = (f, a, b)
    if not converged:
        _, a, b = best
    return PlattParams(a=a, b=b, converged=converged)


def sigmoid_ab(platt, score):
    """P(y=1|score) under fitted Platt parameters; stable at large |z|."""
    z = platt.a * score + platt.b
    if z >= 0:
        e = math.exp(-z)
        return e / (1.0 + e)
    return 1.0 / (1.0 + math.exp(z))


def predict_proba(model, platt, vec):
    return sigmoid_ab(platt, decision_score(model, vec))


def train_calibrated(vectors, labels, params, dim, vocab_fingerprint="",
                     tf_mode=DOC_MAX, corpus_max=None, calib_fraction=0.2):
    """Training protocol with probability calibration.

    A stratified calibration slice (calib_fraction of the training set) is
    held out; the SVM is trained on the remainder and Platt parameters are
    fitted on the held-out decision scores. The returned model is that SVM
    with the calibration attached. calib_fraction=0 skips calibration.
    """
    if not 0.0 <= calib_fraction < 1.0:
        raise DataError(f"calibration fraction must be in [0, 1), got {calib_fraction}")
    if calib_fraction == 0.0:
        return train_svm(vectors, labels, params, dim, vocab_fingerprint,
                         tf_mode, corpus_max)
    rng = random.Random(params.seed)
    pos_idx = [i for i, lab in enumerate(labels) if lab > 0]
    neg_idx = [i for i, lab in enumerate(labels) if lab <= 0]
    rng.shuffle(pos_idx)
    rng.shuffle(neg_idx)
    calib, fit = [], []
    for group in (pos_idx, neg_idx):
        cut = int(calib_fraction * len(group))
        calib.extend(group[:cut])
        fit.extend(group[cut:])
    if not calib or not any(labels[i] > 0 for i in calib) \
            or not any(labels[i] <= 0 for i in calib):
        raise DataError(
            "calibration slice is missing a class; add data or disable "
            "calibration with calib_fraction=0"
        )
    fit.sort()
    calib.sort()
    model = train_svm([vectors[i] for i in fit], [labels[i] for i in fit],
                      params, dim, vocab_fingerprint, tf_mode, corpus_max)
    held_scores = [decision_score(model, vectors[i]) for i in calib]
    held_labels = [labels[i] for i in calib]
    model.platt = fit_platt(held_scores, held_labels)
    return model


def check_fingerprint(model, vocab):
    actual = vocab.fingerprint()
    if model.vocab_fingerprint and model.vocab_fingerprint != actual:
        raise FingerprintError(
            "model/vocabulary mismatch: model was trained against "
            f"{model.vocab_fingerprint[:12]}..., got {actual[:12]}..."
        )


# --- model file ---


def save_model(model, path, config_hash=""):
    """Weights are written as hex floats: exact round-trip, byte-stable."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(MODEL_MAGIC + "\n")
        fh.write(f"dim={model.dim}\n")
        fh.write(f"c={model.params.c!r}\n")
        fh.write(f"tol={model.params.tol!r}\n")
        fh.write(f"max_iter={model.params.max_iter}\n")
        fh.write(f"seed={model.params.seed}\n")
        fh.write(f"epochs={model.epochs}\n")
        fh.write(f"stopped={model.stop_reason}\n")
        fh.write(f"tf_mode={model.tf_mode}\n")
        if model.corpus_max is not None:
            fh.write(f"corpus_max={model.corpus_max}\n")
        fh.write(f"vocab_fingerprint={model.vocab_fingerprint}\n")
        if config_hash:
            fh.write(f"config={config_hash}\n")
        nz = np.nonzero(model.weights)[0]
        for idx in nz:
            fh.write(f"{idx}\t{float(model.weights[idx]).hex()}\n")
        fh.write(f"bias\t{float(model.bias).hex()}\n")
        if model.platt is not None:
            fh.write(f"platt\t{model.platt.a.hex()}\t{model.platt.b.hex()}\n")


def load_model(path):
    keys = {}
    weights = None
    bias = None
    platt = None
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.rstrip("\n")
            if line_no == 1:
                if line != MODEL_MAGIC:
                    raise FileFormatError(f"{path}:1: bad model header: {line!r}")
                continue
            if not line:
                continue
            if "=" in line and "\t" not in line:
                key, value = line.split("=", 1)
                keys[key] = value
                continue
            cols = line.split("\t")
            try:
                if cols[0] == "bias" and len(cols) == 2:
                    bias = float.fromhex(cols[1])
                elif cols[0] == "platt" and len(cols) == 3:
                    platt = PlattParams(a=float.fromhex(cols[1]),
                                        b=float.fromhex(cols[2]))
                elif len(cols) == 2:
                    if weights is None:
                        if "dim" not in keys:
                            raise FileFormatError(
                                f"{path}:{line_no}: weight line before dim="
                            )
                        weights = np.zeros(int(keys["dim"]), dtype=np.float64)
                    weights[int(cols[0])] = float.fromhex(cols[1])
                else:
                    raise FileFormatError(f"{path}:{line_no}: unparseable line")
            except (ValueError, IndexError):
                raise FileFormatError(
                    f"{path}:{line_no}: malformed model line: {line!r}"
                ) from None
    required = ("dim", "c", "tol", "max_iter", "seed", "vocab_fingerprint")
    missing = [k for k in required if k not in keys]
    if missing:
        raise FileFormatError(f"{path}: missing model keys: {', '.join(missing)}")
    if bias is None:
        raise FileFormatError(f"{path}: missing bias line")
    if weights is None:
        weights = np.zeros(int(keys["dim"]), dtype=np.float64)
    try:
        params = SvmParams(c=float(keys["c"]), tol=float(keys["tol"]),
                           max_iter=int(keys["max_iter"]), seed=int(keys["seed"]))
        corpus_max = int(keys["corpus_max"]) if "corpus_max" in keys else None
        epochs = int(keys.get("epochs", 0))
    except ValueError:
        raise FileFormatError(f"{path}: malformed numeric model key") from None
    return LinearModel(
        weights=weights,
        bias=bias,
        vocab_fingerprint=keys["vocab_fingerprint"],
        params=params,
        platt=platt,
        tf_mode=keys.get("tf_mode", DOC_MAX),
        corpus_max=corpus_max,
        stop_reason=keys.get("stopped", STOP_TOL),
        epochs=epochs,
    )
