"""Pipeline configuration: one flat key=value file drives every stage.

Missing keys fall back to defaults chosen to reproduce the reference
experimental setup (documents of 100 sentences, 2:1 negative:positive
ratio, 30% train split, 70k vocabulary, four report buckets). Unknown keys
are fatal rather than ignored: a typo must not silently change a run.

The resolved configuration is hashed and that hash is stamped into every
artifact, so files produced under different settings can always be told
apart.
"""

import dataclasses
import hashlib
from dataclasses import dataclass

from domain_sieve.batcher import CONSECUTIVE, RANDOM
from domain_sieve.corpus_io import SOURCE, TARGET
from domain_sieve.errors import ConfigError
from domain_sieve.vectorizer import TF_MODES


@dataclass(frozen=True)
class PipelineConfig:
    target_path: str = ""
    corpus_path: str = ""
    out_dir: str = "out"
    side: str = SOURCE
    n: int = 100
    neg_pos_ratio: float = 2.0
    train_fraction: float = 0.3
    vocab_size: int = 70_000
    stopwords: str = "en-v1"
    tf_mode: str = "doc-max"
    svm_c: float = 1.0
    svm_tol: float = 1e-4
    svm_max_iter: int = 1000
    calib_fraction: float = 0.2
    k_pairs: int = 6_000_000
    num_buckets: int = 4
    group_mode: str = CONSECUTIVE
    seed: int = 13
    workers: int = 1


_HELP = {
    "target_path": "monolingual target-domain sample, one sentence per line",
    "corpus_path": "background corpus: a tsv file of pairs, 'src,tgt' paired "
                   "files, or a plain monolingual file (no selection then)",
    "out_dir": "directory all stage outputs land in",
    "side": f"which side of the corpus is scored: {SOURCE} or {TARGET}",
    "n": "sentences pooled into one pseudo-document",
    "neg_pos_ratio": "background batches sampled per target batch",
    "train_fraction": "fraction of labeled batches used for training",
    "vocab_size": "vocabulary cap, most frequent non-stop tokens kept",
    "stopwords": "identifier of the bundled stop word list",
    "tf_mode": "term-frequency normalization: doc-max or corpus-max",
    "svm_c": "SVM regularization strength",
    "svm_tol": "solver stopping tolerance on the projected-gradient spread",
    "svm_max_iter": "solver epoch cap",
    "calib_fraction": "training slice held out for probability calibration "
                      "(0 disables)",
    "k_pairs": "selection budget in sentence pairs",
    "num_buckets": "ranking slices in the bucket report",
    "group_mode": "pseudo-document grouping of the corpus: consecutive or random",
    "seed": "base seed; every stage derives its own stream from it",
    "workers": "processes used for corpus scoring",
}

_INT_KEYS = ("n", "vocab_size", "svm_max_iter", "k_pairs", "num_buckets",
             "seed", "workers")
_FLOAT_KEYS = ("neg_pos_ratio", "train_fraction", "svm_c", "svm_tol",
               "calib_fraction")
_FIELDS = tuple(f.name for f in dataclasses.fields(PipelineConfig))


def _check_ranges(config):
    def bad(key, why):
        raise ConfigError(f"config key {key}: {why}")

    if config.n < 1:
        bad("n", f"must be >= 1, got {config.n}")
    if config.neg_pos_ratio <= 0:
        bad("neg_pos_ratio", f"must be > 0, got {config.neg_pos_ratio}")
    if not 0.0 < config.train_fraction < 1.0:
        bad("train_fraction", f"must be in (0, 1), got {config.train_fraction}")
    if config.vocab_size < 1:
        bad("vocab_size", f"must be >= 1, got {config.vocab_size}")
    if config.tf_mode not in TF_MODES:
        bad("tf_mode", f"must be one of {', '.join(TF_MODES)}, got {config.tf_mode!r}")
    if config.side not in (SOURCE, TARGET):
        bad("side", f"must be {SOURCE} or {TARGET}, got {config.side!r}")
    if config.svm_c <= 0:
        bad("svm_c", f"must be > 0, got {config.svm_c}")
    if config.svm_tol <= 0:
        bad("svm_tol", f"must be > 0, got {config.svm_tol}")
    if config.svm_max_iter < 1:
        bad("svm_max_iter", f"must be >= 1, got {config.svm_max_iter}")
    if not 0.0 <= config.calib_fraction < 1.0:
        bad("calib_fraction", f"must be in [0, 1), got {config.calib_fraction}")
    if config.k_pairs < 1:
        bad("k_pairs", f"must be >= 1, got {config.k_pairs}")
    if config.num_buckets < 1:
        bad("num_buckets", f"must be >= 1, got {config.num_buckets}")
    if config.group_mode not in (CONSECUTIVE, RANDOM):
        bad("group_mode",
            f"must be {CONSECUTIVE} or {RANDOM}, got {config.group_mode!r}")
    if config.workers < 1:
        bad("workers", f"must be >= 1, got {config.workers}")
    return config


def _coerce(key, value):
    try:
        if key in _INT_KEYS:
            return int(value)
        if key in _FLOAT_KEYS:
            return float(value)
    except ValueError:
        kind = "integer" if key in _INT_KEYS else "number"
        raise ConfigError(f"config key {key}: expected {kind}, got {value!r}") \
            from None
    return value


def load_config(path=None):
    """Parse a key = value file; '#' starts a comment, unknown keys fail."""
    if path is None:
        return _check_ranges(PipelineConfig())
    values = {}
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    with fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(
                    f"{path}:{line_no}: expected 'key = value', got {raw.strip()!r}"
                )
            key, value = (part.strip() for part in line.split("=", 1))
            if key not in _FIELDS:
                raise ConfigError(f"{path}:{line_no}: unknown config key {key!r}")
            if key in values:
                raise ConfigError(f"{path}:{line_no}: duplicate config key {key!r}")
            values[key] = _coerce(key, value)
    return _check_ranges(PipelineConfig(**values))


def apply_overrides(config, **overrides):
    """Command-line overrides; None values mean 'not given'."""
    changes = {k: v for k, v in overrides.items() if v is not None}
    bad = set(changes) - set(_FIELDS)
    if bad:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(bad))}")
    return _check_ranges(dataclasses.replace(config, **changes))


# Keys that cannot change artifact content: where files land and how many
# processes compute the identical result. Leaving them out of the hash means
# the same computation in a different directory or at a different worker
# count is stamped as the same computation.
_UNHASHED = ("out_dir", "workers")


def canonical_text(config):
    lines = []
    for key in _FIELDS:
        if key in _UNHASHED:
            continue
        value = getattr(config, key)
        lines.append(f"{key}={value!r}" if isinstance(value, float)
                     else f"{key}={value}")
    return "\n".join(lines) + "\n"


def config_hash(config):
    """Short stable digest of the keys that shape artifact content."""
    digest = hashlib.sha256(canonical_text(config).encode("utf-8"))
    return digest.hexdigest()[:16]


def validate(config, target_count=None, pair_count=None):
    """Non-fatal advisories for a loaded config against known corpus sizes."""
    notes = []
    if target_count is not None and target_count < 10 * config.n:
        notes.append(
            f"target sample has {target_count} sentences, fewer than 10 "
            f"documents of n={config.n}; accuracy estimates will be coarse")
    elif target_count is not None:
        train_docs = int(config.train_fraction * (target_count // config.n))
        if train_docs < 100:
            notes.append(
                f"only about {train_docs} positive documents will reach "
                "training; the decision threshold may sit poorly even "
                "though score rankings stay usable")
    if pair_count is not None and config.k_pairs > pair_count:
        notes.append(
            f"selection budget k_pairs={config.k_pairs} exceeds the corpus "
            f"({pair_count} pairs); the whole corpus will be selected")
    if config.calib_fraction == 0.0:
        notes.append("calibration disabled; scores files will carry no "
                     "probability column")
    return notes


def help_config():
    lines = ["configuration keys (key = value per line, '#' comments):", ""]
    defaults = PipelineConfig()
    for key in _FIELDS:
        default = getattr(defaults, key)
        shown = repr(default) if default != "" else "(none)"
        lines.append(f"  {key:<15} default {shown}")
        lines.append(f"      {_HELP[key]}")
    return "\n".join(lines) + "\n"
