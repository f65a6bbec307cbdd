"""Domain-targeted selection of parallel MT training data.

Learns a batch-level topic classifier from a monolingual sample of the
target domain, scores a large heterogeneous parallel corpus with it (on the
declared monolingual side), and exports the top-ranked sentence pairs for
downstream translation-model training.
"""

__version__ = "0.1.0"
