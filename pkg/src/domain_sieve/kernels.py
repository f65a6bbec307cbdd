"""Kernel implementation selection.

Imports the compiled extension when present, otherwise the pure-Python
reference. ``DOMAIN_SIEVE_PURE=1`` in the environment forces the fallback
(useful for benchmarking and for debugging suspected kernel issues).
"""

import os

from domain_sieve import _kernels_py

if os.environ.get("DOMAIN_SIEVE_PURE"):
    _impl = _kernels_py
else:
    try:
        from domain_sieve import _kernels as _impl
    except ImportError:
        _impl = _kernels_py

IMPLEMENTATION = _impl.IMPLEMENTATION
tokenize = _impl.tokenize
TokenTable = _impl.TokenTable
doc_counts = _impl.doc_counts
svm_epochs = _impl.svm_epochs


def available_implementations():
    """Map of implementation name -> kernel module, for parity tests and
    benchmarks. The compiled entry is present only when importable."""
    impls = {"python": _kernels_py}
    try:
        from domain_sieve import _kernels
    except ImportError:
        pass
    else:
        impls["compiled"] = _kernels
    return impls
