"""Hot dense kernels with a compiled core and a numpy fallback.

The Cython extension ``_core`` is used when it was built; otherwise, or when
the environment variable ``HERMETIC_PURE_PYTHON`` is set to a non-empty
value, the numpy implementations in ``_fallback`` are used.

The compiled ``kron`` and ``gram`` loops beat numpy on small operands only;
above the crossover sizes measured by ``benchmarks/bench_kernels.py`` the
BLAS-backed numpy versions are used even with the compiled backend.
"""

import importlib
import os

from . import _fallback

__all__ = ["BACKEND", "load_backend", "partial_trace", "kron", "gram", "pivoted_cholesky"]


def load_backend(name):
    """Return the kernel module for ``"cython"`` or ``"python"``."""
    if name == "python":
        return _fallback
    if name == "cython":
        return importlib.import_module(__name__ + "._core")
    raise ValueError(f"unknown kernel backend {name!r}")


def _select():
    if os.environ.get("HERMETIC_PURE_PYTHON"):
        return "python", _fallback
    try:
        return "cython", load_backend("cython")
    except ImportError:
        return "python", _fallback


BACKEND, _impl = _select()

# crossover sizes: output entries for kron, n * n * dim for gram
KRON_CROSSOVER = 32768
GRAM_CROSSOVER = 8192

partial_trace = _impl.partial_trace
pivoted_cholesky = _impl.pivoted_cholesky


def kron(a, b):
    if _impl is not _fallback and a.size * b.size > KRON_CROSSOVER:
        return _fallback.kron(a, b)
    return _impl.kron(a, b)


def gram(vectors):
    n, d = vectors.shape
    if _impl is not _fallback and n * n * d > GRAM_CROSSOVER:
        return _fallback.gram(vectors)
    return _impl.gram(vectors)
