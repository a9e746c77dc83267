"""Dense complex linear-algebra kernel.

Vectors are 1-d ``complex128`` arrays, matrices 2-d ``complex128`` arrays.
All functions are pure; inputs are never modified.
"""

import numpy as np

from . import _kernels
from .errors import ArgumentError, DimensionError, GramSpecError, LayoutError, NormalizationError
from .tolerances import DEFAULT

__all__ = [
    "as_vector",
    "as_matrix",
    "tensor_product",
    "partial_trace",
    "schmidt",
    "gram",
    "gram_realize",
    "eigh",
    "phase_normalize",
    "hermiticity_defect",
    "is_psd",
]


def as_vector(v):
    a = np.asarray(v, dtype=np.complex128)
    if a.ndim != 1 or a.size == 0:
        raise ArgumentError(f"expected a non-empty 1-d vector, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ArgumentError("vector has non-finite entries")
    return a


def as_matrix(m, square=False):
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2 or a.size == 0:
        raise ArgumentError(f"expected a non-empty 2-d matrix, got shape {a.shape}")
    if square and a.shape[0] != a.shape[1]:
        raise ArgumentError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ArgumentError("matrix has non-finite entries")
    return a


def phase_normalize(v, tol=DEFAULT):
    """Rotate ``v`` so its first non-negligible entry is real and positive."""
    v = np.asarray(v, dtype=np.complex128)
    idx = np.flatnonzero(np.abs(v) > tol.classify)
    if idx.size == 0:
        return v.copy()
    z = v[idx[0]]
    return v * (abs(z) / z)


def hermiticity_defect(h):
    h = np.asarray(h)
    return float(np.max(np.abs(h - h.conj().T))) if h.size else 0.0


def tensor_product(a, b, tol=DEFAULT):
    """Kronecker product of two vectors or two matrices.

    Raises :class:`DimensionError` when the result would exceed
    ``tol.max_dim`` along any axis.
    """
    a_arr = np.asarray(a, dtype=np.complex128)
    b_arr = np.asarray(b, dtype=np.complex128)
    if a_arr.ndim != b_arr.ndim or a_arr.ndim not in (1, 2):
        raise ArgumentError("tensor_product needs two vectors or two matrices")
    if a_arr.ndim == 1:
        a_arr, b_arr = as_vector(a_arr), as_vector(b_arr)
        if a_arr.size * b_arr.size > tol.max_dim:
            raise DimensionError(f"product dimension {a_arr.size * b_arr.size} exceeds {tol.max_dim}")
        return _kernels.kron(a_arr[:, None], b_arr[:, None])[:, 0]
    a_arr, b_arr = as_matrix(a_arr), as_matrix(b_arr)
    side = max(a_arr.shape[0] * b_arr.shape[0], a_arr.shape[1] * b_arr.shape[1])
    if side > tol.max_dim:
        raise DimensionError(f"product dimension {side} exceeds {tol.max_dim}")
    return _kernels.kron(a_arr, b_arr)


def partial_trace(rho, dims, keep):
    """Reduce ``rho`` to the subsystems listed in ``keep``.

    Parameters
    ----------
    rho : array_like
        Square matrix on the product space with subsystem dimensions ``dims``.
    dims : sequence of int
    keep : iterable of int
        Indices into ``dims``; the result is ordered by increasing index.
    """
    rho = as_matrix(rho, square=True)
    dims = [int(d) for d in dims]
    if not dims or any(d < 1 for d in dims):
        raise LayoutError(f"invalid subsystem dimensions {dims}")
    if int(np.prod(dims)) != rho.shape[0]:
        raise LayoutError(f"matrix side {rho.shape[0]} does not match dims {dims}")
    keep = sorted(set(int(k) for k in keep))
    if not keep or keep[0] < 0 or keep[-1] >= len(dims):
        raise LayoutError(f"invalid keep set {keep} for {len(dims)} subsystems")
    if len(keep) == len(dims):
        return rho.copy()
    return _kernels.partial_trace(rho, dims, keep)


def schmidt(psi, dims, tol=DEFAULT):
    """Schmidt decomposition of a bipartite pure state.

    Returns
    -------
    coeffs : ndarray
        Positive Schmidt coefficients, descending; coefficients at or below
        ``tol.norm`` are dropped.
    left, right : ndarray
        Columns are the orthonormal Schmidt vectors on each factor, with
        ``psi = sum_k coeffs[k] * kron(left[:, k], right[:, k])``. The first
        significant entry of every left vector is real and positive.
    """
    psi = as_vector(psi)
    d_a, d_b = (int(d) for d in dims)
    if d_a * d_b != psi.size:
        raise LayoutError(f"vector of length {psi.size} does not match dims ({d_a}, {d_b})")
    nrm = np.linalg.norm(psi)
    if abs(nrm - 1.0) > tol.norm:
        raise NormalizationError(f"state norm {nrm!r} differs from 1")
    u, s, vh = np.linalg.svd(psi.reshape(d_a, d_b), full_matrices=False)
    r = int(np.count_nonzero(s > tol.norm))
    left = np.empty((d_a, r), dtype=np.complex128)
    right = np.empty((d_b, r), dtype=np.complex128)
    for k in range(r):
        z = u[np.flatnonzero(np.abs(u[:, k]) > tol.classify)[0], k]
        ph = abs(z) / z
        # the phase taken off the left vector goes onto the right one
        left[:, k] = u[:, k] * ph
        right[:, k] = vh[k, :] / ph
    return s[:r].copy(), left, right


def gram(vectors):
    """Gram matrix ``G[j, k] = <v_j|v_k>``."""
    vectors = list(vectors)
    if not vectors:
        raise ArgumentError("gram of an empty vector list")
    rows = [as_vector(v) for v in vectors]
    if len({r.size for r in rows}) != 1:
        raise ArgumentError("gram needs vectors of equal dimension")
    return _kernels.gram(np.vstack(rows))


def is_psd(h, tol=DEFAULT):
    return bool(np.linalg.eigvalsh(h).min() >= -tol.psd)


def validate_gram_spec(g, tol=DEFAULT):
    """Return ``g`` as a matrix or raise :class:`GramSpecError`."""
    try:
        g = as_matrix(g, square=True)
    except ArgumentError as exc:
        raise GramSpecError(str(exc)) from None
    if hermiticity_defect(g) > tol.herm:
        raise GramSpecError("overlap matrix is not Hermitian")
    if np.max(np.abs(np.diagonal(g) - 1.0)) > tol.norm:
        raise GramSpecError("overlap matrix does not have unit diagonal")
    g = (g + g.conj().T) / 2
    if not is_psd(g, tol):
        raise GramSpecError("overlap matrix is not positive semidefinite")
    return g


def gram_realize(g, min_dim=None, tol=DEFAULT):
    """Unit vectors whose Gram matrix is ``g``.

    Uses diagonally pivoted Cholesky with pivots at or below ``tol.psd``
    discarded, so rank-deficient (e.g. collinear) specifications come out
    in the minimal dimension ``max(rank(g), min_dim)``.
    """
    g = validate_gram_spec(g, tol)
    lower, rank = _kernels.pivoted_cholesky(g, tol.psd)
    dim = max(rank, int(min_dim or 0), 1)
    vecs = np.zeros((g.shape[0], dim), dtype=np.complex128)
    vecs[:, :rank] = lower.conj()
    return [row / np.linalg.norm(row) for row in vecs]


def eigh(h, tol=DEFAULT):
    """Eigen-decomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a matrix whose columns are the
    orthonormal, phase-normalized eigenvectors.
    """
    h = as_matrix(h, square=True)
    if hermiticity_defect(h) > tol.herm:
        raise ArgumentError("eigh needs a Hermitian matrix")
    w, v = np.linalg.eigh((h + h.conj().T) / 2)
    for k in range(v.shape[1]):
        v[:, k] = phase_normalize(v[:, k], tol)
    return w, v
