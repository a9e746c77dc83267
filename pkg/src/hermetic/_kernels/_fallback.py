"""Pure numpy versions of the compiled kernels.

Same call signatures as ``_core``. The partial trace here goes through
reshape/einsum rather than flat offsets, so the two backends also act as
independent cross-checks of each other.
"""

import numpy as np


def partial_trace(rho, dims, keep):
    """Trace out every subsystem whose index is not in ``keep``."""
    dims = [int(d) for d in dims]
    n = len(dims)
    keep = sorted(set(keep))
    rho = np.asarray(rho, dtype=np.complex128).reshape(dims + dims)
    # einsum subscripts: traced subsystems share the row and column letter
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    if 2 * n > len(letters):
        raise ValueError("too many subsystems for einsum partial trace")
    rows = list(letters[:n])
    cols = [letters[n + i] if i in keep else rows[i] for i in range(n)]
    out = "".join(rows[i] for i in keep) + "".join(cols[i] for i in keep)
    red = np.einsum("".join(rows) + "".join(cols) + "->" + out, rho)
    side = int(np.prod([dims[i] for i in keep]))
    return np.ascontiguousarray(red.reshape(side, side))


def kron(a, b):
    """Kronecker product of two 2-d complex arrays."""
    return np.kron(np.asarray(a, dtype=np.complex128), np.asarray(b, dtype=np.complex128))


def gram(vectors):
    """G[j, k] = <v_j|v_k> for the rows v_j of ``vectors``."""
    v = np.asarray(vectors, dtype=np.complex128)
    g = v.conj() @ v.T
    return (g + g.conj().T) / 2


def pivoted_cholesky(a, tol):
    """Diagonally pivoted Cholesky of a Hermitian PSD matrix.

    Returns ``(L, rank)``; see the compiled twin for the contract.
    """
    a = np.asarray(a, dtype=np.complex128)
    n = a.shape[0]
    L = np.zeros((n, n), dtype=np.complex128)
    d = np.real(np.diagonal(a)).astype(np.float64).copy()
    perm = np.arange(n)
    rank = 0
    for k in range(n):
        j = k + int(np.argmax(d[perm[k:]]))
        if d[perm[j]] <= tol:
            break
        perm[[k, j]] = perm[[j, k]]
        p = perm[k]
        piv = np.sqrt(d[p])
        L[p, k] = piv
        rest = perm[k + 1:]
        if rest.size:
            L[rest, k] = (a[rest, p] - L[rest, :k] @ L[p, :k].conj()) / piv
            d[rest] -= np.abs(L[rest, k]) ** 2
        rank = k + 1
    return L[:, :rank].copy(), rank
