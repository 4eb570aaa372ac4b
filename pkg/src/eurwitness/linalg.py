"""Dense complex linear algebra on numpy arrays.

Matrices are plain ``numpy.ndarray`` objects; this module only adds the
validation and the multipartite index bookkeeping the rest of the package
relies on.
"""

from __future__ import annotations

from functools import reduce
from typing import Sequence

import numpy as np

from .errors import DimensionMismatch, NotHermitian, NotSquare
from .tolerances import TOL


def as_matrix(m) -> np.ndarray:
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2:
        raise DimensionMismatch(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def check_square(m: np.ndarray) -> None:
    if m.shape[0] != m.shape[1]:
        raise NotSquare(f"matrix of shape {m.shape} is not square")


def is_hermitian(m: np.ndarray, atol: float = TOL.hermiticity) -> bool:
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= atol


def hermitize(m: np.ndarray) -> np.ndarray:
    return 0.5 * (m + m.conj().T)


def eigh(m) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns ascending real eigenvalues and a unitary matrix whose columns are
    the matching eigenvectors, so ``m == V @ diag(w) @ V^H``. Inside a
    degenerate cluster the eigenvectors are an arbitrary orthonormal set.

    Raises
    ------
    NotSquare, NotHermitian
    """
    m = as_matrix(m)
    check_square(m)
    if not is_hermitian(m):
        raise NotHermitian(
            f"hermiticity violated by {np.max(np.abs(m - m.conj().T)):.3e}"
        )
    w, v = np.linalg.eigh(hermitize(m))
    return w, v


def eigvalsh(m) -> np.ndarray:
    m = as_matrix(m)
    check_square(m)
    if not is_hermitian(m):
        raise NotHermitian(
            f"hermiticity violated by {np.max(np.abs(m - m.conj().T)):.3e}"
        )
    return np.linalg.eigvalsh(hermitize(m))


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def kron_all(mats: Sequence) -> np.ndarray:
    return reduce(np.kron, [as_matrix(m) for m in mats])


def expm_hermitian(h, t: float) -> np.ndarray:
    """``exp(i t h)`` for Hermitian ``h`` via its eigendecomposition."""
    w, v = eigh(h)
    return (v * np.exp(1j * t * w)) @ v.conj().T


def partial_trace(m, dims: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Trace out every subsystem not listed in ``keep``.

    Kept subsystems appear in the result in ascending index order. Keeping
    nothing returns the 1x1 matrix holding the full trace.
    """
    m = as_matrix(m)
    dims = [int(d) for d in dims]
    n = len(dims)
    total = int(np.prod(dims)) if dims else 1
    if m.shape != (total, total):
        raise DimensionMismatch(f"dims {dims} do not match matrix shape {m.shape}")
    keep = sorted(set(int(k) for k in keep))
    if any(k < 0 or k >= n for k in keep):
        raise DimensionMismatch(f"keep={keep} out of range for {n} subsystems")

    t = m.reshape(dims + dims)
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out = keep + [n + i for i in keep]
    kept = int(np.prod([dims[i] for i in keep])) if keep else 1
    return np.einsum(t, row + col, out).reshape(kept, kept)


def permute_subsystems(m, dims: Sequence[int], order: Sequence[int]) -> np.ndarray:
    """Reorder the tensor factors of ``m``; new factor ``k`` is old ``order[k]``."""
    m = as_matrix(m)
    n = len(dims)
    t = m.reshape(list(dims) + list(dims))
    t = t.transpose(list(order) + [n + o for o in order])
    d = m.shape[0]
    return t.reshape(d, d)
