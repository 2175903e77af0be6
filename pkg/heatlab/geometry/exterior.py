"""Exterior algebra on orthonormal coframes.

Multi-indices are strictly increasing tuples in lexicographic order; a j-form is a
vector of binom(m, j) components in that order.
"""

from __future__ import annotations

from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from heatlab.errors import DegreeError


def check_degree(m: int, j: int) -> None:
    if not 0 <= j <= m:
        raise DegreeError(f"degree {j} outside [0, {m}]")


def form_dimension(m: int, j: int) -> int:
    check_degree(m, j)
    return comb(m, j)


@lru_cache(maxsize=None)
def multi_indices(m: int, j: int) -> tuple[tuple[int, ...], ...]:
    check_degree(m, j)
    return tuple(combinations(range(m), j))


@lru_cache(maxsize=None)
def _position(m: int, j: int) -> dict[tuple[int, ...], int]:
    return {I: k for k, I in enumerate(multi_indices(m, j))}


@lru_cache(maxsize=None)
def _wedge(m: int, j: int) -> np.ndarray:
    out = np.zeros((m, comb(m, j + 1), comb(m, j)))
    target = _position(m, j + 1)
    for col, I in enumerate(multi_indices(m, j)):
        for a in range(m):
            if a in I:
                continue
            sign = (-1) ** sum(1 for i in I if i < a)
            out[a, target[tuple(sorted(I + (a,)))], col] = sign
    out.setflags(write=False)
    return out


def wedge_matrices(m: int, j: int) -> np.ndarray:
    """(m, binom(m,j+1), binom(m,j)) matrices of e^a ∧ acting on j-forms."""
    check_degree(m, j)
    return _wedge(m, j)


def interior_matrices(m: int, j: int) -> np.ndarray:
    """(m, binom(m,j-1), binom(m,j)) matrices of the interior product with e_a."""
    check_degree(m, j)
    if j == 0:
        return np.zeros((m, 0, 1))
    return np.swapaxes(_wedge(m, j - 1), -1, -2)


def derivation(A: np.ndarray, j: int) -> np.ndarray:
    """Extension of a covector endomorphism A (A e^c = sum_d A[d,c] e^d) to Lambda^j as a derivation.

    Works on stacks: A has shape (..., m, m), the result (..., N, N).
    """
    A = np.asarray(A, dtype=float)
    m = A.shape[-1]
    N = form_dimension(m, j)
    if j == 0:
        return np.zeros(A.shape[:-2] + (N, N))
    W = wedge_matrices(m, j - 1)  # (m, N, N_{j-1})
    Iota = interior_matrices(m, j)  # (m, N_{j-1}, N)
    basis_ops = np.einsum("dkl,clq->dckq", W, Iota)  # e^d ∧ i_c
    return np.einsum("...dc,dckq->...kq", A, basis_ops)


def compound(O: np.ndarray, j: int) -> np.ndarray:
    """j-th compound matrix: C[..., J, I] = det O[..., J, I]."""
    O = np.asarray(O, dtype=float)
    m = O.shape[-1]
    idx = multi_indices(m, j)
    N = len(idx)
    if j == 0:
        return np.ones(O.shape[:-2] + (1, 1))
    out = np.empty(O.shape[:-2] + (N, N))
    for r, J in enumerate(idx):
        rows = O[..., list(J), :]
        for c, I in enumerate(idx):
            out[..., r, c] = np.linalg.det(rows[..., list(I)])
    return out


def hodge_star(m: int, j: int) -> np.ndarray:
    """Hodge star Lambda^j -> Lambda^{m-j} on an oriented orthonormal coframe."""
    check_degree(m, j)
    out = np.zeros((comb(m, m - j), comb(m, j)))
    target = _position(m, m - j)
    for col, I in enumerate(multi_indices(m, j)):
        rest = tuple(a for a in range(m) if a not in I)
        perm = I + rest
        inversions = sum(1 for p in range(m) for q in range(p + 1, m) if perm[p] > perm[q])
        out[target[rest], col] = (-1) ** inversions
    return out
