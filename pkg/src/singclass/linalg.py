"""Dense small-matrix numerics: ranks with explicit tolerances, kernel and
cokernel bases, bordered solves (plain and in jet arithmetic), and dual
witness vectors certifying independence of functional rows."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from . import jets
from .errors import NotIndependent, SingularBorder
from .jets import Jet

DEFAULT_RANK_TOL = 1e-8


@dataclass(frozen=True)
class RankDecision:
    rank: int
    singular_values: tuple[float, ...]
    tol_used: float


def rank_decision(rows: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> RankDecision:
    """Numerical rank of a stack of rows.

    A singular value counts toward the rank when it exceeds
    ``tol * max(1, sigma_max)``; the ``max(1, .)`` floor keeps all-zero and
    tiny-noise rows at rank zero without a separate absolute threshold.
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    sv = np.linalg.svd(rows, compute_uv=False)
    thresh = tol * max(1.0, float(sv[0]) if sv.size else 0.0)
    rank = int(np.sum(sv > thresh))
    return RankDecision(rank, tuple(float(s) for s in sv), tol)


def _fix_signs(vecs: np.ndarray) -> np.ndarray:
    """Flip each column so its largest-magnitude entry is positive.

    SVD leaves the sign of each singular vector free; fixing it makes kernel
    bases (and everything derived from them) reproducible across runs.
    """
    out = vecs.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        i = int(np.argmax(np.abs(col)))
        if col[i] < 0:
            out[:, j] = -col
    return out


def kernel_cokernel(A: np.ndarray, tol: float = DEFAULT_RANK_TOL):
    """Kernel dimension plus orthonormal kernel and left-null bases of a
    square matrix, with deterministic sign conventions."""
    A = np.asarray(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("kernel_cokernel expects a square matrix")
    U, sv, Vt = np.linalg.svd(A)
    thresh = tol * max(1.0, float(sv[0]) if sv.size else 0.0)
    rank = int(np.sum(sv > thresh))
    kdim = n - rank
    kernel = _fix_signs(Vt[rank:].T) if kdim else np.zeros((n, 0))
    left = _fix_signs(U[:, rank:]) if kdim else np.zeros((n, 0))
    return kdim, [kernel[:, j] for j in range(kdim)], [left[:, j] for j in range(kdim)]


def _border_matrix(A: np.ndarray, b: np.ndarray, c: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    M = np.zeros((n + 1, n + 1))
    M[:n, :n] = A
    M[:n, n] = b
    M[n, :n] = c
    return M


def _border_jet(A: Jet, b: np.ndarray, c: np.ndarray) -> Jet:
    vnd = A.value_ndim
    nj = A.njet
    n = A.coeffs.shape[vnd - 1]
    shape = A.value_shape[:-2] + (n + 1, n + 1) + A.jet_shape
    M = np.zeros(shape)
    M[(Ellipsis, slice(0, n), slice(0, n)) + (slice(None),) * nj] = A.coeffs
    M[(Ellipsis, slice(0, n), n) + (0,) * nj] = b
    M[(Ellipsis, n, slice(0, n)) + (0,) * nj] = c
    return Jet(A.vars, A.orders, M)


def lu_solve_jet(lu_piv, r: Jet, trans: int = 0) -> Jet:
    """Apply a factored constant matrix inverse coefficient-wise."""
    vnd = r.value_ndim
    m = r.coeffs.shape[vnd - 1]
    moved = np.moveaxis(r.coeffs, vnd - 1, 0).reshape(m, -1)
    sol = lu_solve(lu_piv, moved, trans=trans)
    sol = np.moveaxis(sol.reshape((m,) + r.coeffs.shape[:vnd - 1] + r.jet_shape), 0, vnd - 1)
    return Jet(r.vars, r.orders, sol)


def _matvec_jet_mat(M: Jet, x: Jet) -> Jet:
    """Product of a jet-valued matrix with a jet-valued vector."""
    vndm = M.value_ndim
    orders = M.orders
    vs = np.broadcast_shapes(M.value_shape[:-2], x.value_shape[:-1])
    m = M.coeffs.shape[vndm - 2]
    out = np.zeros(vs + (m,) + M.jet_shape)
    xc = x.coeffs
    for mu in np.ndindex(*M.jet_shape):
        Mmu = M.coeffs[(Ellipsis, *mu)]
        if not Mmu.any():
            continue
        xs = xc[(Ellipsis,) + tuple(slice(0, o + 1 - k) for k, o in zip(mu, orders))]
        sub_shape = xs.shape[x.value_ndim:]
        flat = xs.reshape(xs.shape[: x.value_ndim] + (int(np.prod(sub_shape, dtype=int)),))
        prod = np.matmul(Mmu, flat)
        prod = prod.reshape(prod.shape[:-1] + sub_shape)
        out_sl = (Ellipsis, slice(None)) + tuple(slice(k, o + 1) for k, o in zip(mu, orders))
        out[out_sl] += prod
    return Jet(M.vars, M.orders, out)


def _jet_border_solve(M: Jet, rhs: Jet, lu_piv, trans: int = 0) -> Jet:
    """Solve M X = rhs where M's constant coefficient is the factored matrix.

    Fixed-point iteration X <- M0^{-1}(rhs - N X) with N the nilpotent part
    of M; each pass fixes one more total degree, so ``sum(orders)`` passes
    give the exact truncated solution (back-substitution in disguise).
    """
    nil_c = M.coeffs.copy()
    nil_c[(Ellipsis, *(0,) * M.njet)] = 0.0
    N = Jet(M.vars, M.orders, nil_c)
    X = lu_solve_jet(lu_piv, rhs, trans=trans)
    for _ in range(sum(M.orders)):
        resid = rhs - _matvec_jet_mat(N, X)
        X = lu_solve_jet(lu_piv, resid, trans=trans)
    return X


def border_factor(A: np.ndarray, b: np.ndarray, c: np.ndarray, tol: float = DEFAULT_RANK_TOL):
    """Factor the bordered matrix [[A, b], [c^T, 0]], checking regularity."""
    M0 = _border_matrix(np.asarray(A, dtype=float), b, c)
    sv = np.linalg.svd(M0, compute_uv=False)
    if sv[-1] <= tol * max(1.0, sv[0]):
        raise SingularBorder(
            f"bordered matrix rank-deficient: sigma_min/sigma_max = {sv[-1] / sv[0]:.3e}"
        )
    return lu_factor(M0)


def bordered_solve(A, b, c, rhs, tol: float = DEFAULT_RANK_TOL, lu_piv=None, trans: int = 0):
    """Solution (x, s) of the bordered system [[A, b], [c^T, 0]] (x, s) = rhs.

    ``A`` and ``rhs[0]`` may be jet-valued; the system is then solved
    coefficient-by-coefficient against the factored constant-term matrix
    (pass ``lu_piv`` to reuse a factorization across many solves).
    """
    r1, r2 = rhs
    b = np.asarray(b, dtype=float)
    c = np.asarray(c, dtype=float)
    n = b.shape[0]
    if isinstance(A, Jet) or isinstance(r1, Jet):
        if not isinstance(A, Jet):
            raise ValueError("jet-valued rhs requires a jet-valued matrix")
        if lu_piv is None:
            lu_piv = border_factor(A.const if A.value_ndim == 2 else A.const[(0,) * (A.value_ndim - 2)], b, c, tol)
        M = _border_jet(A, b, c)
        if isinstance(r1, Jet):
            R = jets.stack([r1[i] for i in range(n)] + [r2])
        else:
            rr = np.zeros(np.asarray(r1).shape[:-1] + (n + 1,))
            rr[..., :n] = r1
            rr[..., n] = r2
            R = jets.constant(rr, A.vars, A.orders)
        X = _jet_border_solve(M, R, lu_piv, trans=trans)
        xs = Jet(X.vars, X.orders, X.coeffs[(Ellipsis, slice(0, n)) + (slice(None),) * X.njet])
        s = X[n]
        return xs, s
    A = np.asarray(A, dtype=float)
    if lu_piv is None:
        lu_piv = border_factor(A, b, c, tol)
    rr = np.zeros(n + 1)
    rr[:n] = r1
    rr[n] = r2
    sol = lu_solve(lu_piv, rr, trans=trans)
    return sol[:n], float(sol[n])


def dual_witnesses(rows: np.ndarray, tol: float = DEFAULT_RANK_TOL) -> list[np.ndarray]:
    """Minimum-norm vectors w_j with rows @ w_j = e_j.

    These certify independence of the rows (they exist precisely when the
    stack has full row rank).
    """
    rows = np.atleast_2d(np.asarray(rows, dtype=float))
    k = rows.shape[0]
    dec = rank_decision(rows, tol)
    if dec.rank != k:
        raise NotIndependent(f"rows have rank {dec.rank} < {k}")
    W = np.linalg.pinv(rows)
    return [W[:, j] for j in range(k)]
