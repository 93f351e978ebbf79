"""Constructive local scalar reduction at a simple singularity.

Near a point where F'(u0) has a one-dimensional kernel, the change of
coordinates

    alpha(u) = (c.(u - u0), Q^T (F(u) - F(u0)))

(with c a unit kernel vector and Q an orthonormal basis of the range of
F'(u0)) is a diffeomorphism, and in the new coordinates the map takes the
form (t, z) |-> (f(t, z), z) with f(0,0) = 0 and vanishing first derivatives.
All classification data can then be read off the partial derivatives of the
single scalar f, which this module exposes as a jet oracle: jets of
alpha^{-1} are obtained by degree-by-degree back-substitution against the
one factored linearization alpha'(u0).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import lu_factor

from . import jets, linalg
from .errors import IllConditioned, NotSimple, OrderExceedsSmoothness
from .fibering import FunctionalsRecord
from .jets import Jet
from .model import MapModel


@dataclass
class LSModel:
    u0: np.ndarray
    F_u0: np.ndarray
    kernel_vec: np.ndarray        # c, unit kernel vector of F'(u0)
    left_null_vec: np.ndarray     # w, unit left-null vector of F'(u0)
    range_basis: np.ndarray       # Q, n x (n-1), orthonormal basis of w-perp
    p: np.ndarray                 # projector onto the kernel line
    pi: np.ndarray                # projector onto the range of F'(u0)
    alpha_lu: object
    cond_alpha: float
    model: MapModel
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def n(self) -> int:
        return self.model.n

    # -- alpha and its jet inverse -------------------------------------------

    def alpha(self, x):
        """Coordinates (t, z) of a (jet) point x."""
        t = jets.dot(self.kernel_vec, x - self.u0)
        z = jets.matvec(self.range_basis.T, self.model.eval(x) - self.F_u0)
        if isinstance(x, Jet):
            return jets.stack([t] + [z[i] for i in range(self.n - 1)])
        return np.concatenate([np.atleast_1d(t), z])

    def alpha_inverse_jet(self, y: Jet) -> Jet:
        """x with alpha(x) = y, for a jet y whose constant term is 0.

        One pass per total degree: the residual of the current iterate has no
        terms below the degree being corrected, so sum(orders) passes give the
        exact truncated inverse using only the factored alpha'(u0).
        """
        x = jets.constant(self.u0, y.vars, y.orders)
        for _ in range(sum(y.orders)):
            r = y - self.alpha(x)
            x = x + linalg.lu_solve_jet(self.alpha_lu, r)
        return x

    def f_value(self, x):
        return jets.dot(self.left_null_vec, self.model.eval(x) - self.F_u0)

    # -- the reduced scalar's jets ---------------------------------------------

    def f_jet(self, t_order: int, z_dirs: Sequence[int] = ()) -> Jet:
        """Jet of f(t, z) at (0, 0): order ``t_order`` in t, order 1 along each
        requested z coordinate direction (directions are batched)."""
        if t_order + (1 if z_dirs else 0) > self.model.d:
            raise OrderExceedsSmoothness("requested jet order exceeds declared smoothness")
        key = (t_order, tuple(z_dirs))
        if key in self._cache:
            return self._cache[key]
        n = self.n
        tname = jets.fresh_name("t")
        names = (tname,)
        orders = (t_order,)
        if z_dirs:
            zname = jets.fresh_name("z")
            names = (tname, zname)
            orders = (t_order, 1)
        tpart = np.zeros(n)
        tpart[0] = 1.0
        y = jets.constant(np.zeros((len(z_dirs), n)) if z_dirs else np.zeros(n), names, orders)
        y = y + jets.unit(names, orders, tname) * tpart
        if z_dirs:
            zmat = np.zeros((len(z_dirs), n))
            for row, j in enumerate(z_dirs):
                zmat[row, 1 + j] = 1.0
            y = y + jets.unit(names, orders, zname) * zmat
        x = self.alpha_inverse_jet(y)
        out = self.f_value(x)
        self._cache[key] = out
        return out

    def f_partial_t(self, order: int) -> float:
        """d^order f / dt^order at (0,0)."""
        j = self.f_jet(max(order, 1))
        tname = j.vars[0]
        return float(j.extract({tname: order})) * math.factorial(order)

    def mixed_rows(self, k_max: int) -> np.ndarray:
        """Rows M[h-1, j] = d^{h+1} f / (dt^h dz_j) at (0,0), h = 1..k_max."""
        n = self.n
        if n == 1 or k_max == 0:
            return np.zeros((k_max, max(n - 1, 0)))
        j = self.f_jet(k_max, tuple(range(n - 1)))
        tname, zname = j.vars
        out = np.zeros((k_max, n - 1))
        for h in range(1, k_max + 1):
            out[h - 1] = np.asarray(j.extract({tname: h, zname: 1})) * math.factorial(h)
        return out


def local_representation(model: MapModel, u0, tol: float = linalg.DEFAULT_RANK_TOL) -> LSModel:
    """Build the local reduction at u0; fails unless u0 is a simple singularity."""
    u0 = np.asarray(u0, dtype=float)
    A = jets.jacobian(model, u0)
    kdim, kernel, left = linalg.kernel_cokernel(A, tol)
    if kdim != 1:
        raise NotSimple(f"kernel dimension is {kdim}, expected 1")
    c = kernel[0]
    w = left[0]
    n = model.n
    # orthonormal basis of the range (the orthogonal complement of w)
    U, _, _ = np.linalg.svd(np.eye(n) - np.outer(w, w))
    Q = linalg._fix_signs(U[:, : n - 1]) if n > 1 else np.zeros((1, 0))
    Aprime = np.vstack([c[None, :], Q.T @ A])
    sv = np.linalg.svd(Aprime, compute_uv=False)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else np.inf
    if cond > 1e8:
        raise IllConditioned(f"linearized coordinate change has condition {cond:.3e}")
    return LSModel(
        u0=u0,
        F_u0=np.asarray(model(u0), dtype=float),
        kernel_vec=c,
        left_null_vec=w,
        range_basis=Q,
        p=np.outer(c, c),
        pi=np.eye(n) - np.outer(w, w),
        alpha_lu=lu_factor(Aprime),
        cond_alpha=cond,
        model=model,
    )


def canonical_functionals(ls: LSModel, k_max: int) -> FunctionalsRecord:
    """Functionals of the reduced scalar: J_h = d^{h+1} f / dt^{h+1} and rows
    I_h = (d^{h+1} f/dt^{h+1}, d^{h+1} f/dt^h dz) in the reduced coordinates."""
    if k_max + 1 > ls.model.d:
        raise OrderExceedsSmoothness("k_max + 1 exceeds declared smoothness")
    tjet = ls.f_jet(k_max + 1)
    tname = tjet.vars[0]
    dts = [float(tjet.extract({tname: m})) * math.factorial(m) for m in range(k_max + 2)]
    mixed = ls.mixed_rows(k_max)
    J = [dts[h + 1] for h in range(k_max + 1)]
    I = []
    for h in range(1, k_max + 1):
        row = np.zeros(ls.n)
        row[0] = dts[h + 1]
        row[1:] = mixed[h - 1]
        I.append(row)
    return FunctionalsRecord(J=J, I=I, at=np.zeros(ls.n), pair_id="canonical-ls", k_max=k_max)


@dataclass(frozen=True)
class LSConditions:
    k: int
    transverse: bool
    singularity: bool
    maximal: bool
    witnesses: list[np.ndarray]
    J: list[float]
    ranks: dict[int, int]


def ls_conditions(ls: LSModel, k: int, tol) -> LSConditions:
    """Pointwise transversality / ordinary / maximal-transverse conditions of
    order k for the reduced scalar at the base point."""
    rec = canonical_functionals(ls, k + 1)
    J = rec.J
    scale = max(1.0, max(abs(v) for v in J))
    zero = [abs(v) <= tol.zero * scale for v in J]
    rows = np.array(rec.I)
    rk = linalg.rank_decision(rows[:k], tol.rank).rank if k else 0
    rk1 = linalg.rank_decision(rows[: k + 1], tol.rank).rank
    prefix_zero = all(zero[:k])
    transverse = prefix_zero and rk == k
    singularity = (
        prefix_zero
        and abs(J[k]) >= tol.nonzero * scale
        and (k == 1 or linalg.rank_decision(rows[: k - 1], tol.rank).rank == k - 1)
    )
    maximal = transverse and zero[k] and rk1 == k
    witnesses = linalg.dual_witnesses(rows[:k], tol.rank) if transverse and k else []
    return LSConditions(
        k=k,
        transverse=transverse,
        singularity=singularity,
        maximal=maximal,
        witnesses=witnesses,
        J=J,
        ranks={k: rk, k + 1: rk1},
    )
