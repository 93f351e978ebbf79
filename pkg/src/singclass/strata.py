"""Pointwise access to the nested singular strata near a 1-transverse point:
Newton projection onto the singular hypersurface, stratum membership tests,
tangent spaces, and codimension verification."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import linalg
from .classify import Tolerances
from .errors import DegenerateGradient, NoConvergence, NotIndependent, SingularBorder
from .fibering import PairBase, PointFunctionals
from .model import MapModel


@dataclass
class StratumSample:
    points: list[np.ndarray]
    h_membership: list[int]
    residuals: list[float]
    seed: int


def project_to_singular(model: MapModel, u_guess, pair: PairBase, max_iter: int = 25,
                        tol: Tolerances = Tolerances(), target: float = 1e-10) -> np.ndarray:
    """Newton iteration for J0 = 0 along the I1 direction.

    Well-posed near a 1-transverse point, where the singular set is the
    regular zero set of J0.
    """
    u = np.asarray(u_guess, dtype=float).copy()
    for _ in range(max_iter):
        pf = PointFunctionals(model, pair, u, tol.rank)
        i1 = pf.row(1)
        if linalg.rank_decision(i1[None, :], tol.rank).rank == 0:
            raise DegenerateGradient("I1 vanishes at the current iterate")
        j0 = pf.J(0)
        if abs(j0) <= target:
            return u
        u = u - (j0 / float(np.dot(i1, i1))) * i1
    pf = PointFunctionals(model, pair, u, tol.rank)
    if abs(pf.J(0)) <= target:
        return u
    raise NoConvergence(f"|J0| = {abs(pf.J(0)):.3e} after {max_iter} Newton steps")


def stratum_membership(model: MapModel, u, h: int, pair: PairBase,
                       tol: Tolerances = Tolerances()):
    """Member of the h-th stratum iff J_0 .. J_{h-1} all vanish at u."""
    pf = PointFunctionals(model, pair, u, tol.rank)
    vals = [pf.J(j) for j in range(h)]
    scale = max(1.0, max((abs(v) for v in vals), default=0.0))
    member = all(abs(v) <= tol.zero * scale for v in vals)
    return member, vals


def tangent_space(model: MapModel, u, h: int, pair: PairBase,
                  tol: Tolerances = Tolerances()) -> list[np.ndarray]:
    """Orthonormal basis of the intersection of the null spaces of I_1 .. I_h."""
    n = model.n
    if h == 0:
        return [np.eye(n)[:, j] for j in range(n)]
    pf = PointFunctionals(model, pair, u, tol.rank)
    rows = np.array([pf.row(j) for j in range(1, h + 1)])
    dec = linalg.rank_decision(rows, tol.rank)
    if dec.rank != h:
        raise NotIndependent(f"rows I_1..I_{h} have rank {dec.rank} < {h}")
    _, _, Vt = np.linalg.svd(rows)
    basis = linalg._fix_signs(Vt[h:].T)
    return [basis[:, j] for j in range(n - h)]


@dataclass
class StratificationRecord:
    ranks: dict[int, int]
    rank_ok: dict[int, bool]
    tangent_residuals: dict[int, float]
    phi_in_tangent: bool
    J_k_zero: bool
    dichotomy_consistent: bool
    sampled_rank1_ok: bool


def verify_stratification(model: MapModel, u0, k: int, pair: PairBase,
                          n_probes: int = 10, seed: int = 0,
                          tol: Tolerances = Tolerances()) -> StratificationRecord:
    """Codimension checks for h = 1..k plus the kernel-line dichotomy:
    phi(u0) lies in the order-k tangent space iff J_k vanishes."""
    u0 = np.asarray(u0, dtype=float)
    pf = PointFunctionals(model, pair, u0, tol.rank)
    ranks, rank_ok, tangent_res = {}, {}, {}
    rows = []
    for h in range(1, k + 1):
        rows.append(pf.row(h))
        dec = linalg.rank_decision(np.array(rows), tol.rank)
        ranks[h] = dec.rank
        rank_ok[h] = dec.rank == h
        if rank_ok[h]:
            basis = tangent_space(model, u0, h, pair, tol)
            res = max(
                float(np.max(np.abs(np.array(rows) @ b))) for b in basis
            ) if basis else 0.0
            tangent_res[h] = res
    stack = np.array(rows)
    phi = pf.phi0
    resid = np.linalg.norm(stack @ phi)
    row_scale = max(1.0, float(np.linalg.norm(stack)) * float(np.linalg.norm(phi)))
    phi_in = resid <= 1e-6 * row_scale
    jk = pf.J(k)
    jscale = max(1.0, max(abs(pf.J(j)) for j in range(k + 1)))
    jk_zero = abs(jk) <= tol.zero * jscale
    # sampled nearby singular points must keep rank(I1) = 1
    rng = np.random.default_rng(seed)
    ok = True
    for _ in range(n_probes):
        guess = u0 + 0.05 * rng.standard_normal(model.n)
        try:
            pt = project_to_singular(model, guess, pair, tol=tol)
        except (DegenerateGradient, NoConvergence):
            ok = False
            continue
        pfs = PointFunctionals(model, pair, pt, tol.rank)
        if linalg.rank_decision(pfs.row(1)[None, :], tol.rank).rank != 1:
            ok = False
    return StratificationRecord(
        ranks=ranks,
        rank_ok=rank_ok,
        tangent_residuals=tangent_res,
        phi_in_tangent=bool(phi_in),
        J_k_zero=bool(jk_zero),
        dichotomy_consistent=bool(phi_in == jk_zero),
        sampled_rank1_ok=bool(ok),
    )


def sample_stratum(model: MapModel, u0, pair: PairBase, count: int = 20,
                   radius: float = 0.1, seed: int = 0, h_max: int = 3,
                   tol: Tolerances = Tolerances()) -> StratumSample:
    """Project random nearby guesses onto the singular set and record the
    largest stratum order each projected point still belongs to.

    The sampling radius is halved (up to 4 times) when the bordered solve
    leaves its validity neighbourhood.
    """
    rng = np.random.default_rng(seed)
    pts, hs, res = [], [], []
    for _ in range(count):
        r = radius
        for _attempt in range(5):
            guess = np.asarray(u0, dtype=float) + r * rng.standard_normal(model.n)
            try:
                pt = project_to_singular(model, guess, pair, tol=tol)
                break
            except (SingularBorder, NoConvergence, DegenerateGradient):
                r *= 0.5
        else:
            continue
        pf = PointFunctionals(model, pair, pt, tol.rank)
        vals = [abs(pf.J(j)) for j in range(h_max)]
        scale = max(1.0, max(vals))
        h = 0
        for v in vals:
            if v <= tol.zero * scale:
                h += 1
            else:
                break
        pts.append(pt)
        hs.append(h)
        res.append(abs(pf.J(0)))
    return StratumSample(points=pts, h_membership=hs, residuals=res, seed=seed)
