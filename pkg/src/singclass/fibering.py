"""Smooth kernel/cokernel fields near a simple singularity and the scalar
functionals built from them.

A pair (phi, psi) assigns to every point u near a base singularity a vector
phi(u) and a covector psi(u) that span the kernel and the range-complement
of F'(u) wherever the derivative drops rank.  The bordered construction
freezes one kernel and one cokernel representative at the base point and
solves

    [[F'(u), b], [c^T, 0]] (phi, s) = (0, 1)

which is regular on a neighbourhood, so phi and psi inherit the smoothness
of F' and are exactly jet-differentiable through the solve.

From the pair, the scalar J0(u) = psi(u) F'(u) phi(u) and its iterated
derivatives along phi (rows I_k = grad J_{k-1}, values J_k = I_k phi) are
the data every classification decision consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import jets, linalg
from .errors import DepthCapExceeded, NotSimple, OrderExceedsSmoothness, VanishingScale
from .jets import Jet
from .model import AffinePair, MapModel, conjugate

_ROW_BATCH_BUDGET = 1 << 20  # floats per jet intermediate when batching probes


@dataclass(frozen=True)
class FunctionalsRecord:
    J: list[float]
    I: list[np.ndarray]
    at: np.ndarray
    pair_id: str
    k_max: int


class PairBase:
    pair_id = "pair"
    base_point: np.ndarray

    def prepare(self, pf: "PointFunctionals") -> None:
        pass

    def phi(self, pf: "PointFunctionals", x, Fp):
        raise NotImplementedError

    def psi(self, pf: "PointFunctionals", x, Fp):
        raise NotImplementedError


@dataclass(frozen=True)
class FiberingPair(PairBase):
    """Bordered-system pair with border data frozen at the base point."""

    base_point: np.ndarray
    border_b: np.ndarray
    border_c: np.ndarray
    phi_scale: float = 1.0
    psi_scale: float = 1.0

    @property
    def pair_id(self) -> str:
        return f"bordered(phi_scale={self.phi_scale:g},psi_scale={self.psi_scale:g})"

    def prepare(self, pf: "PointFunctionals") -> None:
        pf.border_lu = linalg.border_factor(pf.Fp0, self.border_b, self.border_c, pf.tol)

    def phi(self, pf, x, Fp):
        n = self.border_b.shape[0]
        zero = np.zeros(n)
        sol, _ = linalg.bordered_solve(
            Fp, self.border_b, self.border_c, (zero, 1.0), pf.tol, lu_piv=pf.border_lu
        )
        return sol * self.phi_scale

    def psi(self, pf, x, Fp):
        n = self.border_b.shape[0]
        zero = np.zeros(n)
        sol, _ = linalg.bordered_solve(
            jets.transpose_mat(Fp), self.border_c, self.border_b, (zero, 1.0),
            pf.tol, lu_piv=pf.border_lu, trans=1,
        )
        return sol * self.psi_scale

    def with_normalization(self, phi_scale: float, psi_scale: float) -> "FiberingPair":
        return FiberingPair(self.base_point, self.border_b, self.border_c, phi_scale, psi_scale)


@dataclass(frozen=True)
class ScaleSpec:
    """Scalar field c * (1 + (u - center)^T Q (u - center)), bounded away from 0."""

    value: float
    quad: np.ndarray | None = None
    center: np.ndarray | None = None

    def __call__(self, x):
        if self.quad is None:
            return float(self.value)
        dx = x - self.center
        qd = jets.matvec(self.quad, dx)
        s = (dx * qd).vsum() if isinstance(dx, Jet) else float(np.dot(np.asarray(dx), qd))
        return (s + 1.0) * self.value

    def validate(self, radius: float = 0.5) -> None:
        if abs(self.value) < 1e-6:
            raise VanishingScale("constant factor too close to zero")
        if self.quad is not None:
            norm = float(np.linalg.norm(self.quad, 2))
            if norm * radius * radius >= 0.9:
                raise VanishingScale("quadratic term may vanish on the working neighbourhood")

    def describe(self) -> str:
        if self.quad is None:
            return f"const({self.value:g})"
        return f"quad({self.value:g})"


@dataclass(frozen=True)
class RescaledPair(PairBase):
    inner: PairBase
    alpha: ScaleSpec
    beta: ScaleSpec

    @property
    def base_point(self):
        return self.inner.base_point

    @property
    def pair_id(self) -> str:
        return f"rescaled({self.alpha.describe()},{self.beta.describe()})<-{self.inner.pair_id}"

    def prepare(self, pf):
        self.inner.prepare(pf)

    def phi(self, pf, x, Fp):
        return self.inner.phi(pf, x, Fp) * self.alpha(x)

    def psi(self, pf, x, Fp):
        return self.inner.psi(pf, x, Fp) * self.beta(x)


@dataclass(frozen=True)
class ExplicitPair(PairBase):
    """Pair given by closed-form jet-evaluable fields (used for replication tests)."""

    base_point: np.ndarray
    phi_fn: Callable
    psi_fn: Callable
    label: str = "explicit"

    @property
    def pair_id(self) -> str:
        return self.label

    def phi(self, pf, x, Fp):
        return self.phi_fn(x)

    def psi(self, pf, x, Fp):
        return self.psi_fn(x)


class TransformedPair(PairBase):
    """Push-forward of a pair under an affine change of coordinates.

    For gamma(u) = A u + a and delta(y) = B y + b the transformed fields are
    phi~(x) = A phi(gamma^{-1} x) and psi~(x) = B^{-T} psi(gamma^{-1} x); the
    scalar functionals of the transformed pair at gamma(u) then reproduce the
    originals at u exactly.
    """

    def __init__(self, inner: PairBase, affine: AffinePair, inner_model: MapModel):
        self.inner = inner
        self.affine = affine
        self.inner_model = inner_model
        self._binv_t = np.linalg.inv(affine.delta_mat).T
        self.base_point = np.asarray(affine.apply_gamma(inner.base_point), dtype=float)

    @property
    def pair_id(self) -> str:
        return f"transformed<-{self.inner.pair_id}"

    def prepare(self, pf):
        u_in = self.affine.apply_gamma_inv(pf.u)
        pf.inner_pf = PointFunctionals(self.inner_model, self.inner, u_in, pf.tol)

    def phi(self, pf, x, Fp):
        u_in = self.affine.apply_gamma_inv(x)
        Fp_in = jets.jacobian(self.inner_model, u_in)
        ph = self.inner.phi(pf.inner_pf, u_in, Fp_in)
        return jets.matvec(self.affine.gamma_mat, ph)

    def psi(self, pf, x, Fp):
        u_in = self.affine.apply_gamma_inv(x)
        Fp_in = jets.jacobian(self.inner_model, u_in)
        ps = self.inner.psi(pf.inner_pf, u_in, Fp_in)
        return jets.matvec(self._binv_t, ps)


class PointFunctionals:
    """Fibering functionals of one (model, pair) anchored at one point.

    Rows I_k are gradients of J_{k-1}: each component is one nested-jet
    evaluation with a probe direction (probes are batched through a leading
    value axis), and J_k = I_k . phi(u).
    """

    def __init__(self, model: MapModel, pair: PairBase, u, tol: float = linalg.DEFAULT_RANK_TOL):
        self.model = model
        self.pair = pair
        self.u = np.asarray(u, dtype=float)
        self.tol = tol
        self.Fp0 = jets.jacobian(model, self.u)
        pair.prepare(self)
        self.phi0 = np.asarray(pair.phi(self, self.u, self.Fp0), dtype=float)
        self.psi0 = np.asarray(pair.psi(self, self.u, self.Fp0), dtype=float)
        self._rows: dict[int, np.ndarray] = {}
        self._J: dict[int, float] = {}

    # -- scalar J0 at an arbitrary (jet) point --------------------------------

    def j0_at(self, x):
        Fp = jets.jacobian(self.model, x)
        ph = self.pair.phi(self, x, Fp)
        ps = self.pair.psi(self, x, Fp)
        if isinstance(x, Jet):
            return (ps * linalg._matvec_jet_mat(Fp, ph)).vsum()
        return float(np.dot(ps, Fp @ ph))

    def _phi_field(self, x):
        Fp = jets.jacobian(self.model, x)
        return self.pair.phi(self, x, Fp)

    # -- rows and values -------------------------------------------------------

    def J(self, k: int) -> float:
        if k not in self._J:
            if k == 0:
                self._J[0] = float(np.dot(self.psi0, self.Fp0 @ self.phi0))
            else:
                self._J[k] = float(np.dot(self.row(k), self.phi0))
        return self._J[k]

    def row(self, k: int) -> np.ndarray:
        """I_k(u) as a length-n row vector (gradient of J_{k-1})."""
        if k in self._rows:
            return self._rows[k]
        if k > jets.NESTING_CAP:
            raise DepthCapExceeded(f"row {k} needs nesting depth beyond {jets.NESTING_CAP}")
        if k > self.model.d - 1:
            raise OrderExceedsSmoothness(f"row {k} undefined for smoothness {self.model.d}")
        n = self.model.n
        depth = k - 1
        names = [jets.fresh_name("grad")] + [jets.fresh_name("lie") for _ in range(depth)]
        orders = (1,) * len(names)
        chunk = max(1, _ROW_BATCH_BUDGET // (n * n * 2 ** (len(names) + 1)))
        out = np.zeros(n)
        eye = np.eye(n)
        for start in range(0, n, chunk):
            basis = eye[start : start + chunk]
            x = jets.constant(np.broadcast_to(self.u, basis.shape).copy(), names, orders)
            x = x + jets.unit(names, orders, names[0]) * basis
            for name in names[1:]:
                x = x + jets.unit(names, orders, name) * self._phi_field(x)
            val = self.j0_at(x)
            out[start : start + chunk] = np.atleast_1d(
                val.extract({name: 1 for name in names})
            )
        self._rows[k] = out
        return out

    def lie_J(self, k: int) -> float:
        """J_k recomputed as a depth-k nested Lie derivative (cross-check route)."""
        return float(jets.lie_value(self.j0_at, self._phi_field, self.u, k))


def make_fibering_pair(model: MapModel, u0, tol: float = linalg.DEFAULT_RANK_TOL) -> FiberingPair:
    """Bordered pair at a simple singularity: b spans the cokernel, c the kernel."""
    u0 = np.asarray(u0, dtype=float)
    A = jets.jacobian(model, u0)
    kdim, kernel, left = linalg.kernel_cokernel(A, tol)
    if kdim != 1:
        raise NotSimple(f"kernel dimension is {kdim}, expected 1")
    return FiberingPair(u0, left[0], kernel[0])


def rescale_pair(pair: PairBase, alpha_spec: ScaleSpec, beta_spec: ScaleSpec) -> RescaledPair:
    alpha_spec.validate()
    beta_spec.validate()
    return RescaledPair(pair, alpha_spec, beta_spec)


def pair_transform(pair: PairBase, affine: AffinePair, model: MapModel,
                   transformed_model: MapModel | None = None) -> TransformedPair:
    if transformed_model is None:
        transformed_model = conjugate(model, affine)
    if transformed_model.n != model.n:
        raise ValueError("dimension mismatch between models")
    return TransformedPair(pair, affine, model)


def fibering_functionals(model: MapModel, pair: PairBase, u, k_max: int,
                         tol: float = linalg.DEFAULT_RANK_TOL) -> FunctionalsRecord:
    if k_max > min(model.d - 1, jets.NESTING_CAP):
        raise DepthCapExceeded(
            f"k_max {k_max} exceeds min(d - 1, {jets.NESTING_CAP}) = {min(model.d - 1, jets.NESTING_CAP)}"
        )
    pf = PointFunctionals(model, pair, u, tol)
    J = [pf.J(k) for k in range(k_max + 1)]
    I = [pf.row(k) for k in range(1, k_max + 1)]
    return FunctionalsRecord(J=J, I=I, at=pf.u, pair_id=pair.pair_id, k_max=k_max)
