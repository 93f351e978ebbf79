"""Decision procedure for the type of a simple singularity.

For k = 1, 2, ... the loop maintains the largest k whose transversality
evidence holds (J_0 .. J_{k-1} all numerically zero and the rows I_1 .. I_k
of full rank), then stops at the first decisive event: J_k clearly nonzero
(ordinary k-singularity), I_{k+1} dependent while J_k vanishes (maximal
k-transverse), a vanishing first row (not 1-transverse), or the order cap.

Zero tests use a hysteresis band: |J| <= tol_zero * S counts as zero and
|J| >= tol_nonzero * S as nonzero, with S the largest |J| seen so far
(floored at 1); values inside the band make the verdict Indeterminate
rather than silently picking a side.  Both evaluation routes (the pair
functionals on the original coordinates and the reduced-scalar derivatives)
run by default and must agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import jets, linalg
from .errors import DepthCapExceeded
from .fibering import PairBase, PointFunctionals, make_fibering_pair
from .lsreduce import LSModel, canonical_functionals, local_representation
from .model import MapModel

REGULAR = "Regular"
NON_SIMPLE = "NonSimpleKernel"
NOT_ONE_TRANSVERSE = "NotOneTransverse"
K_SINGULARITY = "KSingularity"
MAXIMAL_K_TRANSVERSE = "MaximalKTransverse"
TRANSVERSE_UP_TO_CAP = "TransverseUpToCap"
INDETERMINATE = "Indeterminate"

K_CAP_MAX = 8


@dataclass(frozen=True)
class Tolerances:
    rank: float = 1e-8
    zero: float = 1e-6
    nonzero: float = 1e-3

    def __post_init__(self):
        if min(self.rank, self.zero, self.nonzero) <= 0:
            raise ValueError("tolerances must be positive")
        if self.zero >= self.nonzero:
            raise ValueError("tol_zero must be strictly below tol_nonzero")


@dataclass
class RouteEvidence:
    route: str
    pair_id: str
    J_values: list[float] = field(default_factory=list)
    singular_values: dict[int, list[float]] = field(default_factory=dict)
    kind: str = INDETERMINATE
    k: int | None = None
    transversality_order: int = 0
    stage: str | None = None


@dataclass
class ClassificationReport:
    point: np.ndarray
    kdim: int
    jacobian_singular_values: list[float]
    tolerances: Tolerances
    route: str
    routes: list[RouteEvidence]
    route_agreement: bool | None = None
    projected: bool = False


@dataclass
class Classification:
    kind: str
    k: int | None
    kdim: int
    transversality_order: int
    stage: str | None
    evidence: ClassificationReport

    def describe(self) -> str:
        if self.kind in (K_SINGULARITY, MAXIMAL_K_TRANSVERSE, TRANSVERSE_UP_TO_CAP):
            return f"{self.kind}({self.k})"
        if self.kind == NON_SIMPLE:
            return f"{self.kind}({self.kdim})"
        if self.kind == INDETERMINATE and self.stage:
            return f"{self.kind}[{self.stage}]"
        return self.kind

    def same_kind(self, other: "Classification") -> bool:
        return self.kind == other.kind and self.k == other.k


class _FiberingProvider:
    route = "fibering"

    def __init__(self, model: MapModel, pair: PairBase, u, tol: Tolerances):
        self.pf = PointFunctionals(model, pair, u, tol.rank)
        self.pair_id = pair.pair_id

    def J(self, k: int) -> float:
        return self.pf.J(k)

    def row(self, k: int) -> np.ndarray:
        return self.pf.row(k)


class _LSProvider:
    route = "ls"

    def __init__(self, ls: LSModel, tol: Tolerances):
        self.ls = ls
        self.pair_id = "canonical-ls"
        self._record = None
        self._k_max = -1

    def _ensure(self, k: int):
        if k > self._k_max:
            self._record = canonical_functionals(self.ls, k)
            self._k_max = k

    def J(self, k: int) -> float:
        self._ensure(k)
        return self._record.J[k]

    def row(self, k: int) -> np.ndarray:
        self._ensure(k)
        return self._record.I[k - 1]


def _zero_state(value: float, scale: float, tol: Tolerances) -> str:
    if abs(value) <= tol.zero * scale:
        return "zero"
    if abs(value) >= tol.nonzero * scale:
        return "nonzero"
    return "band"


def _run_route(provider, k_cap: int, d: int, tol: Tolerances) -> RouteEvidence:
    ev = RouteEvidence(route=provider.route, pair_id=provider.pair_id)

    def finish(kind, k, t_order, stage=None):
        ev.kind = kind
        ev.k = k
        ev.transversality_order = t_order
        ev.stage = stage
        return ev

    j0 = provider.J(0)
    ev.J_values.append(j0)
    scale = max(1.0, abs(j0))
    if _zero_state(j0, scale, tol) != "zero":
        return finish(INDETERMINATE, None, 0, "J_0")

    rows = [provider.row(1)]
    dec = linalg.rank_decision(np.array(rows), tol.rank)
    ev.singular_values[1] = list(dec.singular_values)
    if dec.rank == 0:
        return finish(NOT_ONE_TRANSVERSE, None, 0)

    k = 1
    while True:
        jk = provider.J(k)
        ev.J_values.append(jk)
        scale = max(scale, abs(jk))
        state = _zero_state(jk, scale, tol)
        if state == "nonzero":
            return finish(K_SINGULARITY, k, k)
        if state == "band":
            return finish(INDETERMINATE, None, k, f"J_{k}")
        if k >= k_cap:
            return finish(TRANSVERSE_UP_TO_CAP, k_cap, k_cap)
        if k + 1 > d - 1:
            return finish(MAXIMAL_K_TRANSVERSE, k, k)
        try:
            rows.append(provider.row(k + 1))
        except DepthCapExceeded:
            return finish(TRANSVERSE_UP_TO_CAP, k, k)
        dec = linalg.rank_decision(np.array(rows), tol.rank)
        ev.singular_values[k + 1] = list(dec.singular_values)
        if dec.rank == k:
            return finish(MAXIMAL_K_TRANSVERSE, k, k)
        if dec.rank == k + 1:
            k += 1
            continue
        return finish(INDETERMINATE, None, k, f"rank_I{k + 1}")


def classify_point(
    model: MapModel,
    u,
    k_cap: int = 6,
    tol: Tolerances = Tolerances(),
    route: str = "both",
    pair: PairBase | None = None,
) -> Classification:
    """Classify the point u of the given map.

    ``route`` is one of ``fibering``, ``ls`` or ``both``; with ``both`` the
    two routes must agree on the kind, otherwise the verdict is
    Indeterminate with both evidence trails attached.  A custom ``pair``
    replaces the default bordered pair on the fibering route.
    """
    if route not in ("fibering", "ls", "both"):
        raise ValueError(f"unknown route {route!r}")
    if not 1 <= k_cap <= K_CAP_MAX:
        raise ValueError(f"k_cap must be between 1 and {K_CAP_MAX}")
    u = np.asarray(u, dtype=float)
    A = jets.jacobian(model, u)
    sv = np.linalg.svd(A, compute_uv=False)
    kdim, _, _ = linalg.kernel_cokernel(A, tol.rank)
    report = ClassificationReport(
        point=u,
        kdim=kdim,
        jacobian_singular_values=[float(s) for s in sv],
        tolerances=tol,
        route=route,
        routes=[],
    )
    if kdim == 0:
        return Classification(REGULAR, None, 0, 0, None, report)
    if kdim >= 2:
        return Classification(NON_SIMPLE, kdim, kdim, 0, None, report)

    providers = []
    if route in ("fibering", "both"):
        providers.append(
            _FiberingProvider(model, pair if pair is not None else make_fibering_pair(model, u, tol.rank), u, tol)
        )
    if route in ("ls", "both"):
        providers.append(_LSProvider(local_representation(model, u, tol.rank), tol))

    for provider in providers:
        report.routes.append(_run_route(provider, min(k_cap, model.d - 1), model.d, tol))

    if len(report.routes) == 2:
        a, b = report.routes
        report.route_agreement = (a.kind == b.kind and a.k == b.k)
        if not report.route_agreement:
            t_order = min(a.transversality_order, b.transversality_order)
            return Classification(INDETERMINATE, None, 1, t_order, "route-disagreement", report)
    ev = report.routes[0]
    return Classification(ev.kind, ev.k, 1, ev.transversality_order, ev.stage, report)


def transversality_order(result: Classification) -> int:
    """Largest order whose transversality evidence passed (0 when not 1-transverse)."""
    return result.transversality_order
