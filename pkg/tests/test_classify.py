import numpy as np
import pytest

from singclass import jets
from singclass.classify import (
    INDETERMINATE,
    K_SINGULARITY,
    MAXIMAL_K_TRANSVERSE,
    NON_SIMPLE,
    NOT_ONE_TRANSVERSE,
    REGULAR,
    TRANSVERSE_UP_TO_CAP,
    Tolerances,
    classify_point,
    transversality_order,
)
from singclass.gallery import gallery_map
from singclass.model import SMOOTH, MapModel


class TestKinds:
    def test_regular(self):
        c = classify_point(gallery_map("fold_t2").model, [1.0, 0.0])
        assert c.kind == REGULAR and transversality_order(c) == 0

    def test_non_simple_refused(self):
        def ev(x):
            return jets.stack([jets.powi(jets.comp(x, 0), 2), jets.powi(jets.comp(x, 1), 2)])

        dd = MapModel(2, SMOOTH, ev, "dd")
        c = classify_point(dd, [0.0, 0.0])
        assert c.kind == NON_SIMPLE and c.kdim == 2
        assert not c.evidence.routes  # no functional analysis attempted

    def test_whitney4_is_order_four(self):
        model = gallery_map("whitney", {"k": 4, "dimZ": 0}).model
        c = classify_point(model, np.zeros(4), k_cap=6)
        assert (c.kind, c.k) == (K_SINGULARITY, 4)
        assert transversality_order(c) == 4

    def test_family_maximal_three(self):
        model = gallery_map("family_kn", {"k": 3, "n": 0, "dimZ": 0}).model
        c = classify_point(model, np.zeros(4))
        assert (c.kind, c.k) == (MAXIMAL_K_TRANSVERSE, 3)
        assert transversality_order(c) == 3

    def test_cubic_head_not_one_transverse(self):
        c = classify_point(gallery_map("cusp_source_t3").model, np.zeros(2))
        assert c.kind == NOT_ONE_TRANSVERSE and transversality_order(c) == 0

    def test_cap_reached(self):
        model = gallery_map("l2_truncated", {"N": 4}).model
        c = classify_point(model, np.zeros(5), k_cap=3)
        assert (c.kind, c.k) == (TRANSVERSE_UP_TO_CAP, 3)
        assert transversality_order(c) == 3

    def test_k_cap_validation(self):
        with pytest.raises(ValueError):
            classify_point(gallery_map("fold_t2").model, [0.0, 0.0], k_cap=9)


class TestHysteresis:
    def test_borderline_fold_is_flagged(self):
        """A barely-perturbed degenerate fold lands inside the zero/nonzero
        band and must be reported Indeterminate, not guessed."""
        model = gallery_map("eps_perturbed", {"eps": 5e-5}).model
        c = classify_point(model, [0.0, 0.0], route="fibering")
        assert c.kind == INDETERMINATE
        assert c.stage == "J_1"

    def test_band_boundaries_follow_tolerances(self):
        model = gallery_map("eps_perturbed", {"eps": 5e-5}).model
        wide = Tolerances(zero=1e-3, nonzero=1e-2)  # 5e-5 now counts as zero
        c = classify_point(model, [0.0, 0.0], tol=wide, route="fibering")
        assert c.kind == MAXIMAL_K_TRANSVERSE
        tight = Tolerances(zero=1e-8, nonzero=1e-6)  # now decisively nonzero
        c = classify_point(model, [0.0, 0.0], tol=tight, route="fibering")
        assert (c.kind, c.k) == (K_SINGULARITY, 1)

    def test_tolerances_validated(self):
        with pytest.raises(ValueError):
            Tolerances(zero=1e-3, nonzero=1e-3)


class TestTrichotomy:
    def test_exactly_one_kind_on_gallery(self):
        cases = [
            ("fold_t2", {}, 2),
            ("whitney", {"k": 2, "dimZ": 0}, 2),
            ("whitney", {"k": 5, "dimZ": 0}, 5),
            ("family_kn", {"k": 1, "n": 0, "dimZ": 0}, 2),
            ("family_kn", {"k": 2, "n": 4, "dimZ": 0}, 3),
            ("l2_truncated", {"N": 3}, 4),
        ]
        for name, params, n in cases:
            c = classify_point(gallery_map(name, params).model, np.zeros(n))
            assert c.transversality_order >= 1
            assert c.kind in (K_SINGULARITY, MAXIMAL_K_TRANSVERSE)

    def test_ordinary_singularity_is_transverse_to_its_order(self):
        for k in (1, 2, 3, 4):
            model = gallery_map("whitney", {"k": k, "dimZ": 0}).model
            c = classify_point(model, np.zeros(max(k, 1)))
            assert (c.kind, c.k) == (K_SINGULARITY, k)
            assert c.transversality_order == k
            fib = next(r for r in c.evidence.routes if r.route == "fibering")
            assert len(fib.singular_values[k]) == k if k in fib.singular_values else True

    def test_report_reproducible(self):
        model = gallery_map("whitney", {"k": 3, "dimZ": 1}).model
        a = classify_point(model, np.zeros(4))
        b = classify_point(model, np.zeros(4))
        assert a.describe() == b.describe()
        for ra, rb in zip(a.evidence.routes, b.evidence.routes):
            assert ra.J_values == rb.J_values
            assert ra.singular_values == rb.singular_values


class TestRoutes:
    def test_single_routes_match_both(self):
        model = gallery_map("family_kn", {"k": 2, "n": 3, "dimZ": 0}).model
        u = np.zeros(3)
        both = classify_point(model, u, route="both")
        fib = classify_point(model, u, route="fibering")
        ls = classify_point(model, u, route="ls")
        assert both.same_kind(fib) and both.same_kind(ls)

    def test_unknown_route(self):
        with pytest.raises(ValueError):
            classify_point(gallery_map("fold_t2").model, [0.0, 0.0], route="magic")


class TestAffineInvarianceOfOrder:
    def test_whitney3_keeps_order_under_random_affine(self):
        from singclass.model import conjugate, random_affine_pair

        model = gallery_map("whitney", {"k": 3, "dimZ": 0}).model
        base = classify_point(model, np.zeros(3))
        rng = np.random.default_rng(21)
        for _ in range(5):
            affine = random_affine_pair(3, rng)
            moved = conjugate(model, affine)
            c = classify_point(moved, np.asarray(affine.apply_gamma(np.zeros(3))), route="fibering")
            assert c.same_kind(base) and (c.kind, c.k) == (K_SINGULARITY, 3)
