"""Unit tests for lifts, component signs, paths, and reduced-order search."""

import numpy as np
import pytest

from conftest import BOTH_DOMAINS, random_plant, random_stabilizing
from lqglandscape import (
    NoPathFound,
    Sign,
    component_sign,
    get_example,
    is_stabilizing,
    lift,
    path_between,
    realize,
    reduced_order_search,
    similarity,
    transform_lift,
    verify_lift,
)


class TestLiftRealize:
    @pytest.mark.parametrize("domain", BOTH_DOMAINS)
    def test_round_trip(self, domain):
        rng = np.random.default_rng(81)
        for _ in range(5):
            plant = random_plant(rng, int(rng.integers(1, 4)), 1, 1, domain)
            K = random_stabilizing(rng, plant)
            Z = lift(plant, K)
            K_back = realize(plant, Z)
            scale = 1 + np.abs(K.as_matrix()).max()
            assert np.abs(K_back.as_matrix() - K.as_matrix()).max() <= \
                1e-8 * scale

    def test_verify_lift_reports_margins(self):
        ex = get_example("ex3.3")
        Z = lift(ex.plant, ex.controllers["k+"])
        report = verify_lift(ex.plant, Z)
        assert report["coupling"] <= 1e-9
        assert report["open_pd"] > 0
        assert report["lmi"] > 0
        assert report["pi_min_sv"] > 0

    def test_transform_flip_changes_sign(self):
        rng = np.random.default_rng(83)
        plant = random_plant(rng, 2, 1, 1)
        K = random_stabilizing(rng, plant)
        Z = lift(plant, K)
        T_flip = np.diag([1.0, -1.0])
        Z_flip = transform_lift(Z, T_flip)
        s0 = np.sign(np.linalg.det(Z.Pi))
        s1 = np.sign(np.linalg.det(Z_flip.Pi))
        assert s0 == -s1
        # The flipped lift realizes a similarity-equivalent controller.
        K_flip = realize(plant, Z_flip)
        assert is_stabilizing(plant, K_flip).stable
        scale = 1 + np.abs(K.as_matrix()).max()
        expected = similarity(T_flip, K)
        assert np.abs(K_flip.as_matrix() - expected.as_matrix()).max() <= \
            1e-6 * scale


class TestComponentSign:
    def test_similarity_invariance_and_flip(self):
        rng = np.random.default_rng(87)
        plant = random_plant(rng, 2, 1, 1)
        K = random_stabilizing(rng, plant)
        s = component_sign(plant, K)
        T_pos = np.array([[2.0, 0.3], [0.1, 1.5]])  # det > 0
        assert component_sign(plant, similarity(T_pos, K)) 	is s
        T_neg = np.diag([1.0, -1.0])  # det < 0
        assert component_sign(plant, similarity(T_neg, K)) is not s

    def test_known_two_component_examples(self):
        for name in ("ex3.2", "exD.1"):
            ex = get_example(name)
            s_plus = component_sign(ex.plant, ex.controllers["k+"])
            s_minus = component_sign(ex.plant, ex.controllers["k-"])
            assert {s_plus, s_minus} == {Sign.PLUS, Sign.MINUS}


class TestPathBetween:
    def test_connected_pair(self):
        ex = get_example("ex3.3")
        k_plus, k_minus = ex.controllers["k+"], ex.controllers["k-"]
        path = path_between(ex.plant, k_plus, k_minus, steps=40)
        assert len(path) == 41
        assert all(is_stabilizing(ex.plant, K).stable for K in path)
        assert np.array_equal(path[0].as_matrix(), k_plus.as_matrix())
        assert np.array_equal(path[-1].as_matrix(), k_minus.as_matrix())

    def test_same_component_small_move(self):
        rng = np.random.default_rng(91)
        plant = random_plant(rng, 2, 1, 1)
        K0 = random_stabilizing(rng, plant)
        K1 = random_stabilizing(rng, plant)
        if component_sign(plant, K0) is not component_sign(plant, K1):
            K1 = similarity(np.diag([1.0, -1.0]), K1)
        path = path_between(plant, K0, K1, steps=30)
        assert all(is_stabilizing(plant, K).stable for K in path)

    def test_opposite_components_need_bridge(self):
        ex = get_example("ex3.2")
        with pytest.raises(NoPathFound):
            path_between(ex.plant, ex.controllers["k+"],
                         ex.controllers["k-"], steps=30)

    def test_discrete_opposite_components(self):
        ex = get_example("exD.1")
        with pytest.raises(NoPathFound):
            path_between(ex.plant, ex.controllers["k+"],
                         ex.controllers["k-"], steps=30)

    def test_bridge_routes_between_orientations(self):
        # On a connected stabilizing set, two orientations of the same
        # controller are joined through a reduced-order junction.
        ex = get_example("ex3.3")
        K0 = ex.controllers["k+"]
        K1 = similarity(np.array([[-1.0]]), K0)
        bridge = reduced_order_search(ex.plant, 0)
        assert bridge is not None
        path = path_between(ex.plant, K0, K1, steps=30, bridge=bridge)
        assert all(is_stabilizing(ex.plant, K).stable for K in path)
        assert np.array_equal(path[0].as_matrix(), K0.as_matrix())
        assert np.array_equal(path[-1].as_matrix(), K1.as_matrix())

    def test_validation(self):
        ex = get_example("ex3.3")
        with pytest.raises(ValueError):
            path_between(ex.plant, ex.controllers["k+"],
                         ex.controllers["k-"], steps=0)


class TestReducedOrderSearch:
    def test_stable_plant_order_zero(self):
        ex = get_example("ex3.3")
        K = reduced_order_search(ex.plant, 0)
        assert K is not None and K.order == 0
        assert is_stabilizing(ex.plant, K).stable

    def test_unstable_plant_order_zero_none(self):
        ex = get_example("exB.3")
        assert reduced_order_search(ex.plant, 0) is None

    def test_empty_order_one_set(self):
        ex = get_example("exB.3")
        assert reduced_order_search(ex.plant, 1, budget=20_000,
                                    seed=0) is None

    def test_finds_order_two(self):
        ex = get_example("exB.3")
        K = reduced_order_search(ex.plant, 2, budget=50_000, seed=0)
        assert K is not None
        rep = is_stabilizing(ex.plant, K)
        assert rep.stable and rep.margin < -1e-8

    def test_discrete_search(self):
        ex = get_example("exD.1")
        K = reduced_order_search(ex.plant, 1, budget=20_000, seed=1)
        assert K is not None
        assert is_stabilizing(ex.plant, K).stable
