"""Unit tests for cost, gradient, Hessian, and restricted spectrum."""

import numpy as np
import pytest

from conftest import BOTH_DOMAINS, random_direction, random_plant, \
    random_stabilizing
from lqglandscape import (
    NonMinimalController,
    NotStabilizing,
    NotStationary,
    canonical_form,
    get_example,
    hessian_bilinear,
    hessian_matrix,
    hessian_quadratic_form,
    lqg_cost,
    lqg_gradient,
    perturb,
    restricted_rcond,
    riccati_controller,
)


class TestCost:
    def test_known_scalar_value(self):
        from lqglandscape import Controller
        ex = get_example("ex4.2")
        K = Controller(A_K=np.array([[-2.0]]), B_K=np.array([[1.0]]),
                       C_K=np.array([[-1.0]]))
        assert lqg_cost(ex.plant, K).J == pytest.approx(13.0 / 18.0,
                                                        abs=1e-12)

    def test_doyle_optimal_value(self):
        ex = get_example("doyle")
        assert lqg_cost(ex.plant, ex.controllers["optimum"]).J == \
            pytest.approx(750.0, abs=1e-9)

    def test_rejects_destabilizing_controller(self):
        ex = get_example("ex3.2")
        with pytest.raises(NotStabilizing):
            lqg_cost(ex.plant, ex.controllers["midpoint"])

    @pytest.mark.parametrize("domain", BOTH_DOMAINS)
    def test_trace_gap_and_blocks(self, domain):
        rng = np.random.default_rng(31)
        plant = random_plant(rng, 3, 2, 2, domain)
        K = random_stabilizing(rng, plant)
        ce = lqg_cost(plant, K)
        assert ce.trace_gap <= 1e-9 * (1 + abs(ce.J))
        n, q = plant.n, K.order
        assert ce.X.shape == (n + q, n + q)
        assert np.array_equal(ce.X11, ce.X[:n, :n])
        assert np.array_equal(ce.Y22, ce.Y[n:, n:])
        # Both accumulators are positive semidefinite by construction.
        assert np.min(np.linalg.eigvalsh(ce.X)) >= -1e-10 * (
            1 + np.abs(ce.X).max())
        assert np.min(np.linalg.eigvalsh(ce.Y)) >= -1e-10 * (
            1 + np.abs(ce.Y).max())

    def test_refuses_unreliable_lyapunov_solutions(self):
        # A stable (spectral radius ~0.88) but severely non-normal discrete
        # loop: the Stein solutions have norms near 1e14, the solve error
        # swamps them, and the two trace routes land ~2x apart.  The
        # evaluation must be refused, not returned as a garbage number.
        from lqglandscape import Controller, IllConditioned, Plant, \
            TimeDomain, closed_loop, is_stabilizing
        plant = Plant(
            A=np.array([
                [-1.56977683381902566, -0.23809274276378406,
                 -0.48736414236353870],
                [0.57368236069460010, 0.48762817345082865,
                 0.33203143483527015],
                [0.89016799135529678, -0.56239766249479295,
                 -0.71783996350979296]]),
            B=np.array([[0.00712078930345926], [-1.21987922072604649],
                        [0.85212087454992336]]),
            C=np.array([[0.7525288600729056, 1.7894656703795344,
                         -0.4112531828587016]]),
            W=np.array([
                [5.5735549715133326, -5.9779370923597233,
                 -3.2399933946591264],
                [-5.9779370923597233, 9.9464866632648050,
                 0.8453673617299223],
                [-3.2399933946591264, 0.8453673617299223,
                 4.5834342378187989]]),
            V=np.array([[1.696277821030041]]),
            Q=np.array([
                [3.93229603234544678, 0.05944514153850763,
                 -2.09329060616652951],
                [0.05944514153850763, 0.88191711607412104,
                 0.46319764826397108],
                [-2.09329060616652951, 0.46319764826397108,
                 5.50294354990495460]]),
            R=np.array([[0.17412521771810063]]),
            domain=TimeDomain.DISCRETE,
        )
        K = Controller(
            A_K=np.array([
                [4.8831477839015482, 14.3988828936374542,
                 -3.7426851893429864],
                [-55.5704777841527502, -11.7873557339956925,
                 -15.4401303491680117],
                [34.9427819814118763, -4.2716810423547722,
                 13.1225013837980544]]),
            B_K=np.array([[-8.1525471923681145], [2.2382886179036374],
                          [5.3009500234519473]]),
            C_K=np.array([[44.643586379222725, 6.779067242726530,
                           13.683867073608676]]),
        )
        assert is_stabilizing(plant, K).stable
        radius = np.max(np.abs(np.linalg.eigvals(closed_loop(plant, K))))
        assert radius < 0.9
        with pytest.raises(IllConditioned, match="trace routes disagree"):
            lqg_cost(plant, K)


class TestGradient:
    @pytest.mark.parametrize("domain", BOTH_DOMAINS)
    def test_zero_at_optimum(self, domain):
        rng = np.random.default_rng(41)
        plant = random_plant(rng, 2, 1, 1, domain)
        K, _ = riccati_controller(plant)
        assert lqg_gradient(plant, K).norm() <= 1e-7

    @pytest.mark.parametrize("domain", BOTH_DOMAINS)
    def test_finite_difference(self, domain):
        rng = np.random.default_rng(43)
        for _ in range(5):
            plant = random_plant(rng, int(rng.integers(1, 4)), 1, 1, domain)
            K = random_stabilizing(rng, plant)
            grad = lqg_gradient(plant, K)
            g_vec = grad.as_direction().to_vector()
            d = random_direction(rng, K.order, K.p, K.m)
            h = 1e-6
            Jp = lqg_cost(plant, perturb(K, d, h)).J
            Jm = lqg_cost(plant, perturb(K, d, -h)).J
            fd = (Jp - Jm) / (2 * h)
            predicted = float(g_vec @ d.to_vector())
            assert abs(fd - predicted) <= 1e-5 * (1 + abs(predicted))

    def test_gradient_reuses_cost_eval(self):
        ex = get_example("doyle")
        K = ex.controllers["gd_solution"]
        ce = lqg_cost(ex.plant, K)
        g1 = lqg_gradient(ex.plant, K)
        g2 = lqg_gradient(ex.plant, K, cost=ce)
        assert np.abs(g1.as_matrix() - g2.as_matrix()).max() == 0.0


class TestHessian:
    @pytest.mark.parametrize("domain", BOTH_DOMAINS)
    def test_quadratic_form_matches_matrix(self, domain):
        rng = np.random.default_rng(47)
        plant = random_plant(rng, 2, 1, 1, domain)
        K = random_stabilizing(rng, plant)
        H = hessian_matrix(plant, K)
        assert np.abs(H - H.T).max() <= 1e-8 * (1 + np.abs(H).max())
        for _ in range(3):
            d = random_direction(rng, K.order, K.p, K.m)
            v = d.to_vector()
            quad = hessian_quadratic_form(plant, K, d)
            assert abs(quad - float(v @ H @ v)) <= 1e-8 * (1 + abs(quad))

    def test_bilinear_symmetry_and_polarization(self):
        rng = np.random.default_rng(53)
        plant = random_plant(rng, 2, 1, 1)
        K = random_stabilizing(rng, plant)
        d1 = random_direction(rng, 2, 1, 1)
        d2 = random_direction(rng, 2, 1, 1)
        b12 = hessian_bilinear(plant, K, d1, d2)
        b21 = hessian_bilinear(plant, K, d2, d1)
        assert abs(b12 - b21) <= 1e-9 * (1 + abs(b12))
        polar = 0.25 * (hessian_quadratic_form(plant, K, d1 + d2)
                        - hessian_quadratic_form(plant, K, d1 - d2))
        assert abs(b12 - polar) <= 1e-9 * (1 + abs(b12))

    def test_second_difference(self):
        rng = np.random.default_rng(59)
        plant = random_plant(rng, 2, 1, 1)
        K = random_stabilizing(rng, plant)
        d = random_direction(rng, 2, 1, 1)
        quad = hessian_quadratic_form(plant, K, d)
        h = 1e-3
        J0 = lqg_cost(plant, K).J
        Jp = lqg_cost(plant, perturb(K, d, h)).J
        Jm = lqg_cost(plant, perturb(K, d, -h)).J
        fd = (Jp - 2 * J0 + Jm) / (h * h)
        assert abs(fd - quad) <= 1e-4 * (1 + abs(quad))

    def test_known_indefinite_spectrum(self):
        ex = get_example("ex4.2")
        H = hessian_matrix(ex.plant, ex.controllers["K*(-2)"])
        eigs = np.sort(np.linalg.eigvalsh(H))
        x = 1.0 / 6.0
        assert np.abs(eigs - np.array([-x, 0.0, x])).max() <= 1e-10


class TestRestrictedSpectrum:
    def test_requires_stationary_point(self):
        rng = np.random.default_rng(61)
        plant = random_plant(rng, 2, 1, 1)
        K = random_stabilizing(rng, plant)
        with pytest.raises(NotStationary):
            restricted_rcond(plant, K)

    def test_requires_minimal_controller(self):
        ex = get_example("ex4.2")
        with pytest.raises(NonMinimalController):
            restricted_rcond(ex.plant, ex.controllers["K*(-2)"])

    def test_doyle_companion_value(self):
        ex = get_example("doyle")
        Kc, _ = canonical_form(ex.controllers["optimum"])
        spec = restricted_rcond(ex.plant, Kc)
        assert spec.min_eig == pytest.approx(12.15, rel=0.05)
        assert 0 < spec.rcond < 1
        assert spec.rcond == pytest.approx(spec.min_eig / spec.max_eig,
                                           rel=1e-12)

    def test_positive_definite_at_generic_optimum(self):
        rng = np.random.default_rng(67)
        plant = random_plant(rng, 2, 1, 1)
        K, _ = riccati_controller(plant)
        spec = restricted_rcond(plant, K)
        assert spec.min_eig > 0
