"""Unit tests for gradient descent, initialization, and limit certificates."""

import csv

import numpy as np
import pytest

from conftest import BOTH_DOMAINS, random_plant, random_stabilizing
from lqglandscape import (
    Controller,
    LimitVerdict,
    NotSISO,
    NotStabilizing,
    OptimizerConfig,
    Parameterization,
    Plant,
    Terminal,
    TimeDomain,
    certify_limit,
    descend,
    get_example,
    init_near_optimal,
    init_pole_placement,
    is_stabilizing,
    riccati_controller,
)


class TestConfig:
    def test_defaults(self):
        cfg = OptimizerConfig()
        assert cfg.alpha == 0.01 and cfg.beta == 0.5
        assert cfg.parameterization is Parameterization.FULL

    @pytest.mark.parametrize("kwargs", [
        {"alpha": 0.0}, {"alpha": 1.0}, {"beta": 1.0}, {"beta": 0.0},
        {"grad_tol": -1.0}, {"max_iters": 0}, {"snapshot_every": 0},
    ])
    def test_validation(self, kwargs):
        with pytest.raises(ValueError):
            OptimizerConfig(**kwargs)


class TestInitialization:
    @pytest.mark.parametrize("domain", BOTH_DOMAINS)
    def test_pole_placement_spectrum(self, domain):
        rng = np.random.default_rng(101)
        plant = random_plant(rng, 3, 1, 1, domain)
        K = init_pole_placement(plant, rng=5)
        rep = is_stabilizing(plant, K)
        assert rep.stable
        eigs = rep.eigenvalues
        if domain is TimeDomain.CONTINUOUS:
            assert np.all(eigs.real > -2.0) and np.all(eigs.real < -1.0)
            assert np.abs(eigs.imag).max() <= 1e-8
        else:
            radii = np.abs(eigs)
            assert np.all(radii > 0.1 - 1e-12) and np.all(radii < 0.9)

    def test_explicit_poles_scalar(self):
        ex = get_example("ex3.1")
        K = init_pole_placement(ex.plant,
                                poles=(np.array([-1.5]), np.array([-1.5])))
        # a=b=c=1, pole -1.5 -> K = L = 2.5, A_K = 1 - 2.5 - 2.5 = -4.
        assert K.A_K.item() == pytest.approx(-4.0)
        assert K.B_K.item() == pytest.approx(2.5)
        assert K.C_K.item() == pytest.approx(-2.5)

    def test_near_optimal_zero_delta_is_optimum(self):
        ex = get_example("doyle")
        K = init_near_optimal(ex.plant, delta=0.0)
        K_opt, _ = riccati_controller(ex.plant)
        assert np.abs(K.as_matrix() - K_opt.as_matrix()).max() <= 1e-12

    def test_near_optimal_is_stabilizing(self):
        ex = get_example("doyle")
        K = init_near_optimal(ex.plant, delta=1e-2, rng=3)
        assert is_stabilizing(ex.plant, K).stable


class TestDescend:
    def test_scalar_full_converges_to_optimum(self):
        ex = get_example("ex3.3")
        K_opt, J_opt = riccati_controller(ex.plant)
        K0 = init_pole_placement(ex.plant, rng=2)
        trace = descend(ex.plant, K0)
        assert trace.terminal is Terminal.GRAD_TOL_REACHED
        assert trace.monotone
        assert trace.records[-1].J <= J_opt + 1e-6 * (1 + abs(J_opt))
        assert is_stabilizing(ex.plant, trace.final).stable

    def test_symmetric_start_is_captured_by_saddle(self):
        # From the symmetric witness (-1, 1, -1) one exact Armijo step lands
        # on the zero-gradient point (-1, 0, 0) with J = 1/2, where descent
        # must stop: a saddle, not the optimum (J* < 1/2).
        ex = get_example("ex3.3")
        _, J_opt = riccati_controller(ex.plant)
        trace = descend(ex.plant, ex.controllers["k+"])
        assert trace.terminal is Terminal.GRAD_TOL_REACHED
        assert trace.records[-1].J == pytest.approx(0.5, abs=1e-12)
        assert trace.records[-1].J > J_opt
        assert abs(trace.final.B_K.item()) <= 1e-12
        assert abs(trace.final.C_K.item()) <= 1e-12

    def test_discrete_descent(self):
        ex = get_example("exD.1")
        K_opt, J_opt = riccati_controller(ex.plant)
        trace = descend(ex.plant, ex.controllers["k+"],
                        OptimizerConfig(max_iters=5000))
        assert trace.terminal is Terminal.GRAD_TOL_REACHED
        assert trace.records[-1].J <= J_opt + 1e-6 * (1 + abs(J_opt))

    def test_canonical_restricts_structure(self):
        ex = get_example("ex3.3")
        cfg = OptimizerConfig(parameterization=Parameterization.CANONICAL,
                              max_iters=500)
        trace = descend(ex.plant, ex.controllers["k+"], cfg)
        # Scalar canonical form pins B_K = 1 throughout.
        assert trace.final.B_K.item() == pytest.approx(1.0)
        for _, K in trace.snapshots:
            assert K.B_K.item() == pytest.approx(1.0)
        assert trace.monotone

    def test_canonical_needs_siso(self):
        rng = np.random.default_rng(107)
        plant = random_plant(rng, 2, 2, 1)
        K = random_stabilizing(rng, plant)
        cfg = OptimizerConfig(parameterization=Parameterization.CANONICAL)
        with pytest.raises(NotSISO):
            descend(plant, K, cfg)

    def test_rejects_destabilizing_start(self):
        ex = get_example("ex3.2")
        with pytest.raises(NotStabilizing):
            descend(ex.plant, ex.controllers["midpoint"])

    def test_max_iters_terminal(self):
        ex = get_example("doyle")
        K0 = init_pole_placement(ex.plant, rng=0)
        trace = descend(ex.plant, K0, OptimizerConfig(max_iters=5))
        assert trace.terminal is Terminal.MAX_ITERS
        assert trace.iterations == 5
        assert trace.monotone

    def test_snapshot_cadence_and_final(self):
        ex = get_example("doyle")
        K0 = init_pole_placement(ex.plant, rng=0)
        trace = descend(ex.plant, K0, OptimizerConfig(max_iters=25,
                                                      snapshot_every=10))
        iters = [i for i, _ in trace.snapshots]
        assert iters[:3] == [0, 10, 20]
        assert iters[-1] == trace.records[-1].iteration
        final_pair = trace.snapshots[-1][1]
        assert np.array_equal(final_pair.as_matrix(),
                              trace.final.as_matrix())

    def test_trace_csv_format(self, tmp_path):
        ex = get_example("ex3.3")
        trace = descend(ex.plant, ex.controllers["k+"],
                        OptimizerConfig(max_iters=50))
        out = tmp_path / "trace.csv"
        trace.write_csv(out)
        with open(out, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["iter", "J", "grad_norm", "step"]
        assert len(rows) == len(trace.records) + 1
        # Full-precision round trip: the parsed floats match exactly.
        assert float(rows[1][1]) == trace.records[0].J
        assert float(rows[-1][2]) == trace.records[-1].grad_norm

    def test_to_dict_round_trip_fields(self):
        ex = get_example("ex3.3")
        trace = descend(ex.plant, ex.controllers["k+"],
                        OptimizerConfig(max_iters=20))
        d = trace.to_dict()
        assert d["terminal"] == trace.terminal.value
        assert len(d["records"]) == len(trace.records)


class TestCertifyLimit:
    def test_global_optimum(self):
        ex = get_example("doyle")
        K_opt, _ = riccati_controller(ex.plant)
        cert = certify_limit(ex.plant, K_opt, tol=1e-6)
        assert cert.verdict is LimitVerdict.GLOBAL_OPTIMUM
        assert cert.evidence["stable"]

    def test_non_minimal_limit(self):
        ex = get_example("ex4.4")
        cert = certify_limit(ex.plant, ex.controllers["optimum"], tol=1e-6)
        assert cert.verdict is LimitVerdict.NON_MINIMAL_LIMIT

    def test_not_converged_at_generic_point(self):
        rng = np.random.default_rng(109)
        plant = random_plant(rng, 2, 1, 1)
        K = random_stabilizing(rng, plant)
        cert = certify_limit(plant, K, tol=1e-6)
        assert cert.verdict is LimitVerdict.NOT_CONVERGED

    def test_unstable_not_converged(self):
        ex = get_example("ex3.2")
        cert = certify_limit(ex.plant, ex.controllers["midpoint"])
        assert cert.verdict is LimitVerdict.NOT_CONVERGED
        assert not cert.evidence["stable"]

    def test_reduced_order_not_converged(self):
        ex = get_example("ex3.3")
        K0 = Controller(A_K=np.zeros((0, 0)), B_K=np.zeros((0, 1)),
                        C_K=np.zeros((1, 0)))
        cert = certify_limit(ex.plant, K0)
        assert cert.verdict is LimitVerdict.NOT_CONVERGED
