"""Gradient descent over stabilizing output-feedback controllers.

Vanilla gradient descent with an Armijo backtracking line search, run either
on the full controller parameter space or on the controllable companion form
of a SISO controller (where only the characteristic-polynomial and numerator
coefficients move).  Trial steps that leave the stabilizing set are treated
as failed line-search candidates, so every recorded iterate is feasible and
the cost sequence is monotone non-increasing.

Also provides the two initialization strategies used in experiments
(observer-based pole placement and perturbation of the Riccati optimum) and a
certificate routine that classifies a descent limit point by combining the
gradient norm, minimality margins and the stationary-point analysis.
"""

from __future__ import annotations

import csv
import enum
from dataclasses import dataclass, field

import numpy as np

from .cost import CostEval, GradientTriple, lqg_cost, lqg_gradient
from .errors import (
    LandscapeError,
    NotSISO,
    NotStabilizing,
    PlacementFailed,
    RetriesExhausted,
)
from .linalg import TimeDomain, ctrb, minimality, obsv
from .model import (
    Controller,
    Plant,
    canonical_form,
    controller_to_dict,
    is_stabilizing,
)
from .synthesis import Verdict, analyze_stationary, riccati_controller

__all__ = [
    "Parameterization",
    "Terminal",
    "OptimizerConfig",
    "TraceRecord",
    "Trace",
    "LimitVerdict",
    "CertifiedLimit",
    "descend",
    "init_pole_placement",
    "init_near_optimal",
    "certify_limit",
]

# Line-search step sizes below this are treated as a stall.
STALL_STEP = 1e-16
# Practical minimality threshold for limit certification: the smallest
# singular value of the controllability/observability matrix must exceed
# this fraction of the largest.  Far looser than the rank test on purpose —
# a descent limit approaching the non-minimal set shows a collapsing (but
# nonzero) margin.
MINIMALITY_MARGIN_RTOL = 1e-4
# Default pole-sampling intervals for the two time domains.
POLE_INTERVAL_CONTINUOUS = (-2.0, -1.0)
POLE_INTERVAL_DISCRETE = (0.1, 0.9)


class Parameterization(enum.Enum):
    FULL = "Full"
    CANONICAL = "Canonical"


class Terminal(enum.Enum):
    GRAD_TOL_REACHED = "GradTolReached"
    MAX_ITERS = "MaxIters"
    LEFT_FEASIBLE_SET = "LeftFeasibleSet"
    STALLED = "Stalled"


@dataclass(frozen=True)
class OptimizerConfig:
    """Settings for :func:`descend`.

    ``alpha`` is the Armijo sufficient-decrease fraction, ``beta`` the
    backtracking factor; each line search starts from step size 1.  The run
    stops once the (parameterization-appropriate) gradient norm falls below
    the relative gate ``grad_tol * (1 + |J|)`` — an absolute gate would be
    unreachable in double precision whenever the cost is large, since the
    smallest cost decrease a line search can resolve scales with ``|J|`` —
    or after ``max_iters`` accepted steps.  A controller snapshot is kept
    every ``snapshot_every`` iterations and at the final iterate.  ``seed``
    only tags the run; the descent itself is deterministic.
    """

    alpha: float = 0.01
    beta: float = 0.5
    grad_tol: float = 1e-6
    max_iters: int = 10_000
    parameterization: Parameterization = Parameterization.FULL
    seed: int = 0
    snapshot_every: int = 100

    def __post_init__(self) -> None:
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        if not 0.0 < self.beta < 1.0:
            raise ValueError(f"beta must lie in (0, 1), got {self.beta}")
        if self.grad_tol <= 0.0:
            raise ValueError(f"grad_tol must be positive, got {self.grad_tol}")
        if self.max_iters < 1:
            raise ValueError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.snapshot_every < 1:
            raise ValueError(
                f"snapshot_every must be >= 1, got {self.snapshot_every}"
            )


@dataclass(frozen=True)
class TraceRecord:
    """One accepted iterate: cost, gradient norm and the accepted step size
    that produced it (0.0 for the initial point)."""

    iteration: int
    J: float
    grad_norm: float
    step: float


@dataclass
class Trace:
    """Record of a descent run.

    ``records`` covers every iterate in order; ``snapshots`` holds
    ``(iteration, controller)`` pairs at the configured cadence plus the
    final iterate; ``final`` is the last (stabilizing) iterate and
    ``terminal`` tells why the run stopped.
    """

    records: list[TraceRecord] = field(default_factory=list)
    snapshots: list[tuple[int, Controller]] = field(default_factory=list)
    terminal: Terminal = Terminal.MAX_ITERS
    final: Controller | None = None
    parameterization: Parameterization = Parameterization.FULL

    @property
    def iterations(self) -> int:
        return self.records[-1].iteration if self.records else 0

    @property
    def monotone(self) -> bool:
        """Whether the recorded cost sequence is non-increasing."""
        return all(b.J <= a.J for a, b in zip(self.records, self.records[1:]))

    def write_csv(self, path: str) -> None:
        """Write ``iter,J,grad_norm,step`` rows for every iterate."""
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["iter", "J", "grad_norm", "step"])
            for rec in self.records:
                writer.writerow([rec.iteration, repr(rec.J),
                                 repr(rec.grad_norm), repr(rec.step)])

    def to_dict(self) -> dict:
        """JSON-ready form with full controller snapshots."""
        return {
            "terminal": self.terminal.value,
            "parameterization": self.parameterization.value,
            "iterations": self.iterations,
            "records": [
                {"iter": r.iteration, "J": r.J, "grad_norm": r.grad_norm,
                 "step": r.step}
                for r in self.records
            ],
            "snapshots": [
                {"iter": it, "controller": controller_to_dict(K)}
                for it, K in self.snapshots
            ],
            "final": None if self.final is None
            else controller_to_dict(self.final),
        }


def _restricted_grad_norm(grad: GradientTriple) -> float:
    """Gradient norm over the companion-form coordinates only: the last row
    of the state block plus the full output row."""
    return float(np.sqrt(np.sum(grad.dA[-1, :] ** 2) + np.sum(grad.dC ** 2)))


def _full_step(K: Controller, grad: GradientTriple, s: float) -> Controller:
    return Controller(A_K=K.A_K - s * grad.dA, B_K=K.B_K - s * grad.dB,
                      C_K=K.C_K - s * grad.dC, D_K=K.D_K)


def _canonical_step(K: Controller, grad: GradientTriple,
                    s: float) -> Controller:
    A_K = K.A_K.copy()
    A_K[-1, :] -= s * grad.dA[-1, :]
    return Controller(A_K=A_K, B_K=K.B_K, C_K=K.C_K - s * grad.dC, D_K=K.D_K)


def descend(plant: Plant, K0: Controller,
            config: OptimizerConfig | None = None) -> Trace:
    """Run Armijo-backtracked gradient descent from ``K0``.

    Full mode moves every controller entry along the negative gradient.
    Canonical mode (SISO only) first converts ``K0`` to companion form and
    then moves only the companion coefficients — the last row of the state
    matrix and the output row — using the matching gradient blocks, so the
    companion structure is preserved exactly.

    Trial points whose closed loop is not stable (or whose cost evaluation
    fails) count as failed Armijo candidates and trigger further
    backtracking; if the step size underflows ``STALL_STEP`` the run stops
    with terminal ``Stalled``.

    Raises
    ------
    NotStabilizing
        If ``K0`` does not stabilize the plant.
    NotSISO
        Canonical mode on a multivariable plant or controller.
    NotControllable
        Canonical mode when ``K0`` is not controllable.
    """
    cfg = OptimizerConfig() if config is None else config
    if not is_stabilizing(plant, K0).stable:
        raise NotStabilizing("initial controller does not stabilize the plant")
    canonical = cfg.parameterization is Parameterization.CANONICAL
    if canonical:
        if plant.m != 1 or plant.p != 1:
            raise NotSISO(
                f"canonical descent needs a SISO plant, got m={plant.m}, "
                f"p={plant.p}"
            )
        K, _ = canonical_form(K0)
    else:
        K = K0

    trace = Trace(parameterization=cfg.parameterization)
    ce = lqg_cost(plant, K)
    arrived_step = 0.0
    terminal = Terminal.MAX_ITERS
    t = 0
    while True:
        if not is_stabilizing(plant, K).stable:
            terminal = Terminal.LEFT_FEASIBLE_SET
            break
        grad = lqg_gradient(plant, K, cost=ce)
        gn = _restricted_grad_norm(grad) if canonical else grad.norm()
        trace.records.append(
            TraceRecord(iteration=t, J=ce.J, grad_norm=gn, step=arrived_step)
        )
        if t % cfg.snapshot_every == 0:
            trace.snapshots.append((t, K))
        if gn <= cfg.grad_tol * (1.0 + abs(ce.J)):
            terminal = Terminal.GRAD_TOL_REACHED
            break
        if t >= cfg.max_iters:
            terminal = Terminal.MAX_ITERS
            break

        step_fn = _canonical_step if canonical else _full_step
        s = 1.0
        accepted = False
        while s >= STALL_STEP:
            K_trial = step_fn(K, grad, s)
            if is_stabilizing(plant, K_trial).stable:
                try:
                    ce_trial = lqg_cost(plant, K_trial)
                except LandscapeError:
                    ce_trial = None
                if (ce_trial is not None
                        and ce.J - ce_trial.J >= cfg.alpha * s * gn * gn):
                    accepted = True
                    break
            s *= cfg.beta
        if not accepted:
            terminal = Terminal.STALLED
            break
        K, ce, arrived_step = K_trial, ce_trial, s
        t += 1

    trace.terminal = terminal
    trace.final = K
    if not trace.snapshots or trace.snapshots[-1][0] != t:
        trace.snapshots.append((t, K))
    return trace


def _coerce_rng(rng: np.random.Generator | int | None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def _place_gain(A: np.ndarray, B: np.ndarray, poles: np.ndarray) -> np.ndarray:
    """Feedback gain ``K`` with ``eig(A - B K)`` at ``poles``."""
    n = A.shape[0]
    if n == 1:
        # One state: B K = A - pole, solved in least squares for any m.
        target = (A[0, 0] - float(np.real(poles[0]))) * np.ones((1, 1))
        return np.linalg.lstsq(B, target, rcond=None)[0]
    from scipy.signal import place_poles

    return place_poles(A, B, np.sort(poles)).gain_matrix


def init_pole_placement(
    plant: Plant,
    pole_interval: tuple[float, float] | None = None,
    rng: np.random.Generator | int | None = None,
    poles: tuple[np.ndarray, np.ndarray] | None = None,
    max_retries: int = 25,
) -> Controller:
    """Observer-based stabilizing controller from random pole placement.

    Samples ``n`` state-feedback poles and ``n`` observer poles uniformly
    from ``pole_interval`` (default ``(-2, -1)`` in continuous time and
    ``(0.1, 0.9)`` in discrete time), computes the two gains ``K`` and ``L``
    and assembles ``A_K = A - B K - L C``, ``B_K = L``, ``C_K = -K``.  The
    closed-loop spectrum is then exactly the union of the two placed sets,
    so the result stabilizes the plant.  Explicit ``poles`` (a pair of
    arrays, state poles then observer poles) bypass the sampling.

    Raises
    ------
    PlacementFailed
        If no stabilizing placement was produced within ``max_retries``.
    """
    generator = _coerce_rng(rng)
    if pole_interval is None:
        pole_interval = (POLE_INTERVAL_CONTINUOUS
                         if plant.domain is TimeDomain.CONTINUOUS
                         else POLE_INTERVAL_DISCRETE)
    lo, hi = pole_interval
    n = plant.n
    last_err: Exception | None = None
    for _ in range(max_retries):
        if poles is not None:
            p_state = np.asarray(poles[0], dtype=float)
            p_obs = np.asarray(poles[1], dtype=float)
        else:
            p_state = generator.uniform(lo, hi, size=n)
            p_obs = generator.uniform(lo, hi, size=n)
        try:
            K_gain = _place_gain(plant.A, plant.B, p_state)
            L_gain = _place_gain(plant.A.T, plant.C.T, p_obs).T
        except (ValueError, np.linalg.LinAlgError) as err:
            last_err = err
            if poles is not None:
                break
            continue
        K_init = Controller(
            A_K=plant.A - plant.B @ K_gain - L_gain @ plant.C,
            B_K=L_gain,
            C_K=-K_gain,
        )
        if is_stabilizing(plant, K_init).stable:
            return K_init
        if poles is not None:
            break
    detail = f": {last_err}" if last_err is not None else ""
    raise PlacementFailed(
        f"no stabilizing pole placement found in {max_retries} attempts"
        + detail
    )


def init_near_optimal(
    plant: Plant,
    delta: float = 1e-2,
    rng: np.random.Generator | int | None = None,
    max_retries: int = 50,
) -> Controller:
    """Gaussian entrywise perturbation of the Riccati-optimal controller.

    Each attempt adds ``delta`` times a standard-normal draw to every entry
    of the optimal controller and keeps the first stabilizing result;
    ``delta = 0`` returns the optimum itself.

    Raises
    ------
    RetriesExhausted
        If no stabilizing perturbation was found within ``max_retries``.
    """
    generator = _coerce_rng(rng)
    K_opt, _ = riccati_controller(plant)
    n, m, p = K_opt.order, K_opt.m, K_opt.p
    for _ in range(max_retries):
        K_trial = Controller(
            A_K=K_opt.A_K + delta * generator.standard_normal((n, n)),
            B_K=K_opt.B_K + delta * generator.standard_normal((n, p)),
            C_K=K_opt.C_K + delta * generator.standard_normal((m, n)),
        )
        if is_stabilizing(plant, K_trial).stable:
            return K_trial
    raise RetriesExhausted(
        f"no stabilizing perturbation of size {delta} in {max_retries} tries"
    )


class LimitVerdict(enum.Enum):
    GLOBAL_OPTIMUM = "GlobalOptimum"
    NON_MINIMAL_LIMIT = "NonMinimalLimit"
    NOT_CONVERGED = "NotConverged"


@dataclass(frozen=True)
class CertifiedLimit:
    """Classification of a descent limit point with its numeric evidence."""

    verdict: LimitVerdict
    evidence: dict

    def to_dict(self) -> dict:
        return {"verdict": self.verdict.value, "evidence": self.evidence}


def certify_limit(plant: Plant, K_T: Controller, tol: float = 1e-6,
                  minimality_margin: float = MINIMALITY_MARGIN_RTOL
                  ) -> CertifiedLimit:
    """Classify a descent limit point.

    Combines the gradient norm (relative gate ``tol * (1 + |J|)``), the
    smallest singular values of the controller's controllability and
    observability matrices, and — for minimal stationary full-order
    controllers — the stationary-point analysis.  A stationary point whose
    realization has healthy minimality margins and passes the
    recovered-certificate checks is globally optimal; a stationary point
    whose controllability or observability margin has collapsed below
    ``minimality_margin`` (relative to the leading singular value) is a
    non-minimal limit; anything still carrying gradient (or failing the
    certificate) is not converged.
    """
    evidence: dict = {}
    rep = is_stabilizing(plant, K_T)
    evidence["stable"] = bool(rep.stable)
    evidence["margin"] = float(rep.margin)
    if not rep.stable:
        return CertifiedLimit(LimitVerdict.NOT_CONVERGED, evidence)

    ce = lqg_cost(plant, K_T)
    grad = lqg_gradient(plant, K_T, cost=ce)
    gate = tol * (1.0 + abs(ce.J))
    evidence["J"] = float(ce.J)
    evidence["grad_norm"] = float(grad.norm())
    evidence["grad_gate"] = float(gate)

    mrep = minimality(K_T.A_K, K_T.B_K, K_T.C_K)
    if K_T.order:
        sv_c = np.linalg.svd(ctrb(K_T.A_K, K_T.B_K), compute_uv=False)
        sv_o = np.linalg.svd(obsv(K_T.C_K, K_T.A_K), compute_uv=False)
        sigma_c, rel_c = float(sv_c[-1]), float(sv_c[-1] / sv_c[0])
        sigma_o, rel_o = float(sv_o[-1]), float(sv_o[-1] / sv_o[0])
    else:
        # An empty realization has nothing to cancel: vacuously minimal.
        sigma_c = rel_c = sigma_o = rel_o = float("inf")
    evidence["sigma_c"] = sigma_c
    evidence["sigma_o"] = sigma_o
    evidence["sigma_c_relative"] = rel_c
    evidence["sigma_o_relative"] = rel_o
    evidence["controllable"] = bool(mrep.controllable)
    evidence["observable"] = bool(mrep.observable)

    if grad.norm() > gate:
        return CertifiedLimit(LimitVerdict.NOT_CONVERGED, evidence)
    if not mrep.minimal or min(rel_c, rel_o) < minimality_margin:
        return CertifiedLimit(LimitVerdict.NON_MINIMAL_LIMIT, evidence)
    if K_T.order != plant.n:
        evidence["detail"] = (
            "stationary and minimal, but reduced order: global-optimality "
            "analysis needs a full-order controller"
        )
        return CertifiedLimit(LimitVerdict.NOT_CONVERGED, evidence)

    report = analyze_stationary(plant, K_T, tol=tol)
    evidence["stationary_verdict"] = report.verdict.value
    if report.recovered is not None:
        evidence["riccati_residual_P"] = report.recovered.riccati_residual_P
        evidence["riccati_residual_S"] = report.recovered.riccati_residual_S
    if report.verdict is Verdict.GLOBAL_OPTIMUM:
        return CertifiedLimit(LimitVerdict.GLOBAL_OPTIMUM, evidence)
    if report.verdict is Verdict.NON_MINIMAL_STATIONARY:
        return CertifiedLimit(LimitVerdict.NON_MINIMAL_LIMIT, evidence)
    return CertifiedLimit(LimitVerdict.NOT_CONVERGED, evidence)
