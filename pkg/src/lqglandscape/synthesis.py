"""Optimal-controller synthesis and stationary-point certification.

The full-order optimal controller is assembled from the two Riccati solutions
(regulator and filter); conversely, a minimal stationary point of the cost can
be certified as globally optimal by recovering the coordinate change and the
two Riccati solutions from its closed-loop Gramians and checking the Riccati
residuals and the stability of the implied gains.  Non-minimal stationary
points exist too: any stationary point padded with stable uncoupled dynamics
stays stationary at the same cost, and for open-loop stable plants the zero
controller padded that way is the canonical saddle family, classified by
values of a fixed transfer function at the padding's mirrored eigenvalues.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import (
    AssumptionViolated,
    NonDiagonalizable,
    NotStationary,
    PlantNotStable,
    UnstablePadding,
)
from .cost import STATIONARITY_RTOL, CostEval, lqg_cost, lqg_gradient
from .linalg import MinimalityReport, TimeDomain, solve_care, solve_lyapunov, stability
from .model import Controller, Plant

__all__ = [
    "Verdict",
    "SaddleClass",
    "RecoveredCertificate",
    "StationaryReport",
    "ZeroControllerSaddle",
    "riccati_controller",
    "riccati_gains",
    "analyze_stationary",
    "augment_stationary",
    "zero_controller_transfer",
    "classify_zero_controller_saddle",
]

# Residual gate for certifying recovered Riccati solutions.
CERT_RTOL = 1e-6


class Verdict(enum.Enum):
    GLOBAL_OPTIMUM = "GlobalOptimum"
    NON_MINIMAL_STATIONARY = "NonMinimalStationary"
    NOT_STATIONARY = "NotStationary"
    INCONCLUSIVE = "Inconclusive"


class SaddleClass(enum.Enum):
    INDEFINITE = "Indefinite"
    ZERO_HESSIAN = "ZeroHessian"


@dataclass(frozen=True)
class RecoveredCertificate:
    """Coordinate change and Riccati data recovered from a stationary point.

    ``T`` conjugates the controller onto the Riccati-optimal family; ``P`` and
    ``S`` are the filter/regulator Riccati candidates (Schur complements of
    the closed-loop Gramians); the residuals are relative, and
    ``gains_stable`` records whether the implied regulator/observer error
    dynamics are stable.
    """

    T: np.ndarray
    P: np.ndarray
    S: np.ndarray
    riccati_residual_P: float
    riccati_residual_S: float
    gains_stable: bool


@dataclass(frozen=True)
class StationaryReport:
    verdict: Verdict
    grad_norm: float
    J: float
    minimality: MinimalityReport
    recovered: RecoveredCertificate | None
    detail: str = ""


@dataclass(frozen=True)
class ZeroControllerSaddle:
    """Classification of the padded-zero-controller stationary family."""

    classification: SaddleClass
    eigenvalues: np.ndarray
    G_values: list
    G_norms: np.ndarray


def riccati_gains(plant: Plant) -> tuple[np.ndarray, np.ndarray,
                                         np.ndarray, np.ndarray]:
    """Solve both Riccati equations; returns ``(S, K, P, L)``.

    ``S``/``K`` are the regulator solution and gain; ``P``/``L`` the filter
    solution and gain, obtained from the same solver on transposed data.
    """
    S, K = solve_care(plant.A, plant.B, plant.R, plant.Q, plant.domain)
    P, L_t = solve_care(plant.A.T, plant.C.T, plant.V, plant.W, plant.domain)
    return S, K, P, L_t.T


def riccati_controller(plant: Plant) -> tuple[Controller, float]:
    """The full-order optimal controller and its cost.

    ``A_K = A - B K - L C``, ``B_K = L``, ``C_K = -K`` with the regulator
    gain ``K`` and filter gain ``L`` from :func:`riccati_gains`.

    Raises
    ------
    AssumptionViolated
        If any of the plant's controllability/observability flags fail.
    """
    flags = plant.assumptions
    if not flags.all_satisfied:
        failed = [name for name in ("ab_controllable", "ca_observable",
                                    "aw_controllable", "qa_observable")
                  if not getattr(flags, name)]
        raise AssumptionViolated(
            "plant fails standing assumption(s): " + ", ".join(failed)
        )
    _, K_gain, _, L_gain = riccati_gains(plant)
    A_K = plant.A - plant.B @ K_gain - L_gain @ plant.C
    K_opt = Controller(A_K=A_K, B_K=L_gain, C_K=-K_gain)
    return K_opt, lqg_cost(plant, K_opt).J


def _riccati_residuals(plant: Plant, P: np.ndarray,
                       S: np.ndarray) -> tuple[float, float]:
    A, B, C = plant.A, plant.B, plant.C
    W, V, Q, R = plant.W, plant.V, plant.Q, plant.R
    if plant.domain is TimeDomain.CONTINUOUS:
        res_P = A @ P + P @ A.T - P @ C.T @ np.linalg.solve(V, C @ P) + W
        res_S = A.T @ S + S @ A - S @ B @ np.linalg.solve(R, B.T @ S) + Q
    else:
        GP = C @ P @ C.T + V
        res_P = A @ P @ A.T - P \
            - A @ P @ C.T @ np.linalg.solve(GP, C @ P @ A.T) + W
        GS = B.T @ S @ B + R
        res_S = A.T @ S @ A - S \
            - A.T @ S @ B @ np.linalg.solve(GS, B.T @ S @ A) + Q
    return (
        float(np.linalg.norm(res_P)) / (1.0 + float(np.linalg.norm(P))),
        float(np.linalg.norm(res_S)) / (1.0 + float(np.linalg.norm(S))),
    )


def _gains_from(plant: Plant, P: np.ndarray,
                S: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    A, B, C = plant.A, plant.B, plant.C
    if plant.domain is TimeDomain.CONTINUOUS:
        K_gain = np.linalg.solve(plant.R, B.T @ S)
        L_gain = np.linalg.solve(plant.V, C @ P).T
    else:
        K_gain = np.linalg.solve(B.T @ S @ B + plant.R, B.T @ S @ A)
        L_gain = np.linalg.solve(C @ P @ C.T + plant.V, C @ P @ A.T).T
    return K_gain, L_gain


def analyze_stationary(plant: Plant, K: Controller,
                       tol: float | None = None) -> StationaryReport:
    """Certificate-based classification of a full-order candidate point.

    If the gradient is below the stationarity gate and the realization is
    minimal, the coordinate change ``T`` and the Riccati candidates ``P, S``
    are recovered from the closed-loop Gramian blocks:

        T = Y22^{-1} Y12^T        (with inverse -X12 X22^{-1}),
        P = X11 - X12 X22^{-1} X12^T,
        S = Y11 - Y12 Y22^{-1} Y12^T,

    and the verdict is ``GlobalOptimum`` exactly when the Riccati residuals
    pass the certificate gate and the implied gains are stabilizing.
    Near-singular Gramian corner blocks make the recovery meaningless, in
    which case the verdict is ``Inconclusive``.

    ``tol`` is a relative rate (default 1e-6): the gradient gate is
    ``tol * (1 + |J|)`` and the certificate gates scale with it likewise.
    """
    if K.order != plant.n:
        raise ValueError(
            f"stationary analysis expects a full-order controller "
            f"(q = {K.order}, n = {plant.n})"
        )
    ce = lqg_cost(plant, K)
    grad = lqg_gradient(plant, K, cost=ce)
    grad_norm = grad.norm()
    rate = STATIONARITY_RTOL if tol is None else tol
    gate = rate * (1.0 + abs(ce.J))
    cert_rate = CERT_RTOL if tol is None else tol
    minimal = K.minimality()

    if grad_norm > gate:
        return StationaryReport(
            verdict=Verdict.NOT_STATIONARY,
            grad_norm=grad_norm, J=ce.J, minimality=minimal, recovered=None,
            detail=f"gradient norm {grad_norm:.3e} above gate {gate:.3e}",
        )
    if not minimal.minimal:
        return StationaryReport(
            verdict=Verdict.NON_MINIMAL_STATIONARY,
            grad_norm=grad_norm, J=ce.J, minimality=minimal, recovered=None,
            detail="stationary but the realization is not minimal",
        )

    X22, Y22 = ce.X22, ce.Y22
    cond_limit = 1e10
    if (np.linalg.cond(X22) > cond_limit or np.linalg.cond(Y22) > cond_limit):
        return StationaryReport(
            verdict=Verdict.INCONCLUSIVE,
            grad_norm=grad_norm, J=ce.J, minimality=minimal, recovered=None,
            detail="Gramian corner blocks are numerically singular",
        )

    T = np.linalg.solve(Y22, ce.Y12.T)
    T_inv = -ce.X12 @ np.linalg.inv(X22)
    consistency = np.linalg.norm(T @ T_inv - np.eye(plant.n))
    P = ce.X11 - ce.X12 @ np.linalg.solve(X22, ce.X12.T)
    S = ce.Y11 - ce.Y12 @ np.linalg.solve(Y22, ce.Y12.T)
    P = 0.5 * (P + P.T)
    S = 0.5 * (S + S.T)

    res_P, res_S = _riccati_residuals(plant, P, S)
    K_gain, L_gain = _gains_from(plant, P, S)
    gains_stable = (
        stability(plant.A - plant.B @ K_gain, plant.domain).stable
        and stability(plant.A - L_gain @ plant.C, plant.domain).stable
    )
    cert = RecoveredCertificate(
        T=T, P=P, S=S,
        riccati_residual_P=res_P, riccati_residual_S=res_S,
        gains_stable=gains_stable,
    )

    eig_floor = -1e-8 * (1.0 + max(np.linalg.norm(P), np.linalg.norm(S)))
    psd_ok = (np.linalg.eigvalsh(P)[0] > eig_floor
              and np.linalg.eigvalsh(S)[0] > eig_floor)
    certified = (max(res_P, res_S) <= cert_rate and gains_stable and psd_ok
                 and consistency <= cert_rate * (1.0 + np.linalg.norm(T)))
    return StationaryReport(
        verdict=Verdict.GLOBAL_OPTIMUM if certified else Verdict.INCONCLUSIVE,
        grad_norm=grad_norm, J=ce.J, minimality=minimal, recovered=cert,
        detail="" if certified else (
            f"certificate failed: residuals ({res_P:.3e}, {res_S:.3e}), "
            f"gains_stable={gains_stable}, psd_ok={psd_ok}, "
            f"T consistency {consistency:.3e}"
        ),
    )


def augment_stationary(plant: Plant, K_star: Controller, Lam,
                       tol: float | None = None) -> Controller:
    """Pad a stationary controller with stable uncoupled dynamics.

    Returns the order ``q + q'`` controller

        A_K' = diag(A_K, Lam),  B_K' = [B_K; 0],  C_K' = [C_K, 0],

    which is again stationary with the same cost.

    Raises
    ------
    NotStationary
        If ``K_star`` fails the gradient gate.
    UnstablePadding
        If ``Lam`` is not stable in the plant's domain.
    """
    Lam = np.atleast_2d(np.asarray(Lam, dtype=float))
    if Lam.shape[0] != Lam.shape[1]:
        raise ValueError(f"padding block must be square, got {Lam.shape}")
    ce = lqg_cost(plant, K_star)
    grad_norm = lqg_gradient(plant, K_star, cost=ce).norm()
    rate = STATIONARITY_RTOL if tol is None else tol
    gate = rate * (1.0 + abs(ce.J))
    if grad_norm > gate:
        raise NotStationary(
            f"gradient norm {grad_norm:.3e} above stationarity gate {gate:.3e}"
        )
    pad_rep = stability(Lam, plant.domain)
    if not pad_rep.stable:
        raise UnstablePadding(
            f"padding block is not stable (margin {pad_rep.margin:.3e})"
        )
    q, qp = K_star.order, Lam.shape[0]
    A_aug = np.zeros((q + qp, q + qp))
    A_aug[:q, :q] = K_star.A_K
    A_aug[q:, q:] = Lam
    B_aug = np.vstack([K_star.B_K, np.zeros((qp, K_star.p))])
    C_aug = np.hstack([K_star.C_K, np.zeros((K_star.m, qp))])
    return Controller(A_K=A_aug, B_K=B_aug, C_K=C_aug)


def zero_controller_transfer(plant: Plant, s: complex) -> np.ndarray:
    """The saddle-classifying transfer function of an open-loop stable plant:
    ``G(s) = C X_op (s I - A^T)^{-1} Y_op B`` with the open-loop Gramians
    ``A X_op + X_op A^T + W = 0`` and ``A^T Y_op + Y_op A + Q = 0``.
    """
    if plant.domain is not TimeDomain.CONTINUOUS:
        raise ValueError("saddle transfer function is continuous-time only")
    if not stability(plant.A, plant.domain).stable:
        raise PlantNotStable("open-loop Gramians need a stable A")
    X_op = solve_lyapunov(plant.A, plant.W, plant.domain)
    Y_op = solve_lyapunov(plant.A.T, plant.Q, plant.domain)
    n = plant.n
    resolvent = np.linalg.solve(
        complex(s) * np.eye(n) - plant.A.T, Y_op @ plant.B
    )
    return plant.C @ X_op @ resolvent


def classify_zero_controller_saddle(plant: Plant, Lam) -> ZeroControllerSaddle:
    """Classify the Hessian at the zero controller padded with ``Lam``.

    For an open-loop stable continuous-time plant, the controller with
    ``A_K = Lam``, ``B_K = 0``, ``C_K = 0`` is stationary.  Its Hessian is
    indefinite (a strict saddle) iff the transfer function
    :func:`zero_controller_transfer` is nonzero at some eigenvalue of
    ``-Lam``; if it vanishes at all of them the Hessian is zero in every
    off-orbit direction as well.

    Raises
    ------
    PlantNotStable
        If the plant is not open-loop stable.
    UnstablePadding
        If ``Lam`` is not stable (the padded controller would not stabilize).
    NonDiagonalizable
        If ``Lam``'s eigenvector basis is too ill conditioned for the
        eigenvalue-wise test to be meaningful.
    ValueError
        For discrete-time plants (the classification is established for
        continuous time only).
    """
    if plant.domain is not TimeDomain.CONTINUOUS:
        raise ValueError("saddle classification is continuous-time only")
    if not stability(plant.A, plant.domain).stable:
        raise PlantNotStable("the zero controller is stationary only for "
                             "open-loop stable plants")
    Lam = np.atleast_2d(np.asarray(Lam, dtype=float))
    if Lam.shape[0] != Lam.shape[1]:
        raise ValueError(f"padding block must be square, got {Lam.shape}")
    rep = stability(Lam, plant.domain)
    if not rep.stable:
        raise UnstablePadding(
            f"padding block is not stable (margin {rep.margin:.3e})"
        )
    eigvals, eigvecs = np.linalg.eig(Lam)
    if np.linalg.cond(eigvecs) >= 1e8:
        raise NonDiagonalizable(
            "padding block eigenvector condition number "
            f"{np.linalg.cond(eigvecs):.3e}"
        )

    mirrored = -eigvals
    G_values = [zero_controller_transfer(plant, lam) for lam in mirrored]
    G_norms = np.array([float(np.linalg.norm(G)) for G in G_values])

    X_op = solve_lyapunov(plant.A, plant.W, plant.domain)
    Y_op = solve_lyapunov(plant.A.T, plant.Q, plant.domain)
    scale = 1.0 + (np.linalg.norm(plant.C @ X_op)
                   * np.linalg.norm(Y_op @ plant.B))
    indefinite = bool(np.any(G_norms > 1e-8 * scale))
    return ZeroControllerSaddle(
        classification=SaddleClass.INDEFINITE if indefinite
        else SaddleClass.ZERO_HESSIAN,
        eigenvalues=mirrored,
        G_values=G_values,
        G_norms=G_norms,
    )
