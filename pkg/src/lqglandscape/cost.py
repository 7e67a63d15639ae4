"""LQG cost, gradient, and Hessian over stabilizing dynamical controllers.

For a strictly proper controller the closed loop

    A_cl = [[A, B C_K], [B_K C, A_K]]

carries the lumped noise and cost weights

    W_bar = diag(W, B_K V B_K^T),     Q_bar = diag(Q, C_K^T R C_K),

and the cost is ``J = tr(Q_bar X_K) = tr(W_bar Y_K)`` where ``X_K`` and
``Y_K`` solve the forward/adjoint closed-loop Lyapunov equations (continuous
time) or their discrete counterparts.  The two trace expressions are computed
independently; their gap is kept as a consistency diagnostic, the reported
cost is their mean, and an evaluation whose routes disagree beyond
``TRACE_AGREEMENT_RTOL`` is refused (:class:`~lqglandscape.errors.IllConditioned`)
instead of returning untrustworthy numbers.

Gradients and Hessian quadratic forms are assembled from the blocks of
``X_K``/``Y_K``.  Hessian matrices use the fixed direction layout
``[vec(dC); vec(dB); vec(dA)]`` (see :class:`lqglandscape.model.Direction`).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    IllConditioned,
    NonMinimalController,
    NotStabilizing,
    NotStationary,
)
from .linalg import TimeDomain, solve_lyapunov, stability
from .model import Controller, Direction, Plant, TangentBasis, closed_loop, tangent_space

__all__ = [
    "CostEval",
    "GradientTriple",
    "RestrictedSpectrum",
    "STATIONARITY_RTOL",
    "TRACE_AGREEMENT_RTOL",
    "lqg_cost",
    "lqg_gradient",
    "hessian_quadratic_form",
    "hessian_bilinear",
    "hessian_matrix",
    "restricted_rcond",
]

# Stationarity gate: ||grad||_F <= STATIONARITY_RTOL * (1 + |J|).
STATIONARITY_RTOL = 1e-6

# The two trace routes to the cost are solved independently; when they
# disagree by more than this relative amount the Lyapunov solutions carry no
# trustworthy digits and the evaluation is refused rather than returned.
TRACE_AGREEMENT_RTOL = 1e-3


@dataclass(frozen=True)
class CostEval:
    """Cost value together with the closed-loop Gramian pair.

    ``X`` and ``Y`` are the (n+q) x (n+q) solutions of the closed-loop
    equations; ``trace_gap`` is the absolute difference of the two equivalent
    trace expressions for the cost (a solver consistency diagnostic).
    Partition blocks are exposed as properties (indices 1 = plant part,
    2 = controller part).
    """

    J: float
    X: np.ndarray
    Y: np.ndarray
    trace_gap: float
    n: int
    q: int

    @property
    def X11(self) -> np.ndarray:
        return self.X[: self.n, : self.n]

    @property
    def X12(self) -> np.ndarray:
        return self.X[: self.n, self.n:]

    @property
    def X22(self) -> np.ndarray:
        return self.X[self.n:, self.n:]

    @property
    def Y11(self) -> np.ndarray:
        return self.Y[: self.n, : self.n]

    @property
    def Y12(self) -> np.ndarray:
        return self.Y[: self.n, self.n:]

    @property
    def Y22(self) -> np.ndarray:
        return self.Y[self.n:, self.n:]


@dataclass(frozen=True)
class GradientTriple:
    """Partial derivatives of the cost with respect to (A_K, B_K, C_K)."""

    dA: np.ndarray
    dB: np.ndarray
    dC: np.ndarray

    def norm(self) -> float:
        return float(np.sqrt(
            np.sum(self.dA ** 2) + np.sum(self.dB ** 2) + np.sum(self.dC ** 2)
        ))

    def as_direction(self) -> Direction:
        return Direction(dA=self.dA, dB=self.dB, dC=self.dC)

    def as_matrix(self) -> np.ndarray:
        """Lumped form ``[[0, dC], [dB, dA]]`` (the D slot is zero because
        the cost is only finite for strictly proper controllers)."""
        m, q, p = self.dC.shape[0], self.dA.shape[0], self.dB.shape[1]
        M = np.zeros((m + q, p + q))
        M[:m, p:] = self.dC
        M[m:, :p] = self.dB
        M[m:, p:] = self.dA
        return M


@dataclass(frozen=True)
class RestrictedSpectrum:
    """Extremal Hessian eigenvalues restricted to the orbit's normal space."""

    min_eig: float
    max_eig: float
    rcond: float


def _lumped_weights(plant: Plant, K: Controller) -> tuple[np.ndarray, np.ndarray]:
    n, q = plant.n, K.order
    W_bar = np.zeros((n + q, n + q))
    W_bar[:n, :n] = plant.W
    W_bar[n:, n:] = K.B_K @ plant.V @ K.B_K.T
    Q_bar = np.zeros((n + q, n + q))
    Q_bar[:n, :n] = plant.Q
    Q_bar[n:, n:] = K.C_K.T @ plant.R @ K.C_K
    return W_bar, Q_bar


def lqg_cost(plant: Plant, K: Controller) -> CostEval:
    """Closed-loop LQG cost of a strictly proper stabilizing controller.

    Raises
    ------
    ValueError
        If ``D_K != 0`` (the cost is unbounded for proper controllers with a
        direct term, so it is not evaluated).
    NotStabilizing
        If the closed loop is not stable.
    IllConditioned
        If the two independently solved trace expressions for the cost
        disagree beyond ``TRACE_AGREEMENT_RTOL`` (relative), which happens
        for stable but extremely non-normal closed loops whose Lyapunov
        solutions cannot be computed to any accuracy in double precision.
    """
    if not K.strictly_proper:
        raise ValueError("LQG cost is unbounded for D_K != 0; "
                         "evaluate strictly proper controllers only")
    A_cl = closed_loop(plant, K)
    rep = stability(A_cl, plant.domain)
    if not rep.stable:
        raise NotStabilizing(
            f"closed loop is not stable (margin {rep.margin:.3e})"
        )
    W_bar, Q_bar = _lumped_weights(plant, K)
    X = solve_lyapunov(A_cl, W_bar, plant.domain)
    Y = solve_lyapunov(A_cl.T, Q_bar, plant.domain)
    J_x = float(np.trace(Q_bar @ X))
    J_y = float(np.trace(W_bar @ Y))
    gap = abs(J_x - J_y)
    if gap > TRACE_AGREEMENT_RTOL * (1.0 + max(abs(J_x), abs(J_y))):
        raise IllConditioned(
            f"cost trace routes disagree ({J_x:.6e} vs {J_y:.6e}); the "
            f"closed-loop Lyapunov solutions are unreliable"
        )
    return CostEval(
        J=0.5 * (J_x + J_y),
        X=X,
        Y=Y,
        trace_gap=gap,
        n=plant.n,
        q=K.order,
    )


def lqg_gradient(plant: Plant, K: Controller,
                 cost: CostEval | None = None) -> GradientTriple:
    """Gradient of the LQG cost with respect to the controller blocks.

    ``cost`` may carry a precomputed :func:`lqg_cost` result for this exact
    (plant, K) pair to avoid re-solving the Lyapunov equations.
    """
    ce = lqg_cost(plant, K) if cost is None else cost
    X11, X12, X22 = ce.X11, ce.X12, ce.X22
    Y11, Y12, Y22 = ce.Y11, ce.Y12, ce.Y22
    A, B, C, V, R = plant.A, plant.B, plant.C, plant.V, plant.R
    A_K, B_K, C_K = K.A_K, K.B_K, K.C_K

    if plant.domain is TimeDomain.CONTINUOUS:
        gA = 2.0 * (Y12.T @ X12 + Y22 @ X22)
        gB = 2.0 * (Y22 @ B_K @ V + Y22 @ X12.T @ C.T + Y12.T @ X11 @ C.T)
        gC = 2.0 * (R @ C_K @ X22 + B.T @ Y11 @ X12 + B.T @ Y12 @ X22)
    else:
        gA = 2.0 * (Y12.T @ (A @ X12 + B @ C_K @ X22)
                    + Y22 @ A_K @ X22 + Y22 @ B_K @ C @ X12)
        gB = 2.0 * (Y12.T @ (A @ X11 + B @ C_K @ X12.T) @ C.T
                    + Y22 @ A_K @ X12.T @ C.T
                    + Y22 @ B_K @ (C @ X11 @ C.T + V))
        gC = 2.0 * (B.T @ Y12 @ (A_K @ X22 + B_K @ C @ X12)
                    + B.T @ Y11 @ A @ X12
                    + (B.T @ Y11 @ B + R) @ C_K @ X22)
    return GradientTriple(dA=gA, dB=gB, dC=gC)


def _embedded_direction(plant: Plant, delta: Direction) -> np.ndarray:
    """Closed-loop embedding ``[[0, B dC], [dB C, dA]]`` of a direction."""
    n, q = plant.n, delta.dA.shape[0]
    E = np.zeros((n + q, n + q))
    E[:n, n:] = plant.B @ delta.dC
    E[n:, :n] = delta.dB @ plant.C
    E[n:, n:] = delta.dA
    return E


def _pad_controller_block(n: int, block: np.ndarray) -> np.ndarray:
    """diag(0_n, block) embedding into closed-loop coordinates."""
    q = block.shape[0]
    M = np.zeros((n + q, n + q))
    M[n:, n:] = block
    return M


def hessian_quadratic_form(plant: Plant, K: Controller, delta: Direction,
                           cost: CostEval | None = None) -> float:
    """Second directional derivative ``Hess J(K)[delta, delta]``.

    One extra Lyapunov solve per call (the first-order Gramian variation);
    the remainder is trace arithmetic on the existing cost Gramians.
    """
    if delta.dA.shape != K.A_K.shape or delta.dB.shape != K.B_K.shape \
            or delta.dC.shape != K.C_K.shape:
        raise ValueError("direction shapes do not match the controller")
    ce = lqg_cost(plant, K) if cost is None else cost
    A_cl = closed_loop(plant, K)
    X, Y = ce.X, ce.Y
    n = plant.n
    V, R = plant.V, plant.R
    B_K, C_K = K.B_K, K.C_K
    dB, dC = delta.dB, delta.dC

    E = _embedded_direction(plant, delta)
    sym_BV = _pad_controller_block(n, B_K @ V @ dB.T + dB @ V @ B_K.T)
    cross_CR = _pad_controller_block(n, C_K.T @ R @ dC)
    quad_BV = _pad_controller_block(n, dB @ V @ dB.T)
    quad_CR = _pad_controller_block(n, dC.T @ R @ dC)

    if plant.domain is TimeDomain.CONTINUOUS:
        M1 = E @ X + X @ E.T + sym_BV
        Xp = solve_lyapunov(A_cl, M1, plant.domain)
        value = 2.0 * np.trace(
            2.0 * E @ Xp @ Y + 2.0 * cross_CR @ Xp
            + quad_BV @ Y + quad_CR @ X
        )
    else:
        M1 = E @ X @ A_cl.T + A_cl @ X @ E.T + sym_BV
        Xp = solve_lyapunov(A_cl, M1, plant.domain)
        value = 2.0 * np.trace(
            2.0 * E @ Xp @ A_cl.T @ Y + E @ X @ E.T @ Y
            + 2.0 * cross_CR @ Xp + quad_BV @ Y + quad_CR @ X
        )
    return float(value)


def hessian_bilinear(plant: Plant, K: Controller, d1: Direction, d2: Direction,
                     cost: CostEval | None = None) -> float:
    """Polarization of the quadratic form:
    ``Hess[d1, d2] = (Hess[d1+d2] - Hess[d1-d2]) / 4``."""
    ce = lqg_cost(plant, K) if cost is None else cost
    plus = hessian_quadratic_form(plant, K, d1 + d2, cost=ce)
    minus = hessian_quadratic_form(plant, K, d1 - d2, cost=ce)
    return 0.25 * (plus - minus)


def hessian_matrix(plant: Plant, K: Controller,
                   cost: CostEval | None = None) -> np.ndarray:
    """Dense Hessian in the fixed direction layout.

    Assembled from quadratic forms on the coordinate directions and their
    pairwise sums (d(d+1)/2 Lyapunov solves for d parameters), then
    symmetrized.
    """
    ce = lqg_cost(plant, K) if cost is None else cost
    q, p, m = K.order, K.p, K.m
    d = q * q + q * p + m * q
    basis = [Direction.from_vector(row, q, p, m) for row in np.eye(d)]
    diag = np.array([
        hessian_quadratic_form(plant, K, e, cost=ce) for e in basis
    ])
    H = np.diag(diag)
    for i in range(d):
        for j in range(i + 1, d):
            pair = hessian_quadratic_form(plant, K, basis[i] + basis[j], cost=ce)
            H[i, j] = H[j, i] = 0.5 * (pair - diag[i] - diag[j])
    return 0.5 * (H + H.T)


def restricted_rcond(plant: Plant, K: Controller,
                     cost: CostEval | None = None,
                     basis: TangentBasis | None = None,
                     hessian: np.ndarray | None = None) -> RestrictedSpectrum:
    """Extremal Hessian eigenvalues on the orthogonal complement of the
    similarity-orbit tangent space, and their ratio.

    The orbit directions span a null subspace of the Hessian at any minimal
    stationary point, so conditioning is only meaningful transverse to the
    orbit.  Requires a stationary (gradient below the relative gate) and
    minimal controller.

    Raises
    ------
    NotStationary
        If ``||grad||_F > STATIONARITY_RTOL * (1 + |J|)``.
    NonMinimalController
        If the realization is not minimal.
    """
    ce = lqg_cost(plant, K) if cost is None else cost
    grad = lqg_gradient(plant, K, cost=ce)
    gate = STATIONARITY_RTOL * (1.0 + abs(ce.J))
    if grad.norm() > gate:
        raise NotStationary(
            f"gradient norm {grad.norm():.3e} exceeds stationarity gate {gate:.3e}"
        )
    tb = tangent_space(K) if basis is None else basis  # raises NonMinimalController
    H = hessian_matrix(plant, K, cost=ce) if hessian is None else hessian
    P = tb.complement_onb  # rows are an orthonormal basis of the normal space
    if P.shape[0] == 0:
        raise NonMinimalController(
            "orbit tangent space fills the whole parameter space"
        )
    H_res = P @ H @ P.T
    w = np.linalg.eigvalsh(0.5 * (H_res + H_res.T))
    min_eig, max_eig = float(w[0]), float(w[-1])
    rcond = min_eig / max_eig if max_eig > 0 else np.nan
    return RestrictedSpectrum(min_eig=min_eig, max_eig=max_eig, rcond=rcond)
