"""Convex lift of the full-order stabilizing set, and explicit paths.

A full-order stabilizing controller can be lifted, via a classical change of
variables, to a tuple ``Z = (X, Y, M, G, H, F, Pi, Xi)`` whose first six
blocks live in a convex set cut out by strict matrix inequalities and whose
``Pi`` factor is invertible.  The inverse map ``realize`` sends any such
tuple back to a stabilizing controller.  Because the convex part is
path-connected and the invertible factor has exactly two components
(``det Pi > 0`` / ``det Pi < 0``), the stabilizing set has at most two
path-connected components, and explicit controller paths can be built by
interpolating lifts.  When the endpoint signs differ, a path exists exactly
when it can be routed through a controller that is fixed by a
negative-determinant similarity — a reduced-order stabilizer padded with one
decoupled stable mode.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, replace

import numpy as np
from scipy.linalg import expm, logm, polar

from .errors import (
    DegeneratePi,
    InvariantViolated,
    NoPathFound,
    NotStabilizing,
    StabilityLostOnPath,
)
from .linalg import TimeDomain, solve_lyapunov, stability
from .model import Controller, Plant, closed_loop, is_stabilizing

__all__ = [
    "Sign",
    "ConvexLift",
    "lift",
    "realize",
    "transform_lift",
    "verify_lift",
    "component_sign",
    "path_between",
    "reduced_order_search",
]

# Relative gate on the coupling residual ||Xi Pi - (I - Y X)||.
COUPLING_TOL = 1e-9
# A Pi factor whose smallest singular value falls below this (relative to the
# largest) is treated as degenerate and perturbed.
PI_SINGULAR_RTOL = 1e-9
# Candidates from the random search must clear the stability boundary by this
# much; a spectral margin within rounding noise of zero is not stabilizing.
SEARCH_MARGIN_TOL = 1e-8


class Sign(enum.Enum):
    PLUS = "Plus"
    MINUS = "Minus"


@dataclass(frozen=True)
class ConvexLift:
    """Change-of-variables image of a full-order stabilizing controller.

    ``(X, Y, M, G, H, F)`` lie in the convex strict-inequality set; ``Pi``
    and ``Xi`` are the invertible factors tied to them by the coupling
    ``Xi @ Pi = I - Y @ X``.  ``perturbed`` records that ``Pi`` needed a
    small diagonal perturbation to become comfortably invertible.
    """

    X: np.ndarray
    Y: np.ndarray
    M: np.ndarray
    G: np.ndarray
    H: np.ndarray
    F: np.ndarray
    Pi: np.ndarray
    Xi: np.ndarray
    perturbed: bool = False

    @property
    def n(self) -> int:
        return self.X.shape[0]


def _n_block(plant: Plant, Z: ConvexLift) -> np.ndarray:
    """The block matrix N whose definiteness encodes closed-loop stability:
    ``N = [[A X + B F, A + B G C], [M, Y A + H C]]``.
    """
    A, B, C = plant.A, plant.B, plant.C
    n = plant.n
    N = np.zeros((2 * n, 2 * n))
    N[:n, :n] = A @ Z.X + B @ Z.F
    N[:n, n:] = A + B @ Z.G @ C
    N[n:, :n] = Z.M
    N[n:, n:] = Z.Y @ A + Z.H @ C
    return N


def verify_lift(plant: Plant, Z: ConvexLift) -> dict:
    """Machine-check the lift invariants; returns the numeric margins.

    Keys: ``coupling`` (residual of ``Xi Pi = I - Y X``), ``open_pd``
    (smallest eigenvalue of ``[[X, I], [I, Y]]``, must be > 0), ``lmi``
    (stability-inequality margin, must be > 0), ``pi_min_sv`` (smallest
    singular value of ``Pi``).
    """
    n = plant.n
    I_n = np.eye(n)
    coupling = float(np.linalg.norm(Z.Xi @ Z.Pi - (I_n - Z.Y @ Z.X)))
    Xb = np.block([[Z.X, I_n], [I_n, Z.Y]])
    open_pd = float(np.linalg.eigvalsh(0.5 * (Xb + Xb.T))[0])
    N = _n_block(plant, Z)
    if plant.domain is TimeDomain.CONTINUOUS:
        lmi = float(-np.linalg.eigvalsh(N + N.T)[-1])
    else:
        big = np.block([[Xb, N], [N.T, Xb]])
        lmi = float(np.linalg.eigvalsh(0.5 * (big + big.T))[0])
    pi_min_sv = float(np.linalg.svd(Z.Pi, compute_uv=False)[-1])
    return {"coupling": coupling, "open_pd": open_pd, "lmi": lmi,
            "pi_min_sv": pi_min_sv}


def _check_lift(plant: Plant, Z: ConvexLift, context: str) -> None:
    margins = verify_lift(plant, Z)
    scale = 1.0 + float(np.linalg.norm(Z.X)) * float(np.linalg.norm(Z.Y))
    if margins["coupling"] > COUPLING_TOL * scale:
        raise InvariantViolated(
            f"{context}: coupling residual {margins['coupling']:.3e} "
            f"exceeds {COUPLING_TOL * scale:.3e}"
        )
    if margins["open_pd"] <= 0:
        raise InvariantViolated(
            f"{context}: [[X,I],[I,Y]] is not positive definite "
            f"(min eig {margins['open_pd']:.3e})"
        )
    if margins["lmi"] <= 0:
        raise InvariantViolated(
            f"{context}: stability matrix inequality is not strict "
            f"(margin {margins['lmi']:.3e})"
        )
    if margins["pi_min_sv"] == 0.0:
        raise InvariantViolated(f"{context}: Pi is exactly singular")


def _change_of_variables(plant: Plant, K: Controller, X: np.ndarray,
                         Y: np.ndarray, Pi: np.ndarray,
                         Xi: np.ndarray) -> tuple[np.ndarray, ...]:
    """Map controller matrices to (M, G, H, F) for given lift factors."""
    A, B, C = plant.A, plant.B, plant.C
    D_K = K.D_K
    M = (Y @ (A + B @ D_K @ C) @ X + Xi @ K.B_K @ C @ X
         + Y @ B @ K.C_K @ Pi + Xi @ K.A_K @ Pi)
    H = Y @ B @ D_K + Xi @ K.B_K
    F = D_K @ C @ X + K.C_K @ Pi
    return M, D_K.copy(), H, F


def _lyapunov_margin(plant: Plant, A_cl: np.ndarray, P: np.ndarray) -> float:
    """Strictness margin of the closed-loop Lyapunov inequality at P."""
    if plant.domain is TimeDomain.CONTINUOUS:
        Rm = A_cl @ P + P @ A_cl.T
        return float(-np.linalg.eigvalsh(0.5 * (Rm + Rm.T))[-1])
    Rm = P - A_cl @ P @ A_cl.T
    return float(np.linalg.eigvalsh(0.5 * (Rm + Rm.T))[0])


def lift(plant: Plant, K: Controller) -> ConvexLift:
    """Lift a full-order stabilizing controller to the convex parameter set.

    Solves the closed-loop Lyapunov equation with right-hand side identity
    (guaranteeing a strict certificate), partitions the solution ``P`` as
    ``[[X, Pi^T], [Pi, *]]`` with inverse ``[[Y, Xi], [Xi^T, *]]``, and
    applies the change of variables.  ``realize(plant, lift(plant, K))``
    recovers ``K`` exactly (to rounding) for any valid factorization.

    When the natural ``Pi`` block is singular or near-singular (which
    happens systematically for controllers with decoupled modes), a small
    diagonal perturbation is added to the off-diagonal blocks of ``P`` and
    the certificate is re-verified; the result carries ``perturbed=True``.

    Raises
    ------
    NotStabilizing
        If ``K`` does not stabilize the plant.
    DegeneratePi
        If no acceptable perturbation renders ``Pi`` invertible while
        keeping the Lyapunov certificate strict.
    """
    n = plant.n
    if K.order != n:
        raise ValueError(
            f"lift expects a full-order controller (q = {K.order}, n = {n})"
        )
    rep = is_stabilizing(plant, K)
    if not rep.stable:
        raise NotStabilizing(
            f"controller does not stabilize the plant (margin "
            f"{rep.margin:.3e})"
        )
    A_cl = closed_loop(plant, K)
    P = solve_lyapunov(A_cl, np.eye(2 * n), plant.domain)

    Pi = P[n:, :n]
    svals = np.linalg.svd(Pi, compute_uv=False)
    perturbed = False
    if svals[-1] <= PI_SINGULAR_RTOL * max(1.0, svals[0]):
        delta = 1e-6 * max(1.0, float(np.linalg.norm(Pi)))
        ok = False
        for _ in range(4):
            P_try = P.copy()
            P_try[n:, :n] += delta * np.eye(n)
            P_try[:n, n:] += delta * np.eye(n)
            Pi_try = P_try[n:, :n]
            s_try = np.linalg.svd(Pi_try, compute_uv=False)
            pd_ok = np.linalg.eigvalsh(P_try)[0] > 0
            margin_ok = _lyapunov_margin(plant, A_cl, P_try) > 0
            if (s_try[-1] > 1e-3 * delta) and pd_ok and margin_ok:
                P = P_try
                Pi = Pi_try
                ok = True
                break
            delta *= np.sqrt(10.0)
        if not ok:
            raise DegeneratePi(
                "Pi block remains numerically singular after perturbation "
                f"(smallest singular value {svals[-1]:.3e})"
            )
        perturbed = True

    X = 0.5 * (P[:n, :n] + P[:n, :n].T)
    P_inv = np.linalg.inv(P)
    Y = 0.5 * (P_inv[:n, :n] + P_inv[:n, :n].T)
    Xi = P_inv[:n, n:]
    M, G, H, F = _change_of_variables(plant, K, X, Y, Pi, Xi)
    Z = ConvexLift(X=X, Y=Y, M=M, G=G, H=H, F=F, Pi=Pi, Xi=Xi,
                   perturbed=perturbed)
    _check_lift(plant, Z, "lift")
    return Z


def realize(plant: Plant, Z: ConvexLift, check: bool = True) -> Controller:
    """Map a lift tuple back to a stabilizing controller.

    Computes ``[[I, 0], [Y B, Xi]]^{-1} [[G, F], [H, M - Y A X]]
    [[I, C X], [0, Pi]]^{-1}`` and splits the result into the lumped
    controller blocks.  A direct-feedthrough block below rounding noise is
    zeroed, so lifts of strictly proper controllers realize back strictly
    proper.

    Raises
    ------
    InvariantViolated
        If ``check`` is on and ``Z`` fails the lift invariants.
    """
    if check:
        _check_lift(plant, Z, "realize")
    n, m, p = plant.n, plant.m, plant.p
    A, B, C = plant.A, plant.B, plant.C
    left = np.block([
        [np.eye(m), np.zeros((m, n))],
        [Z.Y @ B, Z.Xi],
    ])
    mid = np.block([
        [Z.G, Z.F],
        [Z.H, Z.M - Z.Y @ A @ Z.X],
    ])
    right = np.block([
        [np.eye(p), C @ Z.X],
        [np.zeros((n, p)), Z.Pi],
    ])
    K_mat = np.linalg.solve(left, mid)
    K_mat = np.linalg.solve(right.T, K_mat.T).T
    D_K = K_mat[:m, :p]
    if np.linalg.norm(D_K) <= 1e-10 * (1.0 + np.linalg.norm(K_mat)):
        D_K = np.zeros((m, p))
    return Controller(
        A_K=K_mat[m:, p:],
        B_K=K_mat[m:, :p],
        C_K=K_mat[:m, p:],
        D_K=D_K,
    )


def transform_lift(Z: ConvexLift, T: np.ndarray) -> ConvexLift:
    """Carry a lift along a controller change of coordinates.

    Replaces ``Pi -> T Pi`` and ``Xi -> Xi T^{-1}``; the realization of the
    result is exactly the similarity transform of the original realization.
    With ``det T < 0`` this swaps the component sign.
    """
    T = np.asarray(T, dtype=float)
    Xi_new = np.linalg.solve(T.T, Z.Xi.T).T
    return replace(Z, Pi=T @ Z.Pi, Xi=Xi_new)


def component_sign(plant: Plant, K: Controller) -> Sign:
    """Sign of ``det Pi`` for the canonical lift of ``K``.

    Distinguishes the two images of the lifted parameter set.  When the
    stabilizing set is connected the two images overlap, so equal signs
    never prove same-component membership and differing signs never prove
    disconnection by themselves; :func:`path_between` is the ground truth.
    """
    Z = lift(plant, K)
    sign, _ = np.linalg.slogdet(Z.Pi)
    return Sign.PLUS if sign > 0 else Sign.MINUS


def _pad_with_stable_mode(plant: Plant, K_red: Controller) -> Controller:
    """Order-(q+1) controller: ``K_red`` plus one decoupled stable mode.

    The added mode (-1 in continuous time, 0 in discrete time) makes the
    result a fixed point of the similarity ``diag(I, -1)``, so it lies in
    both component-sign classes.
    """
    alpha = -1.0 if plant.domain is TimeDomain.CONTINUOUS else 0.0
    q = K_red.order
    A_aug = np.zeros((q + 1, q + 1))
    A_aug[:q, :q] = K_red.A_K
    A_aug[q, q] = alpha
    B_aug = np.vstack([K_red.B_K, np.zeros((1, K_red.p))])
    C_aug = np.hstack([K_red.C_K, np.zeros((K_red.m, 1))])
    return Controller(A_K=A_aug, B_K=B_aug, C_K=C_aug)


def _rotation_log(Q0: np.ndarray, Q1: np.ndarray) -> np.ndarray:
    """Skew-symmetric generator of the rotation path from Q0 to Q1."""
    R = Q0.T @ Q1
    L = logm(R)
    L = np.real(L)
    L = 0.5 * (L - L.T)
    if np.linalg.norm(expm(L) - R) > 1e-8 * (1.0 + np.linalg.norm(R)):
        raise NoPathFound(
            "could not build an orthogonal-factor path between the lifts "
            "(matrix logarithm failed to converge)"
        )
    return L


def _direct_path(plant: Plant, Z0: ConvexLift, Z1: ConvexLift,
                 steps: int, K_start: Controller,
                 K_end: Controller) -> list[Controller]:
    """Controllers along the straight-line lift homotopy Z0 -> Z1."""
    n = plant.n
    I_n = np.eye(n)
    Q0, S0 = polar(Z0.Pi, side="right")
    Q1, S1 = polar(Z1.Pi, side="right")
    L = _rotation_log(Q0, Q1)

    samples: list[Controller] = []
    for k in range(steps + 1):
        if k == 0:
            samples.append(K_start)
            continue
        if k == steps:
            samples.append(K_end)
            continue
        chosen = None
        for nudge in (0.0, 0.25, -0.25):
            theta = (k + nudge) / steps
            X_t = (1 - theta) * Z0.X + theta * Z1.X
            Y_t = (1 - theta) * Z0.Y + theta * Z1.Y
            M_t = (1 - theta) * Z0.M + theta * Z1.M
            G_t = (1 - theta) * Z0.G + theta * Z1.G
            H_t = (1 - theta) * Z0.H + theta * Z1.H
            F_t = (1 - theta) * Z0.F + theta * Z1.F
            Pi_t = (Q0 @ expm(theta * L)) @ ((1 - theta) * S0 + theta * S1)
            Xi_t = np.linalg.solve(Pi_t.T, (I_n - Y_t @ X_t).T).T
            Z_t = ConvexLift(X=X_t, Y=Y_t, M=M_t, G=G_t, H=H_t, F=F_t,
                             Pi=Pi_t, Xi=Xi_t)
            K_t = realize(plant, Z_t, check=False)
            if is_stabilizing(plant, K_t).stable:
                chosen = K_t
                break
        if chosen is None:
            raise StabilityLostOnPath(
                f"path sample {k}/{steps} failed the stability check; the "
                "lift homotopy should preserve stability, so this indicates "
                "a defect or severe ill-conditioning"
            )
        samples.append(chosen)
    return samples


def path_between(plant: Plant, K0: Controller, K1: Controller,
                 steps: int = 200,
                 bridge: Controller | None = None) -> list[Controller]:
    """Explicit all-stabilizing path from ``K0`` to ``K1`` in ``steps`` legs.

    Both controllers are lifted; if their ``det Pi`` signs agree, the lifts
    are joined by a straight line in the convex blocks and a
    polar-decomposition homotopy in ``Pi`` (rotation geodesic plus linear
    interpolation of the symmetric factor), and every sample is mapped back
    through :func:`realize`.  If the signs differ, a reduced-order
    stabilizer ``bridge`` (order n-1) must be supplied; the path is then
    routed through the bridge padded with one decoupled stable mode, which
    is reachable from both signs.

    Returns ``steps + 1`` controllers with exact endpoints, every one
    stabilizing.

    Raises
    ------
    NoPathFound
        If the signs differ and no bridge was supplied.
    StabilityLostOnPath
        If a realized sample fails the stability check even after local
        refinement (a defect by construction, surfaced loudly).
    """
    if steps < 2:
        raise ValueError(f"steps must be at least 2, got {steps}")
    Z0 = lift(plant, K0)
    Z1 = lift(plant, K1)
    s0 = np.linalg.slogdet(Z0.Pi)[0]
    s1 = np.linalg.slogdet(Z1.Pi)[0]
    if s0 == s1:
        return _direct_path(plant, Z0, Z1, steps, K0, K1)

    if bridge is None:
        raise NoPathFound(
            "the endpoint lifts have opposite det(Pi) signs; supply a "
            "reduced-order stabilizing controller as a bridge (if one "
            "exists) to route the path through both components"
        )
    if bridge.order != plant.n - 1:
        raise ValueError(
            f"bridge must have order n-1 = {plant.n - 1}, got {bridge.order}"
        )
    rep = is_stabilizing(plant, bridge)
    if not rep.stable:
        raise NotStabilizing(
            f"bridge controller does not stabilize the plant (margin "
            f"{rep.margin:.3e})"
        )
    K_j = _pad_with_stable_mode(plant, bridge)
    Z_j = lift(plant, K_j)
    T_flip = np.eye(plant.n)
    T_flip[-1, -1] = -1.0

    Z_j0 = Z_j
    if np.linalg.slogdet(Z_j0.Pi)[0] != s0:
        Z_j0 = transform_lift(Z_j, T_flip)
    Z_j1 = Z_j
    if np.linalg.slogdet(Z_j1.Pi)[0] != s1:
        Z_j1 = transform_lift(Z_j, T_flip)

    first = steps // 2
    second = steps - first
    leg1 = _direct_path(plant, Z0, Z_j0, first, K0, K_j)
    leg2 = _direct_path(plant, Z_j1, Z1, second, K_j, K1)
    return leg1 + leg2[1:]


def reduced_order_search(plant: Plant, q: int, budget: int = 100_000,
                         seed: int = 0) -> Controller | None:
    """Search for a stabilizing controller of order ``q`` within ``budget``.

    Deterministic given ``seed``.  Tries the all-zero controller padded
    with decoupled stable modes first (which succeeds for every open-loop
    stable plant), then random entrywise sampling over growing boxes with
    batched eigenvalue tests, then a local spectral-margin minimization
    from the best sampled candidates.  Returning ``None`` means nothing was
    found within budget — it is NOT a proof that no order-``q`` stabilizer
    exists.
    """
    if q < 0:
        raise ValueError(f"controller order must be nonnegative, got {q}")
    n, m, p = plant.n, plant.m, plant.p

    alpha = -1.0 if plant.domain is TimeDomain.CONTINUOUS else 0.0
    K_zero = Controller(A_K=alpha * np.eye(q), B_K=np.zeros((q, p)),
                        C_K=np.zeros((m, q)))
    if is_stabilizing(plant, K_zero).margin < -SEARCH_MARGIN_TOL:
        return K_zero
    if q == 0:
        # No free parameters remain: order zero stabilizes iff A is stable.
        return None

    rng = np.random.default_rng(seed)
    n_params = q * q + q * p + m * q
    scales = (0.5, 1.0, 2.0, 5.0)
    batch = 2000

    def build(params: np.ndarray) -> Controller:
        C_K = params[: m * q].reshape(m, q)
        B_K = params[m * q: m * q + q * p].reshape(q, p)
        A_K = params[m * q + q * p:].reshape(q, q)
        return Controller(A_K=A_K, B_K=B_K, C_K=C_K)

    def batched_margin(params: np.ndarray) -> np.ndarray:
        count = params.shape[0]
        cl = np.zeros((count, n + q, n + q))
        cl[:, :n, :n] = plant.A
        C_K = params[:, : m * q].reshape(count, m, q)
        B_K = params[:, m * q: m * q + q * p].reshape(count, q, p)
        A_K = params[:, m * q + q * p:].reshape(count, q, q)
        cl[:, :n, n:] = plant.B @ C_K
        cl[:, n:, :n] = B_K @ plant.C
        cl[:, n:, n:] = A_K
        eigs = np.linalg.eigvals(cl)
        if plant.domain is TimeDomain.CONTINUOUS:
            return eigs.real.max(axis=1)
        return np.abs(eigs).max(axis=1) - 1.0

    best_params = None
    best_margin = np.inf
    used = 0
    while used < budget:
        size = min(batch, budget - used)
        scale = scales[(used // batch) % len(scales)]
        params = rng.uniform(-scale, scale, size=(size, n_params))
        margins = batched_margin(params)
        idx = int(np.argmin(margins))
        if margins[idx] < best_margin:
            best_margin = float(margins[idx])
            best_params = params[idx].copy()
        if margins[idx] < -SEARCH_MARGIN_TOL:
            order = np.nonzero(margins < -SEARCH_MARGIN_TOL)[0]
            K_found = build(params[order[0]])
            if is_stabilizing(plant, K_found).margin < -SEARCH_MARGIN_TOL:
                return K_found
        used += size

    if best_params is not None and best_margin < 0.5:
        from scipy.optimize import minimize

        def objective(v: np.ndarray) -> float:
            return float(batched_margin(v[np.newaxis, :])[0])

        res = minimize(objective, best_params, method="Nelder-Mead",
                       options={"maxiter": 400, "xatol": 1e-10,
                                "fatol": 1e-12})
        if res.fun < -SEARCH_MARGIN_TOL:
            K_found = build(res.x)
            if is_stabilizing(plant, K_found).margin < -SEARCH_MARGIN_TOL:
                return K_found
    return None
