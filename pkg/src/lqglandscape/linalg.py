"""Dense matrix-equation kernels: stability tests, Lyapunov and Riccati
solves, and controllability/observability diagnostics.

Conventions used throughout the package:

* ``TimeDomain.CONTINUOUS`` means stability of ``M`` is ``max Re lambda < 0``
  and ``TimeDomain.DISCRETE`` means ``max |lambda| < 1``.  Stability margins
  are reported as ``max Re lambda`` and ``max |lambda| - 1`` respectively, so
  "stable iff margin < 0" holds in both domains.
* ``solve_lyapunov(M, S, dom)`` uses the forward (covariance) orientation in
  both domains:

  - continuous: ``M X + X M^T + S = 0``
  - discrete:   ``X = M X M^T + S``

  The adjoint-orientation equations are obtained by passing ``M^T``.
* Solutions of symmetric equations are explicitly symmetrized as
  ``(X + X^T) / 2`` before being returned.

The reference Lyapunov path is a dense Kronecker vectorization solve, which
is exact to working precision at the matrix sizes this package targets
(state dimension plus controller order on the order of tens).  A Schur-based
path (scipy) is available behind the same contract via ``method="schur"``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

from .errors import (
    IllConditioned,
    NoStabilizingSolution,
    NotStabilizable,
    UnstableCoefficient,
)

__all__ = [
    "RTOL",
    "RANK_TOL",
    "TimeDomain",
    "StabilityReport",
    "MinimalityReport",
    "stability",
    "solve_lyapunov",
    "solve_care",
    "ctrb",
    "obsv",
    "minimality",
    "psd_sqrt",
    "sorted_eigenvalues",
]

# Relative residual tolerance for matrix-equation solves.
RTOL = 1e-9
# Relative singular-value cutoff for numerical rank decisions.
RANK_TOL = 1e-8


class TimeDomain(enum.Enum):
    """Whether the dynamics evolve in continuous or discrete time."""

    CONTINUOUS = "continuous"
    DISCRETE = "discrete"

    @classmethod
    def from_string(cls, s: str) -> "TimeDomain":
        try:
            return cls(s.strip().lower())
        except ValueError:
            raise ValueError(
                f"unknown time domain {s!r}; expected 'continuous' or 'discrete'"
            ) from None


@dataclass(frozen=True)
class StabilityReport:
    """Outcome of a stability test.

    Attributes
    ----------
    stable : bool
        True iff the margin is strictly negative.
    margin : float
        ``max Re lambda`` (continuous) or ``max |lambda| - 1`` (discrete).
    eigenvalues : ndarray
        All eigenvalues, sorted lexicographically by (real part, imag part).
    """

    stable: bool
    margin: float
    eigenvalues: np.ndarray


@dataclass(frozen=True)
class MinimalityReport:
    """Rank diagnostics for a state-space triple (A, B, C).

    ``min_singular_values`` holds the decision margins: the n-th largest
    singular value of the controllability and observability matrices.
    """

    controllable: bool
    observable: bool
    minimal: bool
    min_singular_values: tuple[float, float]


def _as_square(M, name: str = "M") -> np.ndarray:
    M = np.atleast_2d(np.asarray(M, dtype=float))
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError(f"{name} must be square, got shape {M.shape}")
    return M


def _as_symmetric(S, name: str = "S") -> np.ndarray:
    S = _as_square(S, name)
    scale = 1.0 + np.linalg.norm(S)
    if np.linalg.norm(S - S.T) > 1e-8 * scale:
        raise ValueError(f"{name} must be symmetric")
    return 0.5 * (S + S.T)


def sorted_eigenvalues(M) -> np.ndarray:
    """Eigenvalues of ``M`` sorted lexicographically by (real, imag)."""
    w = np.linalg.eigvals(_as_square(M))
    order = np.lexsort((w.imag, w.real))
    return w[order]


def stability(M, dom: TimeDomain) -> StabilityReport:
    """Test asymptotic stability of ``M`` in the given time domain.

    An empty matrix (size 0) is vacuously stable with margin ``-inf``.
    """
    M = _as_square(M)
    if M.shape[0] == 0:
        return StabilityReport(True, -np.inf, np.zeros(0, dtype=complex))
    w = sorted_eigenvalues(M)
    if dom is TimeDomain.CONTINUOUS:
        margin = float(np.max(w.real))
    else:
        margin = float(np.max(np.abs(w))) - 1.0
    return StabilityReport(margin < 0.0, margin, w)


def _lyapunov_residual(M: np.ndarray, S: np.ndarray, X: np.ndarray,
                       dom: TimeDomain) -> float:
    if dom is TimeDomain.CONTINUOUS:
        res = M @ X + X @ M.T + S
    else:
        res = M @ X @ M.T + S - X
    return float(np.linalg.norm(res))


def solve_lyapunov(M, S, dom: TimeDomain, method: str = "kron") -> np.ndarray:
    """Solve the forward Lyapunov equation with coefficient ``M``.

    Continuous: ``M X + X M^T + S = 0``.  Discrete: ``X = M X M^T + S``.

    Parameters
    ----------
    M : (n, n) array_like
        Coefficient matrix; must be stable in ``dom``.
    S : (n, n) array_like
        Symmetric right-hand side.
    dom : TimeDomain
    method : {"kron", "schur"}
        "kron" solves the dense n^2 x n^2 vectorized system (reference path);
        "schur" delegates to scipy's Schur-based solvers.

    Returns
    -------
    X : (n, n) ndarray, symmetrized.

    Raises
    ------
    UnstableCoefficient
        If ``M`` is not stable (the equation would have no PSD-compatible
        solution).
    IllConditioned
        If the residual exceeds ``RTOL * (1 + ||X||_F)``.
    """
    M = _as_square(M)
    S = _as_symmetric(S)
    if M.shape != S.shape:
        raise ValueError(f"shape mismatch: M is {M.shape}, S is {S.shape}")
    rep = stability(M, dom)
    if not rep.stable:
        raise UnstableCoefficient(
            f"Lyapunov coefficient is not stable (margin {rep.margin:.3e})"
        )
    n = M.shape[0]
    if n == 0:
        return np.zeros((0, 0))

    if method == "kron":
        eye = np.eye(n)
        if dom is TimeDomain.CONTINUOUS:
            lhs = np.kron(eye, M) + np.kron(M, eye)
            rhs = -S.ravel(order="F")
        else:
            lhs = np.eye(n * n) - np.kron(M, M)
            rhs = S.ravel(order="F")
        try:
            x = np.linalg.solve(lhs, rhs)
        except np.linalg.LinAlgError as exc:
            raise IllConditioned(f"vectorized Lyapunov system is singular: {exc}")
        X = x.reshape((n, n), order="F")
    elif method == "schur":
        if dom is TimeDomain.CONTINUOUS:
            X = sla.solve_lyapunov(M, -S)
        else:
            X = sla.solve_discrete_lyapunov(M, S)
    else:
        raise ValueError(f"unknown method {method!r}; expected 'kron' or 'schur'")

    X = 0.5 * (X + X.T)
    res = _lyapunov_residual(M, S, X, dom)
    if res > RTOL * (1.0 + np.linalg.norm(X)):
        raise IllConditioned(
            f"Lyapunov residual {res:.3e} exceeds tolerance; "
            "the coefficient matrix is too close to the stability boundary"
        )
    return X


def _pbh_stabilizable(A: np.ndarray, B: np.ndarray, dom: TimeDomain) -> bool:
    """PBH test: every unstable mode of A must be controllable through B."""
    n = A.shape[0]
    eigs = np.linalg.eigvals(A)
    if dom is TimeDomain.CONTINUOUS:
        bad = eigs[eigs.real >= 0.0]
    else:
        bad = eigs[np.abs(eigs) >= 1.0]
    scale = 1.0 + np.linalg.norm(A) + np.linalg.norm(B)
    for lam in bad:
        pencil = np.hstack([A - lam * np.eye(n), B.astype(complex)])
        smin = np.linalg.svd(pencil, compute_uv=False)[-1]
        if smin <= RANK_TOL * scale:
            return False
    return True


def _care_residual(A, B, R, Q, S, dom: TimeDomain) -> float:
    if dom is TimeDomain.CONTINUOUS:
        res = A.T @ S + S @ A - S @ B @ np.linalg.solve(R, B.T @ S) + Q
    else:
        G = B.T @ S @ B + R
        res = A.T @ S @ A - S - A.T @ S @ B @ np.linalg.solve(G, B.T @ S @ A) + Q
    return float(np.linalg.norm(res))


def solve_care(A, B, R, Q, dom: TimeDomain) -> tuple[np.ndarray, np.ndarray]:
    """Solve the algebraic Riccati equation and return ``(S, K)``.

    Continuous: ``A^T S + S A - S B R^{-1} B^T S + Q = 0`` with gain
    ``K = R^{-1} B^T S``.  Discrete:
    ``S = A^T S A - A^T S B (B^T S B + R)^{-1} B^T S A + Q`` with gain
    ``K = (B^T S B + R)^{-1} B^T S A``.  In both cases ``A - B K`` is
    verified stable; the filter-side equation is solved by calling this
    function on transposed data.

    Raises
    ------
    NotStabilizable
        If (A, B) fails the PBH stabilizability test.
    NoStabilizingSolution
        If the solver fails or the returned solution is not stabilizing.
    IllConditioned
        If the Riccati residual exceeds ``RTOL``-scaled bounds.
    """
    A = _as_square(A, "A")
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.shape[0] != A.shape[0]:
        raise ValueError(f"B has {B.shape[0]} rows, expected {A.shape[0]}")
    R = _as_symmetric(R, "R")
    Q = _as_symmetric(Q, "Q")
    if R.shape[0] != B.shape[1]:
        raise ValueError(f"R must be {B.shape[1]} x {B.shape[1]}")
    if Q.shape != A.shape:
        raise ValueError(f"Q must match A's shape {A.shape}")

    if not _pbh_stabilizable(A, B, dom):
        raise NotStabilizable("(A, B) has an uncontrollable unstable mode")

    try:
        if dom is TimeDomain.CONTINUOUS:
            S = sla.solve_continuous_are(A, B, Q, R)
        else:
            S = sla.solve_discrete_are(A, B, Q, R)
    except (np.linalg.LinAlgError, sla.LinAlgError, ValueError) as exc:
        raise NoStabilizingSolution(f"Riccati solver failed: {exc}")

    S = 0.5 * (S + S.T)
    if dom is TimeDomain.CONTINUOUS:
        K = np.linalg.solve(R, B.T @ S)
    else:
        K = np.linalg.solve(B.T @ S @ B + R, B.T @ S @ A)

    if not stability(A - B @ K, dom).stable:
        raise NoStabilizingSolution("Riccati solution does not stabilize A - B K")
    res = _care_residual(A, B, R, Q, S, dom)
    if res > RTOL * (1.0 + np.linalg.norm(S)) * (1.0 + np.linalg.norm(A)) ** 2:
        raise IllConditioned(f"Riccati residual {res:.3e} exceeds tolerance")
    return S, K


def ctrb(A, B) -> np.ndarray:
    """Controllability matrix ``[B, AB, ..., A^(n-1) B]``."""
    A = _as_square(A, "A")
    B = np.atleast_2d(np.asarray(B, dtype=float))
    if B.shape[0] != A.shape[0]:
        raise ValueError(f"B has {B.shape[0]} rows, expected {A.shape[0]}")
    n = A.shape[0]
    blocks = [B]
    for _ in range(n - 1):
        blocks.append(A @ blocks[-1])
    return np.hstack(blocks) if n > 0 else np.zeros((0, 0))


def obsv(C, A) -> np.ndarray:
    """Observability matrix ``[C; CA; ...; C A^(n-1)]``."""
    A = _as_square(A, "A")
    C = np.atleast_2d(np.asarray(C, dtype=float))
    if C.shape[1] != A.shape[0]:
        raise ValueError(f"C has {C.shape[1]} columns, expected {A.shape[0]}")
    n = A.shape[0]
    blocks = [C]
    for _ in range(n - 1):
        blocks.append(blocks[-1] @ A)
    return np.vstack(blocks) if n > 0 else np.zeros((0, 0))


def minimality(A, B, C, rank_tol: float | None = None) -> MinimalityReport:
    """Controllability/observability rank test for the triple (A, B, C).

    Rank decisions compare singular values against ``rank_tol * s_max``
    (default ``RANK_TOL``).
    """
    A = _as_square(A, "A")
    n = A.shape[0]
    tol = RANK_TOL if rank_tol is None else float(rank_tol)

    def decide(M: np.ndarray) -> tuple[bool, float]:
        if n == 0:
            return True, np.inf
        if M.size == 0:
            return False, 0.0
        s = np.linalg.svd(M, compute_uv=False)
        if len(s) < n or s[0] == 0.0:
            return False, 0.0
        return bool(s[n - 1] > tol * s[0]), float(s[n - 1])

    c_ok, sc = decide(ctrb(A, B))
    o_ok, so = decide(obsv(C, A))
    return MinimalityReport(
        controllable=c_ok,
        observable=o_ok,
        minimal=c_ok and o_ok,
        min_singular_values=(sc, so),
    )


def psd_sqrt(S) -> np.ndarray:
    """Symmetric square root of a positive semidefinite matrix.

    Small negative eigenvalues from rounding are clipped to zero.
    """
    S = _as_symmetric(S)
    w, U = np.linalg.eigh(S)
    if w.size and w[0] < -1e-8 * (1.0 + abs(float(w[-1]))):
        raise ValueError("matrix is not positive semidefinite")
    w = np.clip(w, 0.0, None)
    return (U * np.sqrt(w)) @ U.T
