"""Plant and controller data types, closed-loop assembly, similarity orbits,
tangent spaces, and canonical forms.

A dynamical output-feedback controller of order ``q`` is the triple
``(A_K, B_K, C_K)`` plus an optional direct term ``D_K`` (zero for strictly
proper controllers).  Controllers are also handled in lumped form

    [[D_K, C_K],
     [B_K, A_K]]            shape (m + q) x (p + q),

which is the layout used for perturbation directions as well.  Direction
vectorization order is fixed as ``[vec(dC); vec(dB); vec(dA)]`` with
row-major ``vec`` inside each block.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    NonMinimalController,
    NotControllable,
    NotSISO,
    PoleHit,
    SingularTransform,
)
from .linalg import (
    RANK_TOL,
    MinimalityReport,
    StabilityReport,
    TimeDomain,
    ctrb,
    minimality,
    obsv,
    psd_sqrt,
    stability,
)

__all__ = [
    "Plant",
    "Controller",
    "Direction",
    "TangentBasis",
    "AssumptionFlags",
    "closed_loop",
    "is_stabilizing",
    "perturb",
    "similarity",
    "transfer_eval",
    "canonical_form",
    "tangent_space",
    "project_tangent",
    "orbit_match",
    "plant_to_dict",
    "plant_from_dict",
    "controller_to_dict",
    "controller_from_dict",
]

_PSD_TOL = 1e-10


def _check_psd(M: np.ndarray, name: str, strict: bool) -> None:
    w = np.linalg.eigvalsh(M)
    scale = 1.0 + abs(float(w[-1])) if w.size else 1.0
    if strict:
        if w.size == 0 or w[0] <= 1e-12 * scale:
            raise ValueError(f"{name} must be positive definite")
    elif w.size and w[0] < -_PSD_TOL * scale:
        raise ValueError(f"{name} must be positive semidefinite")


def _sym(M: np.ndarray, name: str) -> np.ndarray:
    if np.linalg.norm(M - M.T) > 1e-8 * (1.0 + np.linalg.norm(M)):
        raise ValueError(f"{name} must be symmetric")
    return 0.5 * (M + M.T)


@dataclass(frozen=True)
class AssumptionFlags:
    """Standing-assumption diagnostics for a plant.

    ``ab_controllable``/``ca_observable`` cover the plant realization itself;
    ``aw_controllable``/``qa_observable`` cover the noise and cost square
    roots, which is what the optimal-controller theory actually consumes.
    """

    ab_controllable: bool
    ca_observable: bool
    aw_controllable: bool
    qa_observable: bool

    @property
    def all_satisfied(self) -> bool:
        return (self.ab_controllable and self.ca_observable
                and self.aw_controllable and self.qa_observable)


@dataclass(frozen=True)
class Plant:
    """An LTI plant with process/measurement noise and quadratic cost weights.

    Dynamics matrices ``(A, B, C)`` with ``A`` n x n, ``B`` n x m, ``C`` p x n;
    noise covariances ``W`` (process, PSD) and ``V`` (measurement, PD); cost
    weights ``Q`` (state, PSD) and ``R`` (input, PD).  ``domain`` selects
    continuous or discrete time.  Instances are validated on construction and
    treated as immutable.
    """

    A: np.ndarray
    B: np.ndarray
    C: np.ndarray
    W: np.ndarray
    V: np.ndarray
    Q: np.ndarray
    R: np.ndarray
    domain: TimeDomain
    assumptions: AssumptionFlags = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        A = np.atleast_2d(np.asarray(self.A, dtype=float))
        B = np.atleast_2d(np.asarray(self.B, dtype=float))
        C = np.atleast_2d(np.asarray(self.C, dtype=float))
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError(f"A must be square, got {A.shape}")
        n = A.shape[0]
        if B.shape[0] != n:
            raise ValueError(f"B must have {n} rows, got {B.shape}")
        if C.shape[1] != n:
            raise ValueError(f"C must have {n} columns, got {C.shape}")
        m, p = B.shape[1], C.shape[0]

        W = _sym(np.atleast_2d(np.asarray(self.W, dtype=float)), "W")
        V = _sym(np.atleast_2d(np.asarray(self.V, dtype=float)), "V")
        Q = _sym(np.atleast_2d(np.asarray(self.Q, dtype=float)), "Q")
        R = _sym(np.atleast_2d(np.asarray(self.R, dtype=float)), "R")
        if W.shape != (n, n):
            raise ValueError(f"W must be {n} x {n}, got {W.shape}")
        if Q.shape != (n, n):
            raise ValueError(f"Q must be {n} x {n}, got {Q.shape}")
        if V.shape != (p, p):
            raise ValueError(f"V must be {p} x {p}, got {V.shape}")
        if R.shape != (m, m):
            raise ValueError(f"R must be {m} x {m}, got {R.shape}")
        _check_psd(W, "W", strict=False)
        _check_psd(Q, "Q", strict=False)
        _check_psd(V, "V", strict=True)
        _check_psd(R, "R", strict=True)
        if not isinstance(self.domain, TimeDomain):
            raise ValueError("domain must be a TimeDomain")

        flags = AssumptionFlags(
            ab_controllable=minimality(A, B, np.zeros((1, n))).controllable,
            ca_observable=minimality(A, np.zeros((n, 1)), C).observable,
            aw_controllable=minimality(A, psd_sqrt(W), np.zeros((1, n))).controllable,
            qa_observable=minimality(A, np.zeros((n, 1)), psd_sqrt(Q)).observable,
        )

        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", B)
        object.__setattr__(self, "C", C)
        object.__setattr__(self, "W", W)
        object.__setattr__(self, "V", V)
        object.__setattr__(self, "Q", Q)
        object.__setattr__(self, "R", R)
        object.__setattr__(self, "assumptions", flags)

    @property
    def n(self) -> int:
        return self.A.shape[0]

    @property
    def m(self) -> int:
        return self.B.shape[1]

    @property
    def p(self) -> int:
        return self.C.shape[0]


@dataclass(frozen=True)
class Controller:
    """A dynamical output-feedback controller ``(A_K, B_K, C_K [, D_K])``.

    ``D_K`` defaults to zero (strictly proper).  ``order`` is the dimension of
    the controller state; order 0 (static, and with ``D_K = 0`` no control at
    all) is allowed and all block shapes stay consistent.
    """

    A_K: np.ndarray
    B_K: np.ndarray
    C_K: np.ndarray
    D_K: np.ndarray | None = None

    def __post_init__(self):
        A_K = np.atleast_2d(np.asarray(self.A_K, dtype=float))
        B_K = np.atleast_2d(np.asarray(self.B_K, dtype=float))
        C_K = np.atleast_2d(np.asarray(self.C_K, dtype=float))
        if A_K.size == 0:
            A_K = A_K.reshape(0, 0)
        if A_K.shape[0] != A_K.shape[1]:
            raise ValueError(f"A_K must be square, got {A_K.shape}")
        q = A_K.shape[0]
        if B_K.shape[0] != q:
            raise ValueError(f"B_K must have {q} rows, got {B_K.shape}")
        if C_K.shape[1] != q:
            raise ValueError(f"C_K must have {q} columns, got {C_K.shape}")
        m, p = C_K.shape[0], B_K.shape[1]
        if self.D_K is None:
            D_K = np.zeros((m, p))
        else:
            D_K = np.atleast_2d(np.asarray(self.D_K, dtype=float))
            if D_K.shape != (m, p):
                raise ValueError(f"D_K must be {m} x {p}, got {D_K.shape}")
        object.__setattr__(self, "A_K", A_K)
        object.__setattr__(self, "B_K", B_K)
        object.__setattr__(self, "C_K", C_K)
        object.__setattr__(self, "D_K", D_K)

    @property
    def order(self) -> int:
        return self.A_K.shape[0]

    @property
    def m(self) -> int:
        return self.C_K.shape[0]

    @property
    def p(self) -> int:
        return self.B_K.shape[1]

    @property
    def strictly_proper(self) -> bool:
        return not np.any(self.D_K)

    def as_matrix(self) -> np.ndarray:
        """Lumped form ``[[D_K, C_K], [B_K, A_K]]``."""
        q, m, p = self.order, self.m, self.p
        M = np.zeros((m + q, p + q))
        M[:m, :p] = self.D_K
        M[:m, p:] = self.C_K
        M[m:, :p] = self.B_K
        M[m:, p:] = self.A_K
        return M

    @classmethod
    def from_matrix(cls, M, m: int, p: int) -> "Controller":
        """Split a lumped ``(m+q) x (p+q)`` matrix back into blocks."""
        M = np.atleast_2d(np.asarray(M, dtype=float))
        if M.shape[0] < m or M.shape[1] < p:
            raise ValueError(f"lumped matrix {M.shape} too small for m={m}, p={p}")
        q = M.shape[0] - m
        if M.shape[1] - p != q:
            raise ValueError(
                f"lumped matrix {M.shape} is inconsistent with m={m}, p={p}"
            )
        return cls(A_K=M[m:, p:], B_K=M[m:, :p], C_K=M[:m, p:], D_K=M[:m, :p])

    def minimality(self, rank_tol: float | None = None) -> MinimalityReport:
        return minimality(self.A_K, self.B_K, self.C_K, rank_tol=rank_tol)


@dataclass(frozen=True)
class Direction:
    """A perturbation of the controller blocks ``(dA, dB, dC)``.

    The flat-vector layout is ``[vec(dC); vec(dB); vec(dA)]`` with row-major
    ``vec``, so the total dimension for an order-q controller on an
    m-input/p-output plant is ``m*q + q*p + q*q``.
    """

    dA: np.ndarray
    dB: np.ndarray
    dC: np.ndarray

    def __post_init__(self):
        dA = np.atleast_2d(np.asarray(self.dA, dtype=float))
        dB = np.atleast_2d(np.asarray(self.dB, dtype=float))
        dC = np.atleast_2d(np.asarray(self.dC, dtype=float))
        q = dA.shape[0]
        if dA.shape != (q, q):
            raise ValueError(f"dA must be square, got {dA.shape}")
        if dB.shape[0] != q or dC.shape[1] != q:
            raise ValueError("dB/dC shapes are inconsistent with dA")
        object.__setattr__(self, "dA", dA)
        object.__setattr__(self, "dB", dB)
        object.__setattr__(self, "dC", dC)

    def to_vector(self) -> np.ndarray:
        return np.concatenate(
            [self.dC.ravel(), self.dB.ravel(), self.dA.ravel()]
        )

    @classmethod
    def from_vector(cls, v, q: int, p: int, m: int) -> "Direction":
        v = np.asarray(v, dtype=float).ravel()
        if v.size != m * q + q * p + q * q:
            raise ValueError(
                f"vector length {v.size} does not match (q={q}, p={p}, m={m})"
            )
        dC = v[: m * q].reshape(m, q)
        dB = v[m * q: m * q + q * p].reshape(q, p)
        dA = v[m * q + q * p:].reshape(q, q)
        return cls(dA=dA, dB=dB, dC=dC)

    @classmethod
    def zero(cls, q: int, p: int, m: int) -> "Direction":
        return cls(np.zeros((q, q)), np.zeros((q, p)), np.zeros((m, q)))

    def norm(self) -> float:
        """Frobenius norm over all three blocks."""
        return float(np.sqrt(
            np.sum(self.dA ** 2) + np.sum(self.dB ** 2) + np.sum(self.dC ** 2)
        ))

    def dot(self, other: "Direction") -> float:
        return float(np.sum(self.dA * other.dA) + np.sum(self.dB * other.dB)
                     + np.sum(self.dC * other.dC))

    def __add__(self, other: "Direction") -> "Direction":
        return Direction(self.dA + other.dA, self.dB + other.dB,
                         self.dC + other.dC)

    def __sub__(self, other: "Direction") -> "Direction":
        return Direction(self.dA - other.dA, self.dB - other.dB,
                         self.dC - other.dC)

    def __mul__(self, t: float) -> "Direction":
        return Direction(t * self.dA, t * self.dB, t * self.dC)

    __rmul__ = __mul__


def closed_loop(plant: Plant, K: Controller) -> np.ndarray:
    """Closed-loop state matrix of the plant-controller interconnection.

    ``[[A + B D_K C, B C_K], [B_K C, A_K]]`` with shape ``(n+q) x (n+q)``.
    """
    if K.m != plant.m or K.p != plant.p:
        raise ValueError(
            f"controller I/O ({K.m} x {K.p}) does not match plant "
            f"({plant.m} x {plant.p})"
        )
    n, q = plant.n, K.order
    M = np.zeros((n + q, n + q))
    M[:n, :n] = plant.A + plant.B @ K.D_K @ plant.C
    M[:n, n:] = plant.B @ K.C_K
    M[n:, :n] = K.B_K @ plant.C
    M[n:, n:] = K.A_K
    return M


def is_stabilizing(plant: Plant, K: Controller) -> StabilityReport:
    """Stability report of the closed loop in the plant's time domain."""
    return stability(closed_loop(plant, K), plant.domain)


def perturb(K: Controller, delta: Direction, t: float = 1.0) -> Controller:
    """The controller ``K + t * delta`` (D_K is left untouched)."""
    return Controller(
        A_K=K.A_K + t * delta.dA,
        B_K=K.B_K + t * delta.dB,
        C_K=K.C_K + t * delta.dC,
        D_K=K.D_K,
    )


def similarity(T, K: Controller) -> Controller:
    """Change of controller state coordinates:
    ``(T A_K T^-1, T B_K, C_K T^-1, D_K)``.

    Raises ``SingularTransform`` when ``T`` is singular or so badly
    conditioned that the conjugation is numerically meaningless.
    """
    T = np.atleast_2d(np.asarray(T, dtype=float))
    q = K.order
    if T.shape != (q, q):
        raise ValueError(f"T must be {q} x {q}, got {T.shape}")
    if q == 0:
        return K
    cond = np.linalg.cond(T)
    if not np.isfinite(cond) or cond > 1e12:
        raise SingularTransform(f"transform condition number {cond:.3e}")
    # X T^{-1} computed as a solve against T^T to avoid forming the inverse.
    A_new = np.linalg.solve(T.T, (T @ K.A_K).T).T
    C_new = np.linalg.solve(T.T, K.C_K.T).T
    return Controller(A_K=A_new, B_K=T @ K.B_K, C_K=C_new, D_K=K.D_K)


def transfer_eval(K: Controller, s: complex) -> np.ndarray:
    """Controller transfer function ``C_K (s I - A_K)^{-1} B_K + D_K``.

    Raises ``PoleHit`` when ``s`` coincides with an eigenvalue of ``A_K``
    within a small relative tolerance.
    """
    q = K.order
    if q == 0:
        return K.D_K.astype(complex)
    s = complex(s)
    eigs = np.linalg.eigvals(K.A_K)
    scale = 1.0 + abs(s) + float(np.max(np.abs(eigs)))
    if np.min(np.abs(eigs - s)) <= 1e-10 * scale:
        raise PoleHit(f"evaluation point {s} is an eigenvalue of A_K")
    resolvent = np.linalg.solve(s * np.eye(q) - K.A_K, K.B_K.astype(complex))
    return K.C_K @ resolvent + K.D_K


def canonical_form(K: Controller) -> tuple[Controller, np.ndarray]:
    """Controllable (companion) canonical form of a SISO controller.

    Returns ``(K_canon, T)`` with ``similarity(T, K) == K_canon`` where
    ``K_canon`` has a companion ``A_K`` (ones on the superdiagonal, the
    negated characteristic-polynomial coefficients in the last row),
    ``B_K = e_q`` and ``C_K`` the coefficient row of the transfer numerator
    in this basis.

    Raises ``NotSISO`` for multivariable controllers and ``NotControllable``
    when ``(A_K, B_K)`` fails the controllability rank test.
    """
    if K.m != 1 or K.p != 1:
        raise NotSISO(f"canonical form needs m = p = 1, got {K.m} x {K.p}")
    q = K.order
    if q == 0:
        raise ValueError("canonical form is undefined for an order-0 controller")
    Wc = ctrb(K.A_K, K.B_K)
    s = np.linalg.svd(Wc, compute_uv=False)
    if s[0] == 0.0 or s[-1] <= RANK_TOL * s[0]:
        raise NotControllable(
            f"(A_K, B_K) controllability margin {s[-1]:.3e} below tolerance"
        )
    # x^q + c_1 x^(q-1) + ... + c_q, coefficients [1, c_1, ..., c_q].
    coeffs = np.poly(K.A_K).real
    A_c = np.zeros((q, q))
    A_c[:-1, 1:] = np.eye(q - 1)
    A_c[-1, :] = -coeffs[1:][::-1]
    b_c = np.zeros((q, 1))
    b_c[-1, 0] = 1.0
    Wc_c = ctrb(A_c, b_c)
    T = Wc_c @ np.linalg.inv(Wc)
    C_c = np.linalg.solve(T.T, K.C_K.T).T
    return Controller(A_K=A_c, B_K=b_c, C_K=C_c, D_K=K.D_K), T


@dataclass(frozen=True)
class TangentBasis:
    """Basis data for the similarity-orbit tangent space at a controller.

    ``span`` holds the q^2 structural directions
    ``H |-> (H A_K - A_K H, H B_K, -C_K H)`` for elementary matrices ``H``;
    ``tangent_onb``/``complement_onb`` are orthonormal bases (rows are flat
    vectors in the fixed layout) of the tangent space and of its orthogonal
    complement in the full parameter space.
    """

    q: int
    p: int
    m: int
    span: list
    tangent_onb: np.ndarray
    complement_onb: np.ndarray

    @property
    def complement(self) -> list:
        return [Direction.from_vector(row, self.q, self.p, self.m)
                for row in self.complement_onb]

    def project(self, delta: Direction) -> tuple[Direction, Direction]:
        """Split ``delta`` into tangential and normal components."""
        v = delta.to_vector()
        v_tan = self.tangent_onb.T @ (self.tangent_onb @ v)
        return (
            Direction.from_vector(v_tan, self.q, self.p, self.m),
            Direction.from_vector(v - v_tan, self.q, self.p, self.m),
        )


def tangent_space(K: Controller) -> TangentBasis:
    """Tangent space of the similarity orbit through a minimal controller.

    The orbit ``T |-> (T A_K T^-1, T B_K, C_K T^-1)`` has tangent directions
    ``(H A_K - A_K H, H B_K, -C_K H)``; for a minimal realization these q^2
    directions are linearly independent.

    Raises ``NonMinimalController`` when the realization is not minimal.
    """
    rep = K.minimality()
    if not rep.minimal:
        raise NonMinimalController(
            f"controller is not minimal (controllable={rep.controllable}, "
            f"observable={rep.observable})"
        )
    q, p, m = K.order, K.p, K.m
    d = q * q + q * p + m * q
    span = []
    rows = np.zeros((q * q, d))
    for i in range(q):
        for j in range(q):
            H = np.zeros((q, q))
            H[i, j] = 1.0
            direction = Direction(
                dA=H @ K.A_K - K.A_K @ H,
                dB=H @ K.B_K,
                dC=-K.C_K @ H,
            )
            rows[i * q + j] = direction.to_vector()
            span.append(direction)
    U, s, Vt = np.linalg.svd(rows, full_matrices=True)
    rank = int(np.sum(s > RANK_TOL * s[0])) if s.size and s[0] > 0 else 0
    if rank < q * q:
        raise NonMinimalController(
            f"orbit tangent rank {rank} < {q * q}; realization is numerically "
            "non-minimal"
        )
    return TangentBasis(
        q=q, p=p, m=m,
        span=span,
        tangent_onb=Vt[:rank],
        complement_onb=Vt[rank:],
    )


def project_tangent(K: Controller, delta: Direction) -> tuple[Direction, Direction]:
    """Split a direction into orbit-tangential and normal components at ``K``."""
    return tangent_space(K).project(delta)


def _markov_parameters(K: Controller, count: int) -> list[np.ndarray]:
    out = []
    An = np.eye(K.order)
    for _ in range(count):
        out.append(K.C_K @ An @ K.B_K)
        An = An @ K.A_K
    return out


def orbit_match(K1: Controller, K2: Controller,
                tol: float = 1e-6) -> np.ndarray | None:
    """Find ``T`` with ``similarity(T, K1) == K2``, or ``None``.

    The candidate ``T`` is solved in least squares from the controllability
    matrices after the first ``2q`` Markov parameters agree, then validated
    against the observability matrices and the conjugation residual itself.
    The search is complete for minimal realizations (where a similarity, if
    one exists, is unique); for non-minimal inputs a ``None`` result only
    means no conjugation was found by this route.
    """
    if (K1.order, K1.m, K1.p) != (K2.order, K2.m, K2.p):
        raise ValueError("controllers must share order and I/O dimensions")
    q = K1.order
    if q == 0:
        return np.zeros((0, 0))

    mk1 = _markov_parameters(K1, 2 * q)
    mk2 = _markov_parameters(K2, 2 * q)
    scale = 1.0 + max(np.linalg.norm(M) for M in mk1 + mk2)
    if any(np.linalg.norm(a - b) > tol * scale for a, b in zip(mk1, mk2)):
        return None

    Wc1, Wc2 = ctrb(K1.A_K, K1.B_K), ctrb(K2.A_K, K2.B_K)
    T = Wc2 @ np.linalg.pinv(Wc1)
    if not np.isfinite(T).all() or np.linalg.cond(T) > 1e12:
        return None
    Ob1, Ob2 = obsv(K1.C_K, K1.A_K), obsv(K2.C_K, K2.A_K)
    if np.linalg.norm(Ob2 @ T - Ob1) > tol * (1.0 + np.linalg.norm(Ob1)):
        return None
    K1_mapped = similarity(T, K1)
    gap = np.linalg.norm(K1_mapped.as_matrix() - K2.as_matrix())
    if gap > tol * (1.0 + np.linalg.norm(K2.as_matrix())):
        return None
    return T


# ---------------------------------------------------------------------------
# JSON-friendly dict conversion (row-major nested lists).
# ---------------------------------------------------------------------------

def _matrix_from(obj, name: str) -> np.ndarray:
    try:
        M = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        raise ValueError(f"field {name!r} is not a numeric matrix") from None
    if M.ndim == 0:
        M = M.reshape(1, 1)
    elif M.ndim == 1:
        M = M.reshape(1, -1)
    elif M.ndim != 2:
        raise ValueError(f"field {name!r} must be a 2-D matrix")
    return M


def plant_to_dict(plant: Plant) -> dict:
    return {
        "domain": plant.domain.value,
        "A": plant.A.tolist(),
        "B": plant.B.tolist(),
        "C": plant.C.tolist(),
        "W": plant.W.tolist(),
        "V": plant.V.tolist(),
        "Q": plant.Q.tolist(),
        "R": plant.R.tolist(),
    }


def plant_from_dict(data: dict) -> Plant:
    if not isinstance(data, dict):
        raise ValueError("plant description must be a JSON object")
    missing = [k for k in ("domain", "A", "B", "C", "W", "V", "Q", "R")
               if k not in data]
    if missing:
        raise ValueError(f"plant description is missing fields: {missing}")
    return Plant(
        A=_matrix_from(data["A"], "A"),
        B=_matrix_from(data["B"], "B"),
        C=_matrix_from(data["C"], "C"),
        W=_matrix_from(data["W"], "W"),
        V=_matrix_from(data["V"], "V"),
        Q=_matrix_from(data["Q"], "Q"),
        R=_matrix_from(data["R"], "R"),
        domain=TimeDomain.from_string(str(data["domain"])),
    )


def controller_to_dict(K: Controller) -> dict:
    out = {
        "A_K": K.A_K.tolist(),
        "B_K": K.B_K.tolist(),
        "C_K": K.C_K.tolist(),
    }
    if not K.strictly_proper:
        out["D_K"] = K.D_K.tolist()
    return out


def controller_from_dict(data: dict) -> Controller:
    if not isinstance(data, dict):
        raise ValueError("controller description must be a JSON object")
    missing = [k for k in ("A_K", "B_K", "C_K") if k not in data]
    if missing:
        raise ValueError(f"controller description is missing fields: {missing}")
    D_K = _matrix_from(data["D_K"], "D_K") if "D_K" in data else None
    return Controller(
        A_K=_matrix_from(data["A_K"], "A_K"),
        B_K=_matrix_from(data["B_K"], "B_K"),
        C_K=_matrix_from(data["C_K"], "C_K"),
        D_K=D_K,
    )
