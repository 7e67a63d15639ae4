"""Shared deterministic generators for the test suite.

Everything is driven by explicit ``numpy.random.Generator`` instances so
each test controls its own seed; nothing here reads global state.
"""

from __future__ import annotations

import numpy as np

from lqglandscape import (
    Controller,
    Direction,
    Plant,
    TimeDomain,
    init_pole_placement,
    is_stabilizing,
)

BOTH_DOMAINS = (TimeDomain.CONTINUOUS, TimeDomain.DISCRETE)


def spd(rng: np.random.Generator, n: int, floor: float = 0.1) -> np.ndarray:
    """A random symmetric positive definite matrix with eigenvalues >= floor."""
    G = rng.standard_normal((n, n))
    return G @ G.T + floor * np.eye(n)


def random_plant(rng: np.random.Generator, n: int, m: int = 1, p: int = 1,
                 domain: TimeDomain = TimeDomain.CONTINUOUS,
                 max_tries: int = 50) -> Plant:
    """A random plant satisfying the standing assumptions.

    The state matrix is scaled so closed-loop problems stay well
    conditioned; candidates violating one of the controllability or
    observability assumptions are redrawn.
    """
    for _ in range(max_tries):
        A = rng.standard_normal((n, n))
        if domain is TimeDomain.DISCRETE:
            A = A / max(1.0, np.max(np.abs(np.linalg.eigvals(A)))) * 1.2
        B = rng.standard_normal((n, m))
        C = rng.standard_normal((p, n))
        plant = Plant(A=A, B=B, C=C, W=spd(rng, n), V=spd(rng, p),
                      Q=spd(rng, n), R=spd(rng, m), domain=domain)
        if plant.assumptions.all_satisfied:
            return plant
    raise RuntimeError(f"no valid random plant after {max_tries} draws")


def random_stabilizing(rng: np.random.Generator, plant: Plant,
                       jitter: float = 0.05,
                       max_tries: int = 50) -> Controller:
    """A random stabilizing controller of full order.

    Starts from a pole-placement controller and applies a small random
    jitter (redrawn until stability survives) so tests do not all probe
    the same special point.
    """
    K = init_pole_placement(plant, rng=rng)
    if jitter <= 0:
        return K
    q, p, m = K.order, K.p, K.m
    scale = jitter * (1.0 + float(np.max(np.abs(K.as_matrix()))))
    for _ in range(max_tries):
        trial = Controller(
            A_K=K.A_K + scale * rng.standard_normal((q, q)),
            B_K=K.B_K + scale * rng.standard_normal((q, p)),
            C_K=K.C_K + scale * rng.standard_normal((m, q)),
        )
        if is_stabilizing(plant, trial).stable:
            return trial
    return K


def random_direction(rng: np.random.Generator, q: int, p: int,
                     m: int) -> Direction:
    """A random unit-norm perturbation direction."""
    d = Direction(dA=rng.standard_normal((q, q)),
                  dB=rng.standard_normal((q, p)),
                  dC=rng.standard_normal((m, q)))
    scale = float(np.linalg.norm(d.to_vector()))
    return Direction(dA=d.dA / scale, dB=d.dB / scale, dC=d.dC / scale)


def random_invertible(rng: np.random.Generator, n: int,
                      min_det: float = 1e-2) -> np.ndarray:
    """A random comfortably invertible matrix."""
    while True:
        T = rng.standard_normal((n, n))
        if abs(np.linalg.det(T)) > min_det:
            return T
