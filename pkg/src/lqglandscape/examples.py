"""Named benchmark plants with executable expected-value reports.

Each entry bundles a plant, a set of named witness controllers, and a
deterministic check routine that recomputes the quantities the benchmark is
known for (costs, gradients, Hessian spectra, certificates, connectivity
behavior) and compares them against their frozen expected values.  The CLI
``example`` subcommand renders the resulting pass/fail report.

Registry keys: ``ex3.1``, ``ex3.2``, ``ex3.3``, ``ex4.1``, ``ex4.2``,
``ex4.3``, ``ex4.4``, ``ex4.5`` (parameterized, written ``ex4.5(0.3)``),
``exB.3``, ``doyle``, ``exD.1``.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .connectivity import component_sign, path_between, reduced_order_search
from .cost import (
    hessian_matrix,
    hessian_quadratic_form,
    lqg_cost,
    lqg_gradient,
    restricted_rcond,
)
from .errors import NoPathFound
from .linalg import TimeDomain, minimality, solve_care
from .model import (
    Controller,
    Direction,
    Plant,
    canonical_form,
    is_stabilizing,
    orbit_match,
    perturb,
    project_tangent,
    transfer_eval,
)
from .synthesis import (
    SaddleClass,
    Verdict,
    analyze_stationary,
    classify_zero_controller_saddle,
    riccati_controller,
    zero_controller_transfer,
)

__all__ = [
    "CheckResult",
    "NamedExample",
    "EXAMPLE_NAMES",
    "get_example",
    "list_examples",
]


@dataclass(frozen=True)
class CheckResult:
    """One line of an example report."""

    label: str
    passed: bool
    detail: str = ""


@dataclass(frozen=True)
class NamedExample:
    """A benchmark plant with named witness controllers and a check routine."""

    name: str
    summary: str
    plant: Plant
    controllers: dict[str, Controller] = field(default_factory=dict)
    checker: Callable[["NamedExample"], list[CheckResult]] | None = field(
        default=None, repr=False, compare=False
    )

    def checks(self) -> list[CheckResult]:
        """Run the expected-value report for this example."""
        if self.checker is None:
            return []
        return self.checker(self)

    def controller(self, key: str) -> Controller:
        try:
            return self.controllers[key]
        except KeyError:
            raise KeyError(
                f"example {self.name!r} has no controller {key!r}; "
                f"available: {sorted(self.controllers)}"
            ) from None


def _close(label: str, value: float, expected: float, tol: float,
           relative: bool = False) -> CheckResult:
    err = abs(value - expected)
    scale = abs(expected) if relative else 1.0
    passed = err <= tol * max(scale, np.finfo(float).tiny) if relative \
        else err <= tol
    kind = "rel" if relative else "abs"
    return CheckResult(label, bool(passed),
                       f"value={value!r} expected={expected!r} "
                       f"{kind}_err={err / scale if relative else err:.3e} "
                       f"tol={tol:g}")


def _scalar_plant(a: float, domain: TimeDomain) -> Plant:
    one = np.array([[1.0]])
    return Plant(A=np.array([[a]]), B=one, C=one, W=one, V=one, Q=one, R=one,
                 domain=domain)


def _scalar_controller(a_k: float, b_k: float, c_k: float) -> Controller:
    return Controller(A_K=np.array([[a_k]]), B_K=np.array([[b_k]]),
                      C_K=np.array([[c_k]]))


def _region_agreement(plant: Plant, grid, region) -> tuple[int, int, list]:
    """Count agreement between closed-loop stability and a region formula."""
    agree = 0
    mismatches = []
    for a_k, b_k, c_k in grid:
        K = _scalar_controller(a_k, b_k, c_k)
        actual = bool(is_stabilizing(plant, K).stable)
        predicted = bool(region(a_k, b_k, c_k))
        if actual == predicted:
            agree += 1
        else:
            mismatches.append((a_k, b_k, c_k, actual, predicted))
    return agree, len(grid), mismatches


# ---------------------------------------------------------------------------
# Scalar unstable plant (a = 1): nonconvexity and disconnectedness witnesses.
# ---------------------------------------------------------------------------

_UNSTABLE_REGION_GRID = [
    (a_k, b_k, c_k)
    for a_k in (-3.0, -1.5, -0.5, 0.5)
    for b_k in (-2.0, -0.5, 1.0)
    for c_k in (-1.4, 0.8)
]


def _unstable_scalar_region(a_k: float, b_k: float, c_k: float) -> bool:
    return a_k < -1.0 and b_k * c_k < a_k


def _checks_ex31(ex: NamedExample) -> list[CheckResult]:
    out = []
    k_plus, k_minus = ex.controller("k+"), ex.controller("k-")
    out.append(CheckResult(
        "witnesses stabilizing",
        is_stabilizing(ex.plant, k_plus).stable
        and is_stabilizing(ex.plant, k_minus).stable))
    mid = _scalar_controller(-2.0, 0.0, 0.0)
    mid_rep = is_stabilizing(ex.plant, mid)
    out.append(CheckResult(
        "midpoint of witnesses not stabilizing", not mid_rep.stable,
        f"margin={mid_rep.margin:.3f}"))
    agree, total, bad = _region_agreement(
        ex.plant, _UNSTABLE_REGION_GRID, _unstable_scalar_region)
    out.append(CheckResult(
        "stability region formula (A_K < -1 and B_K C_K < A_K)",
        agree == total, f"{agree}/{total} grid points agree{bad or ''}"))
    K_opt, _ = riccati_controller(ex.plant)
    s2 = np.sqrt(2.0)
    dev = max(abs(K_opt.A_K.item() - (-1 - 2 * s2)),
              abs(K_opt.B_K.item() - (1 + s2)),
              abs(K_opt.C_K.item() - (-(1 + s2))))
    out.append(CheckResult(
        "optimal controller is (-1-2*sqrt(2), 1+sqrt(2), -(1+sqrt(2)))",
        dev <= 1e-9, f"max_dev={dev:.3e}"))
    return out


def _checks_ex32(ex: NamedExample) -> list[CheckResult]:
    out = []
    k_plus, k_minus = ex.controller("k+"), ex.controller("k-")
    out.append(CheckResult(
        "witnesses stabilizing",
        is_stabilizing(ex.plant, k_plus).stable
        and is_stabilizing(ex.plant, k_minus).stable))
    s_plus = component_sign(ex.plant, k_plus)
    s_minus = component_sign(ex.plant, k_minus)
    out.append(CheckResult(
        "component signs differ", s_plus != s_minus,
        f"k+ -> {s_plus.value}, k- -> {s_minus.value}"))
    try:
        path_between(ex.plant, k_plus, k_minus, steps=50)
        out.append(CheckResult("path_between reports NoPathFound", False,
                               "a path was unexpectedly produced"))
    except NoPathFound:
        out.append(CheckResult("path_between reports NoPathFound", True))
    agree, total, bad = _region_agreement(
        ex.plant, _UNSTABLE_REGION_GRID, _unstable_scalar_region)
    out.append(CheckResult(
        "stability region formula (A_K < -1 and B_K C_K < A_K)",
        agree == total, f"{agree}/{total} grid points agree{bad or ''}"))
    return out


# ---------------------------------------------------------------------------
# Scalar stable plant (a = -1): connected stabilizing set, path construction.
# ---------------------------------------------------------------------------

_STABLE_REGION_GRID = [
    (a_k, b_k, c_k)
    for a_k in (-2.0, 0.0, 0.5, 2.0)
    for b_k in (-1.5, 0.7)
    for c_k in (-0.9, 1.1)
]


def _stable_scalar_region(a_k: float, b_k: float, c_k: float) -> bool:
    return a_k < 1.0 and b_k * c_k < -a_k


def _checks_ex33(ex: NamedExample) -> list[CheckResult]:
    out = []
    k_plus, k_minus = ex.controller("k+"), ex.controller("k-")
    out.append(CheckResult(
        "witnesses stabilizing",
        is_stabilizing(ex.plant, k_plus).stable
        and is_stabilizing(ex.plant, k_minus).stable))
    agree, total, bad = _region_agreement(
        ex.plant, _STABLE_REGION_GRID, _stable_scalar_region)
    out.append(CheckResult(
        "stability region formula (A_K < 1 and B_K C_K < -A_K)",
        agree == total, f"{agree}/{total} grid points agree{bad or ''}"))
    path = path_between(ex.plant, k_plus, k_minus, steps=200)
    all_stable = all(is_stabilizing(ex.plant, K).stable for K in path)
    exact_ends = (np.allclose(path[0].as_matrix(), k_plus.as_matrix())
                  and np.allclose(path[-1].as_matrix(), k_minus.as_matrix()))
    out.append(CheckResult(
        "200-step path between witnesses, all samples stabilizing",
        len(path) == 201 and all_stable and exact_ends,
        f"samples={len(path)} all_stabilizing={all_stable} "
        f"endpoints_exact={exact_ends}"))
    return out


# ---------------------------------------------------------------------------
# Non-coercivity family on the stable scalar plant.
# ---------------------------------------------------------------------------

def _k_eps(eps: float) -> Controller:
    return _scalar_controller(0.0, -eps, eps)


def _checks_ex41(ex: NamedExample) -> list[CheckResult]:
    out = []
    for eps in (0.1, 0.5, 1.0):
        J = lqg_cost(ex.plant, _k_eps(eps)).J
        expected = (1 + 3 * eps**2 + eps**4) / 2
        out.append(_close(f"J(K_eps) closed form at eps={eps}", J, expected,
                          1e-9, relative=True))
    margins = [is_stabilizing(ex.plant, _k_eps(e)).margin
               for e in (0.4, 0.2, 0.1, 0.05)]
    costs = [lqg_cost(ex.plant, _k_eps(e)).J for e in (0.4, 0.2, 0.1, 0.05)]
    shrinking = all(m < 0 for m in margins) and all(
        m2 > m1 for m1, m2 in zip(margins, margins[1:]))
    bounded = all(abs(J - 0.5) < 0.5 for J in costs) and all(
        j2 < j1 for j1, j2 in zip(costs, costs[1:]))
    out.append(CheckResult(
        "stability margin -> 0 while J stays bounded (-> 1/2)",
        shrinking and bounded,
        f"margins={[f'{m:.4f}' for m in margins]} "
        f"J={[f'{j:.4f}' for j in costs]}"))
    return out


# ---------------------------------------------------------------------------
# Zero-gradient family on the stable scalar plant: indefinite saddles.
# ---------------------------------------------------------------------------

def _checks_ex42(ex: NamedExample) -> list[CheckResult]:
    out = []
    for a in (-1.0, -2.0):
        K = _scalar_controller(a, 0.0, 0.0)
        gn = lqg_gradient(ex.plant, K).norm()
        out.append(CheckResult(f"gradient vanishes at (A_K={a}, 0, 0)",
                               gn <= 1e-9, f"norm={gn:.3e}"))
        x = 1.0 / (2.0 * (1.0 - a))
        H = hessian_matrix(ex.plant, K)
        expected = np.array([[0.0, x, 0.0], [x, 0.0, 0.0], [0.0, 0.0, 0.0]])
        dev = float(np.abs(H - expected).max())
        out.append(CheckResult(
            f"Hessian matrix at a={a} in [dC, dB, dA] coordinates",
            dev <= 1e-7, f"max_entry_dev={dev:.3e}"))
        eigs = np.sort(np.linalg.eigvalsh(H))
        eig_dev = float(np.abs(eigs - np.array([-x, 0.0, x])).max())
        out.append(CheckResult(
            f"Hessian eigenvalues {{0, +-{x:g}}} at a={a}",
            eig_dev <= 1e-7, f"eigs={eigs} dev={eig_dev:.3e}"))
    J = lqg_cost(ex.plant, _scalar_controller(-2.0, 1.0, -1.0)).J
    out.append(_close("closed-form spot value J(-2, 1, -1) = 13/18",
                      J, 13.0 / 18.0, 1e-12))
    return out


# ---------------------------------------------------------------------------
# Two-state plant with a vanishing-Hessian zero-controller saddle.
# ---------------------------------------------------------------------------

_EX43_DELTA = Direction(dA=np.array([[1.0, 3.0], [0.0, 0.0]]),
                        dB=np.array([[-1.0], [3.0]]),
                        dC=np.array([[2.0, 0.5]]))


def _ex43_transfer(s: complex) -> complex:
    return 5 * (s - 1) / (36 * (s + 1) * (s + 2))


def _checks_ex43(ex: NamedExample) -> list[CheckResult]:
    out = []
    pts = [1j * w for w in np.linspace(0.5, 5.0, 10)]
    rel = max(abs(zero_controller_transfer(ex.plant, s).item()
                  - _ex43_transfer(s)) / abs(_ex43_transfer(s)) for s in pts)
    out.append(CheckResult(
        "zero-controller transfer G(s) = 5(s-1)/(36(s+1)(s+2)) at 10 points",
        rel <= 1e-8, f"max_rel={rel:.3e}"))
    cls_zero = classify_zero_controller_saddle(ex.plant, -np.eye(2))
    out.append(CheckResult(
        "padding Lambda = -I classified ZeroHessian",
        cls_zero.classification is SaddleClass.ZERO_HESSIAN,
        f"got {cls_zero.classification.value}"))
    cls_ind = classify_zero_controller_saddle(ex.plant, np.diag([-2.0, -3.0]))
    out.append(CheckResult(
        "padding Lambda = diag(-2,-3) classified Indefinite",
        cls_ind.classification is SaddleClass.INDEFINITE,
        f"got {cls_ind.classification.value}"))
    K_star = ex.controller("K*")
    gn = lqg_gradient(ex.plant, K_star).norm()
    out.append(CheckResult("gradient vanishes at the padded zero controller",
                           gn <= 1e-9, f"norm={gn:.3e}"))
    quad = hessian_quadratic_form(ex.plant, K_star, _EX43_DELTA)
    J0 = lqg_cost(ex.plant, K_star).J
    dJ = lqg_cost(ex.plant, perturb(K_star, _EX43_DELTA, 0.1)).J - J0
    # The antisymmetric difference cancels all even-order terms, so a
    # non-vanishing value certifies a genuine third-order variation.
    t = 0.01
    odd3 = (lqg_cost(ex.plant, perturb(K_star, _EX43_DELTA, t)).J
            - lqg_cost(ex.plant, perturb(K_star, _EX43_DELTA, -t)).J) / 2
    out.append(CheckResult(
        "Hessian form vanishes on the witness direction yet J moves cubically",
        abs(quad) <= 1e-7 and abs(dJ) > 1e-4 and abs(odd3) > 1e-7,
        f"quad={quad:.2e} dJ(+0.1)={dJ:.3e} odd_part(0.01)={odd3:.3e}"))
    return out


# ---------------------------------------------------------------------------
# Plant whose global optimum is a non-minimal controller.
# ---------------------------------------------------------------------------

def _checks_ex44(ex: NamedExample) -> list[CheckResult]:
    out = []
    S, _ = solve_care(ex.plant.A, ex.plant.B, ex.plant.R, ex.plant.Q,
                      ex.plant.domain)
    P, _ = solve_care(ex.plant.A.T, ex.plant.C.T, ex.plant.V, ex.plant.W,
                      ex.plant.domain)
    dev = max(float(np.abs(P - np.diag([1.0, 4.0])).max()),
              float(np.abs(S - np.diag([2.0, 2.0])).max()))
    out.append(CheckResult("Riccati solutions P = diag(1,4), S = diag(2,2)",
                           dev <= 1e-8, f"max_dev={dev:.3e}"))
    K_opt, J_opt = riccati_controller(ex.plant)
    match = float(np.abs(K_opt.as_matrix()
                         - ex.controller("optimum").as_matrix()).max())
    out.append(CheckResult("optimal controller matches the listed matrices",
                           match <= 1e-8, f"max_dev={match:.3e}"))
    out.append(_close("optimal cost J = 38", J_opt, 38.0, 1e-6))
    mrep = minimality(K_opt.A_K, K_opt.B_K, K_opt.C_K)
    out.append(CheckResult("optimum is controllable but unobservable",
                           mrep.controllable and not mrep.observable,
                           f"controllable={mrep.controllable} "
                           f"observable={mrep.observable}"))
    rep = analyze_stationary(ex.plant, K_opt)
    out.append(CheckResult(
        "analyze_stationary verdict NonMinimalStationary with zero gradient",
        rep.verdict is Verdict.NON_MINIMAL_STATIONARY
        and rep.grad_norm <= 1e-8,
        f"verdict={rep.verdict.value} grad_norm={rep.grad_norm:.3e}"))
    K1, K2 = ex.controller("K1"), ex.controller("K2")
    pts = [1j * w for w in np.linspace(0.5, 4.0, 8)]
    tdev = max(abs(transfer_eval(K1, s).item() - transfer_eval(K2, s).item())
               for s in pts)
    cost_dev = max(abs(lqg_cost(ex.plant, K1).J - 38.0),
                   abs(lqg_cost(ex.plant, K2).J - 38.0))
    g2 = lqg_gradient(ex.plant, K2).norm()
    out.append(CheckResult(
        "distinct stationary realizations share transfer -2/(s+3) and cost",
        tdev <= 1e-10 and cost_dev <= 1e-8 and g2 <= 1e-9,
        f"transfer_dev={tdev:.2e} cost_dev={cost_dev:.2e} grad2={g2:.2e}"))
    out.append(CheckResult(
        "no similarity links the two realizations (orbit_match -> None)",
        orbit_match(K1, K2) is None))
    return out


# ---------------------------------------------------------------------------
# Near-degenerate family: ill-conditioned restricted Hessian at the optimum.
# ---------------------------------------------------------------------------

_EX45_D0 = Direction(dA=np.array([[-0.5, 0.5], [0.5, -0.5]]),
                     dB=np.zeros((2, 1)), dC=np.zeros((1, 2)))
_EX45_D1 = Direction(dA=np.zeros((2, 2)), dB=np.array([[0.5], [0.5]]),
                     dC=np.array([[-0.5, -0.5]]))


def _ex45_plant(eps: float) -> Plant:
    return Plant(
        A=1.5 * np.diag([-1.0, -1.0 - eps]),
        B=np.array([[1.0], [1.0 + eps]]),
        C=np.array([[1.0, 1.0]]),
        W=np.array([[4.0, 1.0 + eps], [1.0 + eps, 4.0 * (1.0 + eps) ** 2]]),
        V=np.array([[1.0]]),
        Q=np.array([[4.0, 1.0], [1.0, 4.0]]),
        R=np.array([[1.0]]),
        domain=TimeDomain.CONTINUOUS,
    )


def _ex45_kstar(eps: float) -> Controller:
    return Controller(
        A_K=np.array([[-3.5, -2.0],
                      [-2.0 * (1.0 + eps), -3.5 * (1.0 + eps)]]),
        B_K=np.array([[1.0], [1.0 + eps]]),
        C_K=np.array([[-1.0, -1.0]]),
    )


def _checks_ex45(ex: NamedExample) -> list[CheckResult]:
    eps = float(ex.plant.B[1, 0] - 1.0)  # B = [1; 1+eps] by construction
    out = []
    K_star = ex.controller("K*")
    K_opt, _ = riccati_controller(ex.plant)
    dev = float(np.abs(K_opt.as_matrix() - K_star.as_matrix()).max())
    out.append(CheckResult(
        f"listed optimum matches the Riccati construction (eps={eps})",
        dev <= 1e-10, f"max_dev={dev:.3e}"))
    gn = lqg_gradient(ex.plant, K_star).norm()
    out.append(CheckResult("gradient vanishes at the optimum",
                           gn <= 1e-10, f"norm={gn:.3e}"))
    rs = restricted_rcond(ex.plant, K_star)
    if abs(eps - 0.5) < 1e-12:
        out.append(CheckResult(
            "restricted reciprocal condition number < 1.7e-6 at eps=0.5",
            rs.rcond < 1.7e-6,
            f"rcond={rs.rcond:.4e} min={rs.min_eig:.3e} max={rs.max_eig:.3e}"))
    else:
        out.append(CheckResult(
            f"restricted rcond computed at eps={eps}", True,
            f"rcond={rs.rcond:.4e}"))
    for e in (0.05, 0.1, 0.2):
        pl, Ks = _ex45_plant(e), _ex45_kstar(e)
        h0 = hessian_quadratic_form(pl, Ks, _EX45_D0)
        pred0 = (3.0 / 7000.0) * e**4
        ratio0 = h0 / pred0
        # The leading term has a first-order correction: ratio = 1 - O(e).
        out.append(CheckResult(
            f"Hess(D0,D0)/((3/7000)e^4) -> 1 with O(e) error at e={e}",
            abs(ratio0 - 1.0) <= 3.0 * e,
            f"value={h0:.4e} predicted={pred0:.4e} ratio={ratio0:.4f}"))
        h1 = hessian_quadratic_form(pl, Ks, _EX45_D1)
        pred1 = 680.0 / 343.0
        out.append(_close(f"Hess(D1,D1) ~ 680/343 at e={e} (10%)",
                          h1, pred1, 0.10, relative=True))
        tang, _ = project_tangent(Ks, _EX45_D0)
        tnorm = float(np.linalg.norm(tang.to_vector()))
        out.append(CheckResult(
            f"orbit-tangential part of D0 is O(e) at e={e}",
            tnorm <= 1.0 * e, f"norm={tnorm:.3e} bound={1.0 * e:.3e}"))
    pl, Ks = _ex45_plant(0.05), _ex45_kstar(0.05)
    rs_small = restricted_rcond(pl, Ks)
    bound = (147.0 / 680000.0) * 0.05**4
    out.append(CheckResult(
        "restricted rcond at eps=0.05 within 2x of (147/680000)e^4",
        rs_small.rcond <= 2.0 * bound,
        f"rcond={rs_small.rcond:.3e} bound={bound:.3e}"))
    return out


# ---------------------------------------------------------------------------
# Two-state benchmark with a large optimal cost and stiff landscape.
# ---------------------------------------------------------------------------

def _checks_doyle(ex: NamedExample) -> list[CheckResult]:
    out = []
    K_opt, J_opt = riccati_controller(ex.plant)
    dev = float(np.abs(K_opt.as_matrix()
                       - ex.controller("optimum").as_matrix()).max())
    out.append(CheckResult("optimal controller matches the listed matrices",
                           dev <= 1e-8, f"max_dev={dev:.3e}"))
    out.append(_close("optimal cost J = 750", J_opt, 750.0, 1e-6))
    rep = analyze_stationary(ex.plant, K_opt)
    out.append(CheckResult("analyze_stationary verdict GlobalOptimum",
                           rep.verdict is Verdict.GLOBAL_OPTIMUM,
                           f"verdict={rep.verdict.value}"))
    Kc, _ = canonical_form(K_opt)
    gd = ex.controller("gd_solution")
    cdev = float(np.abs(Kc.as_matrix() - gd.as_matrix()).max())
    out.append(CheckResult(
        "companion form of the optimum equals the recorded descent solution",
        cdev <= 1e-9, f"max_dev={cdev:.3e}"))
    rs = restricted_rcond(ex.plant, Kc)
    out.append(_close(
        "restricted Hessian min eigenvalue ~ 12.15 at the companion optimum",
        rs.min_eig, 12.15, 0.05, relative=True))
    return out


# ---------------------------------------------------------------------------
# Two-state plant with an empty order-1 stabilizing set.
# ---------------------------------------------------------------------------

def _checks_exb3(ex: NamedExample) -> list[CheckResult]:
    out = []
    k_plus, k_minus = ex.controller("k+"), ex.controller("k-")
    rep_p = is_stabilizing(ex.plant, k_plus)
    rep_m = is_stabilizing(ex.plant, k_minus)
    out.append(CheckResult(
        "order-2 witnesses stabilizing", rep_p.stable and rep_m.stable,
        f"margins=({rep_p.margin:.4f}, {rep_m.margin:.4f})"))
    s_plus = component_sign(ex.plant, k_plus)
    s_minus = component_sign(ex.plant, k_minus)
    out.append(CheckResult(
        "witnesses sit in different components", s_plus != s_minus,
        f"k+ -> {s_plus.value}, k- -> {s_minus.value}"))
    out.append(CheckResult(
        "no order-0 stabilizer (open loop unstable)",
        reduced_order_search(ex.plant, 0) is None))
    t0 = time.perf_counter()
    found = reduced_order_search(ex.plant, 1, budget=100_000, seed=0)
    dt = time.perf_counter() - t0
    out.append(CheckResult(
        "order-1 search finds nothing in 100000 samples",
        found is None, f"elapsed={dt:.2f}s"))
    found2 = reduced_order_search(ex.plant, 2, budget=50_000, seed=0)
    out.append(CheckResult(
        "order-2 search finds a stabilizer",
        found2 is not None and is_stabilizing(ex.plant, found2).stable))
    try:
        path_between(ex.plant, k_plus, k_minus, steps=50)
        out.append(CheckResult(
            "no bridged path between the components", False,
            "a path was unexpectedly produced"))
    except NoPathFound:
        out.append(CheckResult("no bridged path between the components", True))
    proper = ex.controller("proper")
    out.append(CheckResult(
        "an order-1 controller with feedthrough does stabilize",
        is_stabilizing(ex.plant, proper).stable,
        f"margin={is_stabilizing(ex.plant, proper).margin:.4f}"))
    return out


# ---------------------------------------------------------------------------
# Discrete-time scalar plant (a = 1.1): mirrored region and witnesses.
# ---------------------------------------------------------------------------

_DISCRETE_GRID = [
    (a_k, b_k, c_k)
    for a_k in (-0.8, -0.4, 0.0, 0.4, 0.8)
    for b_k, c_k in ((0.5, 0.5), (0.5, -0.5), (-0.8, 0.9), (1.2, -1.0))
]


def _discrete_scalar_region(a_k: float, b_k: float, c_k: float) -> bool:
    prod = b_k * c_k
    return (prod > 1.1 * a_k - 1.0
            and prod < 1.0 + 1.1 * a_k - abs(1.1 + a_k))


def _checks_exd1(ex: NamedExample) -> list[CheckResult]:
    out = []
    k_plus, k_minus = ex.controller("k+"), ex.controller("k-")
    out.append(CheckResult(
        "witnesses stabilizing",
        is_stabilizing(ex.plant, k_plus).stable
        and is_stabilizing(ex.plant, k_minus).stable))
    mid = _scalar_controller(0.0, 0.0, 0.0)
    mid_rep = is_stabilizing(ex.plant, mid)
    out.append(CheckResult(
        "midpoint of witnesses not stabilizing (spectral radius 1.1)",
        not mid_rep.stable and abs(mid_rep.margin - 0.1) < 1e-12,
        f"margin={mid_rep.margin:.6f}"))
    s_plus = component_sign(ex.plant, k_plus)
    s_minus = component_sign(ex.plant, k_minus)
    out.append(CheckResult(
        "component signs differ", s_plus != s_minus,
        f"k+ -> {s_plus.value}, k- -> {s_minus.value}"))
    try:
        path_between(ex.plant, k_plus, k_minus, steps=50)
        out.append(CheckResult("path_between reports NoPathFound", False,
                               "a path was unexpectedly produced"))
    except NoPathFound:
        out.append(CheckResult("path_between reports NoPathFound", True))
    agree, total, bad = _region_agreement(
        ex.plant, _DISCRETE_GRID, _discrete_scalar_region)
    out.append(CheckResult(
        "20-point grid classified exactly by the unit-circle region formula",
        agree == total, f"{agree}/{total} grid points agree{bad or ''}"))
    K_opt, _ = riccati_controller(ex.plant)
    rep = analyze_stationary(ex.plant, K_opt)
    out.append(CheckResult(
        "discrete Riccati optimum certified GlobalOptimum",
        rep.verdict is Verdict.GLOBAL_OPTIMUM,
        f"verdict={rep.verdict.value} grad_norm={rep.grad_norm:.2e}"))
    return out


# ---------------------------------------------------------------------------
# Registry.
# ---------------------------------------------------------------------------

def _build_ex31() -> NamedExample:
    plant = _scalar_plant(1.0, TimeDomain.CONTINUOUS)
    return NamedExample(
        name="ex3.1",
        summary=("scalar unstable plant: the stabilizing set is nonconvex "
                 "(witness midpoint loses stability)"),
        plant=plant,
        controllers={
            "k+": _scalar_controller(-2.0, 2.0, -2.0),
            "k-": _scalar_controller(-2.0, -2.0, 2.0),
            "midpoint": _scalar_controller(-2.0, 0.0, 0.0),
        },
        checker=_checks_ex31,
    )


def _build_ex32() -> NamedExample:
    base = _build_ex31()
    return NamedExample(
        name="ex3.2",
        summary=("scalar unstable plant: the stabilizing set has two "
                 "path-connected components distinguished by sign"),
        plant=base.plant,
        controllers=dict(base.controllers),
        checker=_checks_ex32,
    )


def _build_ex33() -> NamedExample:
    plant = _scalar_plant(-1.0, TimeDomain.CONTINUOUS)
    return NamedExample(
        name="ex3.3",
        summary=("scalar stable plant: the stabilizing set is connected; a "
                 "200-step stabilizing path joins sign-opposite witnesses"),
        plant=plant,
        controllers={
            "k+": _scalar_controller(-1.0, 1.0, -1.0),
            "k-": _scalar_controller(-1.0, -1.0, 1.0),
        },
        checker=_checks_ex33,
    )


def _build_ex41() -> NamedExample:
    plant = _scalar_plant(-1.0, TimeDomain.CONTINUOUS)
    return NamedExample(
        name="ex4.1",
        summary=("controller family with closed-form cost showing the cost "
                 "stays bounded while the stability margin vanishes"),
        plant=plant,
        controllers={"K_eps(0.5)": _k_eps(0.5)},
        checker=_checks_ex41,
    )


def _build_ex42() -> NamedExample:
    plant = _scalar_plant(-1.0, TimeDomain.CONTINUOUS)
    return NamedExample(
        name="ex4.2",
        summary=("zero-gradient controllers (a, 0, 0) with an explicitly "
                 "indefinite 3x3 Hessian"),
        plant=plant,
        controllers={
            "K*(-1)": _scalar_controller(-1.0, 0.0, 0.0),
            "K*(-2)": _scalar_controller(-2.0, 0.0, 0.0),
        },
        checker=_checks_ex42,
    )


def _build_ex43() -> NamedExample:
    plant = Plant(
        A=np.array([[-1.0, 0.0], [1.0, -2.0]]),
        B=np.array([[-1.0], [1.0]]),
        C=np.array([[-2.0, 11.0]]),
        W=np.eye(2), V=np.array([[1.0]]), Q=np.eye(2), R=np.array([[1.0]]),
        domain=TimeDomain.CONTINUOUS,
    )
    return NamedExample(
        name="ex4.3",
        summary=("stable two-state plant whose padded zero controller is a "
                 "stationary point with vanishing Hessian but cubic cost "
                 "variation"),
        plant=plant,
        controllers={
            "K*": Controller(A_K=-np.eye(2), B_K=np.zeros((2, 1)),
                             C_K=np.zeros((1, 2))),
        },
        checker=_checks_ex43,
    )


def _build_ex44() -> NamedExample:
    plant = Plant(
        A=np.array([[0.0, -1.0], [1.0, 0.0]]),
        B=np.array([[1.0], [0.0]]),
        C=np.array([[1.0, -1.0]]),
        W=np.array([[1.0, -1.0], [-1.0, 16.0]]),
        V=np.array([[1.0]]),
        Q=np.array([[4.0, 0.0], [0.0, 0.0]]),
        R=np.array([[1.0]]),
        domain=TimeDomain.CONTINUOUS,
    )
    optimum = Controller(A_K=np.array([[-3.0, 0.0], [5.0, -4.0]]),
                         B_K=np.array([[1.0], [-4.0]]),
                         C_K=np.array([[-2.0, 0.0]]))
    return NamedExample(
        name="ex4.4",
        summary=("plant whose globally optimal controller is unobservable; "
                 "two structurally different stationary realizations share "
                 "the transfer function -2/(s+3)"),
        plant=plant,
        controllers={
            "optimum": optimum,
            "K1": optimum,
            "K2": Controller(A_K=np.array([[-3.0, 0.0], [0.0, -1.0]]),
                             B_K=np.array([[1.0], [0.0]]),
                             C_K=np.array([[-2.0, 0.0]])),
        },
        checker=_checks_ex44,
    )


def _build_ex45(eps: float = 0.5) -> NamedExample:
    if not 0.0 < eps <= 1.0:
        raise ValueError(
            f"the near-degenerate family needs eps in (0, 1], got {eps}"
        )
    name = "ex4.5" if abs(eps - 0.5) < 1e-12 else f"ex4.5({eps:g})"
    return NamedExample(
        name=name,
        summary=("near-degenerate family: the restricted Hessian at the "
                 "optimum has a reciprocal condition number collapsing like "
                 "eps^4"),
        plant=_ex45_plant(eps),
        controllers={"K*": _ex45_kstar(eps)},
        checker=_checks_ex45,
    )


def _build_doyle() -> NamedExample:
    plant = Plant(
        A=np.array([[1.0, 1.0], [0.0, 1.0]]),
        B=np.array([[0.0], [1.0]]),
        C=np.array([[1.0, 0.0]]),
        W=5.0 * np.ones((2, 2)),
        V=np.array([[1.0]]),
        Q=5.0 * np.ones((2, 2)),
        R=np.array([[1.0]]),
        domain=TimeDomain.CONTINUOUS,
    )
    return NamedExample(
        name="doyle",
        summary=("classic two-state benchmark with optimal cost 750 and a "
                 "stiff landscape around the optimum"),
        plant=plant,
        controllers={
            "optimum": Controller(A_K=np.array([[-4.0, 1.0], [-10.0, -4.0]]),
                                  B_K=np.array([[5.0], [5.0]]),
                                  C_K=np.array([[-5.0, -5.0]])),
            "gd_solution": Controller(A_K=np.array([[0.0, 1.0],
                                                    [-26.0, -8.0]]),
                                      B_K=np.array([[0.0], [1.0]]),
                                      C_K=np.array([[25.0, -50.0]])),
        },
        checker=_checks_doyle,
    )


def _build_exb3() -> NamedExample:
    plant = Plant(
        A=np.array([[0.0, 1.0], [1.0, 0.0]]),
        B=np.array([[0.0], [1.0]]),
        C=np.array([[0.0, 1.0]]),
        W=np.eye(2), V=np.array([[1.0]]), Q=np.eye(2), R=np.array([[1.0]]),
        domain=TimeDomain.CONTINUOUS,
    )
    return NamedExample(
        name="exB.3",
        summary=("two-state plant with no strictly proper order-1 "
                 "stabilizer: the order-2 stabilizing set splits into two "
                 "components that no path joins"),
        plant=plant,
        controllers={
            "k+": Controller(A_K=np.array([[0.0, 1.0], [0.125, -1.0]]),
                             B_K=np.array([[0.0], [1.0]]),
                             C_K=np.array([[-1.5, -2.0]])),
            "k-": Controller(A_K=np.array([[0.0, -1.0], [-0.125, -1.0]]),
                             B_K=np.array([[0.0], [1.0]]),
                             C_K=np.array([[1.5, -2.0]])),
            "proper": Controller(A_K=np.array([[1.0]]),
                                 B_K=np.array([[-3.0]]),
                                 C_K=np.array([[2.0]]),
                                 D_K=np.array([[-2.0]])),
        },
        checker=_checks_exb3,
    )


def _build_exd1() -> NamedExample:
    plant = _scalar_plant(1.1, TimeDomain.DISCRETE)
    return NamedExample(
        name="exD.1",
        summary=("discrete-time scalar unstable plant: two components "
                 "distinguished by sign, unit-circle region formula"),
        plant=plant,
        controllers={
            "k+": _scalar_controller(0.0, 0.5, -0.5),
            "k-": _scalar_controller(0.0, -0.5, 0.5),
            "midpoint": _scalar_controller(0.0, 0.0, 0.0),
        },
        checker=_checks_exd1,
    )


_BUILDERS: dict[str, Callable[[], NamedExample]] = {
    "ex3.1": _build_ex31,
    "ex3.2": _build_ex32,
    "ex3.3": _build_ex33,
    "ex4.1": _build_ex41,
    "ex4.2": _build_ex42,
    "ex4.3": _build_ex43,
    "ex4.4": _build_ex44,
    "ex4.5": _build_ex45,
    "doyle": _build_doyle,
    "exB.3": _build_exb3,
    "exD.1": _build_exd1,
}

EXAMPLE_NAMES = tuple(_BUILDERS)


def get_example(name: str) -> NamedExample:
    """Look up a named example; ``ex4.5`` accepts a parameter: ``ex4.5(0.3)``.

    Raises ``KeyError`` for unknown names and ``ValueError`` for a malformed
    or out-of-range parameter.
    """
    key = name.strip()
    if key.startswith("ex4.5(") and key.endswith(")"):
        inner = key[len("ex4.5("):-1]
        try:
            eps = float(inner)
        except ValueError:
            raise ValueError(
                f"could not parse parameter {inner!r} in {name!r}"
            ) from None
        return _build_ex45(eps)
    if key in _BUILDERS:
        return _BUILDERS[key]()
    raise KeyError(
        f"unknown example {name!r}; available: {', '.join(EXAMPLE_NAMES)}"
    )


def list_examples() -> list[NamedExample]:
    """All examples at their default parameters."""
    return [builder() for builder in _BUILDERS.values()]
