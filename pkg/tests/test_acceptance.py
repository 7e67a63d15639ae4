"""Acceptance criteria.

One test per criterion, asserted at the stated tolerance, so ``pytest -v``
prints one pass/fail line per criterion.  Each test gathers all of its
sub-checks and fails with the complete list of violations, not just the
first one.

Criterion 6 contains one sub-check that is mathematically unattainable for
a correct second derivative (the quadratic form along the balanced-rotation
direction at eps = 0.2 sits 37% below its quartic leading term because the
first-order correction is about ``-2.5 eps``); it is asserted literally and
is expected to fail with the measured value in the message.  See README.md.
"""

import numpy as np
import pytest

from conftest import (
    BOTH_DOMAINS,
    random_direction,
    random_invertible,
    random_plant,
    random_stabilizing,
    spd,
)
from lqglandscape import (
    Controller,
    Direction,
    LandscapeError,
    NoPathFound,
    SaddleClass,
    Terminal,
    TimeDomain,
    Verdict,
    analyze_stationary,
    augment_stationary,
    classify_zero_controller_saddle,
    descend,
    get_example,
    hessian_matrix,
    hessian_quadratic_form,
    init_pole_placement,
    is_stabilizing,
    lift,
    lqg_cost,
    lqg_gradient,
    path_between,
    perturb,
    realize,
    reduced_order_search,
    restricted_rcond,
    riccati_controller,
    similarity,
    solve_care,
    solve_lyapunov,
    tangent_space,
    transfer_eval,
)
from lqglandscape.examples import _EX43_DELTA, _EX45_D0, _EX45_D1, \
    _ex45_kstar, _ex45_plant
from lqglandscape.optimizer import OptimizerConfig, Parameterization


def _assert_all(failures: list[str]) -> None:
    assert not failures, "\n".join(failures)


def _conditioned_pair(rng, domain, m=1, p=1, j_cap=1e4, n_hi=4):
    """Draw a (plant, stabilizing controller) pair with a bounded cost.

    Pairs whose cost is astronomically large (the jittered draw can land
    arbitrarily close to a blow-up) are too stiff for finite differences to
    resolve at any step size; they say nothing about formula correctness,
    so the draw rejects them, as it does pairs whose evaluation the library
    itself refuses as numerically unreliable.
    """
    for _ in range(100):
        plant = random_plant(rng, int(rng.integers(1, n_hi)), m, p, domain)
        K = random_stabilizing(rng, plant)
        try:
            J = lqg_cost(plant, K).J
        except LandscapeError:
            continue
        if J <= j_cap:
            return plant, K
    raise AssertionError("could not draw a well-conditioned pair")


def test_criterion_01_optimal_synthesis_two_state_benchmark():
    """Riccati construction reproduces the known optimum: matrices to 1e-8,
    cost 750 to 1e-6."""
    ex = get_example("doyle")
    K, J = riccati_controller(ex.plant)
    failures = []
    dev = float(np.abs(K.as_matrix()
                       - ex.controllers["optimum"].as_matrix()).max())
    if dev > 1e-8:
        failures.append(f"controller matrices deviate by {dev:.3e} > 1e-8")
    if abs(J - 750.0) > 1e-6:
        failures.append(f"J = {J!r}, |J - 750| = {abs(J - 750):.3e} > 1e-6")
    _assert_all(failures)


def test_criterion_02_bounded_cost_with_vanishing_margin():
    """Closed-form family: J(K_eps) = (1 + 3 eps^2 + eps^4)/2 to 1e-9
    relative; as eps -> 0 the margin vanishes while J -> 1/2 (the cost is
    not coercive on the stabilizing set)."""
    ex = get_example("ex4.1")
    failures = []

    def k_eps(eps):
        return Controller(A_K=np.zeros((1, 1)), B_K=np.array([[-eps]]),
                          C_K=np.array([[eps]]))

    for eps in (0.1, 0.5, 1.0):
        J = lqg_cost(ex.plant, k_eps(eps)).J
        expected = (1 + 3 * eps**2 + eps**4) / 2
        rel = abs(J - expected) / abs(expected)
        if rel > 1e-9:
            failures.append(f"eps={eps}: rel err {rel:.3e} > 1e-9")
    eps = 1e-3
    J = lqg_cost(ex.plant, k_eps(eps)).J
    margin = is_stabilizing(ex.plant, k_eps(eps)).margin
    if abs(J - 0.5) > 2e-6:
        failures.append(f"J(1e-3) = {J!r} not within 2e-6 of 1/2")
    if not -1e-5 < margin < 0:
        failures.append(f"margin(1e-3) = {margin!r} not in (-1e-5, 0)")
    _assert_all(failures)


def test_criterion_03_indefinite_saddles_with_explicit_hessian():
    """At (a, 0, 0) for a in {-1, -2}: gradient below 1e-9; the 3x3 Hessian
    matches the closed form entrywise to 1e-7 (stated for coordinate order
    (dA, dB, dC); this suite uses [dC, dB, dA], a symmetric permutation);
    eigenvalues {0, +-1/(2(1-a))}."""
    ex = get_example("ex4.2")
    failures = []
    for a in (-1.0, -2.0):
        K = Controller(A_K=np.array([[a]]), B_K=np.zeros((1, 1)),
                       C_K=np.zeros((1, 1)))
        gn = lqg_gradient(ex.plant, K).norm()
        if gn > 1e-9:
            failures.append(f"a={a}: gradient norm {gn:.3e} > 1e-9")
        x = 1.0 / (2.0 * (1.0 - a))
        H = hessian_matrix(ex.plant, K)
        expected = np.array([[0.0, x, 0.0], [x, 0.0, 0.0], [0.0, 0.0, 0.0]])
        dev = float(np.abs(H - expected).max())
        if dev > 1e-7:
            failures.append(f"a={a}: Hessian entry deviation {dev:.3e} "
                            f"> 1e-7")
        eigs = np.sort(np.linalg.eigvalsh(H))
        eig_dev = float(np.abs(eigs - np.array([-x, 0.0, x])).max())
        if eig_dev > 1e-7:
            failures.append(f"a={a}: eigenvalues {eigs} deviate "
                            f"{eig_dev:.3e} > 1e-7 from {{0, +-{x}}}")
    _assert_all(failures)


def test_criterion_04_vanishing_hessian_saddle():
    """Zero-controller analysis: transfer 5(s-1)/(36(s+1)(s+2)) to 1e-8
    relative at 10 points; padding -I is classified ZeroHessian; the witness
    direction has |quadratic form| <= 1e-7 while |J(K* + 0.1 D) - J(K*)| >
    1e-4."""
    ex = get_example("ex4.3")
    failures = []
    from lqglandscape import zero_controller_transfer
    for w in np.linspace(0.5, 5.0, 10):
        s = 1j * w
        expected = 5 * (s - 1) / (36 * (s + 1) * (s + 2))
        got = zero_controller_transfer(ex.plant, s).item()
        rel = abs(got - expected) / abs(expected)
        if rel > 1e-8:
            failures.append(f"transfer at s={s}: rel err {rel:.3e} > 1e-8")
    cls = classify_zero_controller_saddle(ex.plant, -np.eye(2))
    if cls.classification is not SaddleClass.ZERO_HESSIAN:
        failures.append(f"padding -I classified "
                        f"{cls.classification.value}, expected ZeroHessian")
    K_star = ex.controllers["K*"]
    quad = hessian_quadratic_form(ex.plant, K_star, _EX43_DELTA)
    if abs(quad) > 1e-7:
        failures.append(f"|quadratic form| = {abs(quad):.3e} > 1e-7")
    dJ = abs(lqg_cost(ex.plant, perturb(K_star, _EX43_DELTA, 0.1)).J
             - lqg_cost(ex.plant, K_star).J)
    if dJ <= 1e-4:
        failures.append(f"|J(K* + 0.1 D) - J(K*)| = {dJ:.3e} <= 1e-4")
    _assert_all(failures)


def test_criterion_05_non_minimal_global_optimum():
    """Riccati solutions P = diag(1,4), S = diag(2,2) to 1e-8; the optimal
    controller matches the listed matrices; it is unobservable; the
    stationary analysis reports NonMinimalStationary with zero gradient."""
    ex = get_example("ex4.4")
    failures = []
    S, _ = solve_care(ex.plant.A, ex.plant.B, ex.plant.R, ex.plant.Q,
                      ex.plant.domain)
    P, _ = solve_care(ex.plant.A.T, ex.plant.C.T, ex.plant.V, ex.plant.W,
                      ex.plant.domain)
    dev_P = float(np.abs(P - np.diag([1.0, 4.0])).max())
    dev_S = float(np.abs(S - np.diag([2.0, 2.0])).max())
    if dev_P > 1e-8:
        failures.append(f"filter solution deviates {dev_P:.3e} > 1e-8")
    if dev_S > 1e-8:
        failures.append(f"regulator solution deviates {dev_S:.3e} > 1e-8")
    K, _ = riccati_controller(ex.plant)
    dev_K = float(np.abs(K.as_matrix()
                         - ex.controllers["optimum"].as_matrix()).max())
    if dev_K > 1e-8:
        failures.append(f"controller deviates {dev_K:.3e} > 1e-8")
    mrep = K.minimality()
    if mrep.observable:
        failures.append("optimum unexpectedly observable")
    rep = analyze_stationary(ex.plant, K)
    if rep.verdict is not Verdict.NON_MINIMAL_STATIONARY:
        failures.append(f"verdict {rep.verdict.value}, expected "
                        f"NonMinimalStationary")
    if rep.grad_norm > 1e-8:
        failures.append(f"gradient norm {rep.grad_norm:.3e} > 1e-8")
    _assert_all(failures)


def test_criterion_06_near_degenerate_restricted_hessian():
    """Near-degenerate family: restricted reciprocal condition number below
    1.7e-6 at eps = 0.5 and within 2x of (147/680000) eps^4 at eps = 0.05;
    for eps in {0.05, 0.1, 0.2} the quadratic form along the rotation
    direction is within 25% of (3/7000) eps^4 and along the input/output
    direction within 10% of 680/343.

    The 25% window at eps = 0.2 is not attainable by a correct second
    derivative: the form has a first-order relative correction of about
    -2.5 eps (finite-difference confirmed), so its true ratio to the
    quartic term is ~0.63 there.  The check is asserted literally anyway.
    """
    failures = []
    rs_half = restricted_rcond(_ex45_plant(0.5), _ex45_kstar(0.5))
    if not rs_half.rcond < 1.7e-6:
        failures.append(f"rcond(0.5) = {rs_half.rcond:.4e} >= 1.7e-6")
    for eps in (0.05, 0.1, 0.2):
        plant, K = _ex45_plant(eps), _ex45_kstar(eps)
        h0 = hessian_quadratic_form(plant, K, _EX45_D0)
        pred0 = (3.0 / 7000.0) * eps**4
        ratio0 = h0 / pred0
        if abs(ratio0 - 1.0) > 0.25:
            failures.append(
                f"eps={eps}: rotation-direction form {h0:.6e} is "
                f"{ratio0:.4f} x the quartic term {pred0:.6e}; outside the "
                f"25% window (true value: the form carries a relative "
                f"correction ~ -2.5 eps, so ~0.63 at eps=0.2 is correct)")
        h1 = hessian_quadratic_form(plant, K, _EX45_D1)
        pred1 = 680.0 / 343.0
        if abs(h1 / pred1 - 1.0) > 0.10:
            failures.append(f"eps={eps}: i/o-direction form {h1:.6e} not "
                            f"within 10% of 680/343")
    rs_small = restricted_rcond(_ex45_plant(0.05), _ex45_kstar(0.05))
    bound = (147.0 / 680000.0) * 0.05**4
    if not rs_small.rcond <= 2.0 * bound:
        failures.append(f"rcond(0.05) = {rs_small.rcond:.4e} > 2 x "
                        f"{bound:.4e}")
    _assert_all(failures)


def test_criterion_07_connectivity_witnesses_and_paths():
    """Two-component example: both witnesses stabilize, their midpoint does
    not, their component signs differ, and no path is produced; connected
    example: a 200-step path with every sample stabilizing; empty-order-1
    example: the search finds nothing in 100000 samples."""
    from lqglandscape import component_sign
    failures = []

    ex2 = get_example("ex3.2")
    kp, km = ex2.controllers["k+"], ex2.controllers["k-"]
    if not (is_stabilizing(ex2.plant, kp).stable
            and is_stabilizing(ex2.plant, km).stable):
        failures.append("two-component witnesses do not both stabilize")
    mid = Controller(A_K=np.array([[-2.0]]), B_K=np.zeros((1, 1)),
                     C_K=np.zeros((1, 1)))
    if is_stabilizing(ex2.plant, mid).stable:
        failures.append("witness midpoint unexpectedly stabilizes")
    if component_sign(ex2.plant, kp) == component_sign(ex2.plant, km):
        failures.append("component signs do not differ")
    try:
        path_between(ex2.plant, kp, km, steps=50)
        failures.append("path produced across disconnected components")
    except NoPathFound:
        pass

    ex3 = get_example("ex3.3")
    path = path_between(ex3.plant, ex3.controllers["k+"],
                        ex3.controllers["k-"], steps=200)
    if len(path) != 201:
        failures.append(f"path has {len(path)} samples, expected 201")
    bad = [i for i, K in enumerate(path)
           if not is_stabilizing(ex3.plant, K).stable]
    if bad:
        failures.append(f"path samples {bad} are not stabilizing")

    exb = get_example("exB.3")
    found = reduced_order_search(exb.plant, 1, budget=100_000, seed=0)
    if found is not None:
        failures.append(f"order-1 search returned {found} on the "
                        f"empty-order-1 example")
    _assert_all(failures)


def test_criterion_08_property_suites():
    """Randomized properties, at least 50 instances per time domain each:
    (a) Lyapunov solutions match a Kronecker-system solve to 1e-10;
    (b) analytic gradient matches central differences to 1e-5;
    (c) Hessian quadratic form matches second differences to 1e-4;
    (d) cost is similarity-invariant and the gradient transforms
        contravariantly to 1e-7;
    (e) realize(lift(K)) returns K to 1e-8;
    (f) stable padding preserves cost and (zero) gradient to 1e-7;
    (g) at minimal stationary points the Hessian annihilates orbit-tangent
        vectors to 1e-6 * ||H||."""
    failures = []
    N = 50

    # (a) Lyapunov vs Kronecker.
    for domain in BOTH_DOMAINS:
        rng = np.random.default_rng(801)
        for i in range(N):
            n = int(rng.integers(1, 5))
            M = rng.standard_normal((n, n))
            if domain is TimeDomain.CONTINUOUS:
                M = M - (np.max(np.linalg.eigvals(M).real) + 0.5) * np.eye(n)
            else:
                M = M / (np.max(np.abs(np.linalg.eigvals(M))) + 0.5)
            S = spd(rng, n)
            X = solve_lyapunov(M, S, domain)
            if domain is TimeDomain.CONTINUOUS:
                lhs = np.kron(np.eye(n), M) + np.kron(M, np.eye(n))
            else:
                lhs = np.kron(M, M) - np.eye(n * n)
            X_ref = np.linalg.solve(lhs, -S.reshape(-1)).reshape(n, n)
            err = np.abs(X - X_ref).max() / (1 + np.abs(X_ref).max())
            if err > 1e-10:
                failures.append(f"(a) {domain.value} #{i}: {err:.3e} > 1e-10")

    # (b) gradient vs central differences.
    for domain in BOTH_DOMAINS:
        rng = np.random.default_rng(802)
        for i in range(N):
            plant, K = _conditioned_pair(rng, domain)
            g = lqg_gradient(plant, K).as_direction().to_vector()
            d = random_direction(rng, K.order, 1, 1)
            predicted = float(g @ d.to_vector())
            h, rel = 1e-6, np.inf
            for _ in range(3):
                try:
                    Jp = lqg_cost(plant, perturb(K, d, h)).J
                    Jm = lqg_cost(plant, perturb(K, d, -h)).J
                except LandscapeError:
                    h *= 0.1
                    continue
                rel = abs((Jp - Jm) / (2 * h) - predicted) / (
                    1 + abs(predicted))
                break
            if rel > 1e-5:
                failures.append(f"(b) {domain.value} #{i}: {rel:.3e} > 1e-5")

    # (c) Hessian quadratic form vs second differences.
    for domain in BOTH_DOMAINS:
        rng = np.random.default_rng(803)
        for i in range(N):
            plant, K = _conditioned_pair(rng, domain)
            d = random_direction(rng, K.order, 1, 1)
            quad = hessian_quadratic_form(plant, K, d)
            J0 = lqg_cost(plant, K).J
            # Truncation scales with the (instance-dependent) curvature and
            # roundoff scales against it, so the sweep keeps the best step.
            rel = np.inf
            for h in (1e-4, 1e-5):
                try:
                    Jp = lqg_cost(plant, perturb(K, d, h)).J
                    Jm = lqg_cost(plant, perturb(K, d, -h)).J
                except LandscapeError:
                    continue
                rel = min(rel, abs((Jp - 2 * J0 + Jm) / (h * h) - quad)
                          / (1 + abs(quad)))
            if rel > 1e-4:
                failures.append(f"(c) {domain.value} #{i}: {rel:.3e} > 1e-4")

    # (d) similarity invariance of J, contravariance of the gradient.
    for domain in BOTH_DOMAINS:
        rng = np.random.default_rng(804)
        for i in range(N):
            m, p = int(rng.integers(1, 3)), int(rng.integers(1, 3))
            plant, K = _conditioned_pair(rng, domain, m=m, p=p)
            T = random_invertible(rng, K.order, min_det=0.1)
            K2 = similarity(T, K)
            J1 = lqg_cost(plant, K).J
            J2 = lqg_cost(plant, K2).J
            if abs(J1 - J2) > 1e-7 * (1 + abs(J1)):
                failures.append(f"(d) {domain.value} #{i}: cost changed "
                                f"by {abs(J1 - J2):.3e}")
                continue
            g1 = lqg_gradient(plant, K)
            g2 = lqg_gradient(plant, K2)
            T_inv_T = np.linalg.inv(T).T
            scale = 1 + max(np.abs(g1.dA).max(), np.abs(g1.dB).max(),
                            np.abs(g1.dC).max())
            dev = max(
                np.abs(g2.dA - T_inv_T @ g1.dA @ T.T).max(),
                np.abs(g2.dB - T_inv_T @ g1.dB).max(),
                np.abs(g2.dC - g1.dC @ T.T).max(),
            )
            if dev > 1e-7 * scale:
                failures.append(f"(d) {domain.value} #{i}: gradient "
                                f"transform off by {dev:.3e}")

    # (e) realize(lift(K)) == K.
    for domain in BOTH_DOMAINS:
        rng = np.random.default_rng(805)
        done = 0
        i = 0
        while done < N and i < 3 * N:
            i += 1
            n = int(rng.integers(1, 4))
            plant = random_plant(rng, n, 1, 1, domain)
            K = random_stabilizing(rng, plant)
            try:
                Z = lift(plant, K)
            except LandscapeError:
                continue  # library refused a numerically degenerate lift
            if Z.perturbed:
                continue  # property applies to non-degenerate lifts
            done += 1
            K_back = realize(plant, Z)
            err = np.abs(K_back.as_matrix() - K.as_matrix()).max() / (
                1 + np.abs(K.as_matrix()).max())
            if err > 1e-8:
                failures.append(f"(e) {domain.value} #{i}: {err:.3e} > 1e-8")
        if done < N:
            failures.append(f"(e) {domain.value}: only {done} "
                            f"non-degenerate instances")

    # (f) stable padding preserves cost and stationarity.
    for domain in BOTH_DOMAINS:
        rng = np.random.default_rng(806)
        done = 0
        i = 0
        while done < N and i < 3 * N:
            i += 1
            plant = random_plant(rng, int(rng.integers(1, 4)), 1, 1, domain)
            try:
                K, J = riccati_controller(plant)
            except LandscapeError:
                continue
            if J > 1e4:
                continue  # too stiff: roundoff in the solve exceeds gates
            done += 1
            if domain is TimeDomain.CONTINUOUS:
                lam = -0.2 - float(rng.uniform(0.0, 2.0))
            else:
                lam = float(rng.uniform(-0.9, 0.9))
            K_pad = augment_stationary(plant, K, np.array([[lam]]))
            J_pad = lqg_cost(plant, K_pad).J
            g_pad = lqg_gradient(plant, K_pad).norm()
            if abs(J_pad - J) > 1e-7 * (1 + abs(J)):
                failures.append(f"(f) {domain.value} #{i}: cost moved "
                                f"{abs(J_pad - J):.3e}")
            if g_pad > 1e-7 * (1 + abs(J)):
                failures.append(f"(f) {domain.value} #{i}: gradient "
                                f"{g_pad:.3e} after padding")
        if done < N:
            failures.append(f"(f) {domain.value}: only {done} "
                            f"well-conditioned instances")

    # (g) orbit-tangent vectors are Hessian null directions at minimal
    # stationary points.
    for domain in BOTH_DOMAINS:
        rng = np.random.default_rng(807)
        done = 0
        i = 0
        while done < N and i < 3 * N:
            i += 1
            plant = random_plant(rng, int(rng.integers(1, 3)), 1, 1, domain)
            try:
                K, _ = riccati_controller(plant)
            except LandscapeError:
                continue
            if not K.minimality().minimal:
                continue
            done += 1
            H = hessian_matrix(plant, K)
            H_norm = np.linalg.norm(H, 2)
            basis = tangent_space(K)
            for v in basis.tangent_onb:
                resid = float(np.linalg.norm(H @ v))
                if resid > 1e-6 * H_norm:
                    failures.append(f"(g) {domain.value} #{i}: |H v| = "
                                    f"{resid:.3e} > 1e-6 * {H_norm:.3e}")
                    break
        if done < N:
            failures.append(f"(g) {domain.value}: only {done} minimal "
                            f"instances")

    _assert_all(failures)


def test_criterion_09_descent_reaches_the_known_optimum():
    """Companion-form gradient descent on the two-state benchmark from four
    pole-placement seeds: terminates at the gradient tolerance, decreases
    monotonically, keeps every snapshot stabilizing, and the limit's
    transfer function matches the Riccati optimum to 1e-3 relative at 10
    frequency points."""
    ex = get_example("doyle")
    K_opt, _ = riccati_controller(ex.plant)
    pts = [1j * w for w in np.linspace(0.5, 5.0, 10)]
    ref = [transfer_eval(K_opt, s).item() for s in pts]
    failures = []
    for seed in range(4):
        K0 = init_pole_placement(ex.plant, rng=seed)
        cfg = OptimizerConfig(parameterization=Parameterization.CANONICAL,
                              grad_tol=1e-6, max_iters=10_000, seed=seed)
        trace = descend(ex.plant, K0, cfg)
        if trace.terminal is not Terminal.GRAD_TOL_REACHED:
            failures.append(f"seed {seed}: terminal {trace.terminal.value}")
            continue
        if not trace.monotone:
            failures.append(f"seed {seed}: cost not monotone")
        bad = [it for it, K in trace.snapshots
               if not is_stabilizing(ex.plant, K).stable]
        if bad:
            failures.append(f"seed {seed}: snapshots {bad} not stabilizing")
        rel = max(abs(transfer_eval(trace.final, s).item() - r) / abs(r)
                  for s, r in zip(pts, ref))
        if rel > 1e-3:
            failures.append(f"seed {seed}: transfer mismatch {rel:.3e} "
                            f"> 1e-3")
    _assert_all(failures)


def test_criterion_10_discrete_time_mirror():
    """Discrete-time scalar benchmark: a 20-point grid is classified
    exactly by the unit-circle region formula; the discrete gradient
    matches central differences to 1e-5; the discrete Riccati optimum is
    certified GlobalOptimum."""
    ex = get_example("exD.1")
    failures = []

    grid = [(a_k, b_k, c_k)
            for a_k in (-0.8, -0.4, 0.0, 0.4, 0.8)
            for b_k, c_k in ((0.5, 0.5), (0.5, -0.5), (-0.8, 0.9),
                             (1.2, -1.0))]
    assert len(grid) == 20
    for a_k, b_k, c_k in grid:
        K = Controller(A_K=np.array([[a_k]]), B_K=np.array([[b_k]]),
                       C_K=np.array([[c_k]]))
        prod = b_k * c_k
        predicted = (prod > 1.1 * a_k - 1.0
                     and prod < 1.0 + 1.1 * a_k - abs(1.1 + a_k))
        actual = is_stabilizing(ex.plant, K).stable
        if actual != predicted:
            failures.append(f"grid point ({a_k}, {b_k}, {c_k}): "
                            f"stabilizing={actual}, region says {predicted}")

    rng = np.random.default_rng(1001)
    done = 0
    attempts = 0
    while done < 20 and attempts < 200:
        attempts += 1
        plant = random_plant(rng, int(rng.integers(1, 4)), 1, 1,
                             TimeDomain.DISCRETE)
        K = random_stabilizing(rng, plant)
        try:
            if lqg_cost(plant, K).J > 1e4:
                continue  # too stiff for central differences to resolve
        except LandscapeError:
            continue
        done += 1
        g = lqg_gradient(plant, K).as_direction().to_vector()
        d = random_direction(rng, K.order, 1, 1)
        predicted = float(g @ d.to_vector())
        h, rel = 1e-6, np.inf
        for _ in range(3):
            try:
                Jp = lqg_cost(plant, perturb(K, d, h)).J
                Jm = lqg_cost(plant, perturb(K, d, -h)).J
            except LandscapeError:
                h *= 0.1
                continue
            rel = abs((Jp - Jm) / (2 * h) - predicted) / (1 + abs(predicted))
            break
        if rel > 1e-5:
            failures.append(f"discrete gradient #{done}: {rel:.3e} > 1e-5")
    if done < 20:
        failures.append(f"only {done} well-conditioned discrete instances")

    K_opt, _ = riccati_controller(ex.plant)
    rep = analyze_stationary(ex.plant, K_opt)
    if rep.verdict is not Verdict.GLOBAL_OPTIMUM:
        failures.append(f"discrete optimum verdict {rep.verdict.value}, "
                        f"expected GlobalOptimum")
    _assert_all(failures)
