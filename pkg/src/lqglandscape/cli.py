"""Command-line interface.

Subcommands
-----------
synthesize
    Build the optimal controller for a plant and report its cost.
stationary
    Run the stationary-point analysis/certification at a controller.
grad-check
    Validate the analytic gradient against central finite differences.
hessian
    Eigenvalues of the Hessian at a controller (optionally restricted to
    directions transverse to the similarity orbit).
path
    Construct a stabilizing path between two controllers.
descend
    Run gradient descent from an initial controller and certify the limit.
example
    Run the executable expected-value report of a named example.

Plants come either from ``--plant FILE`` (JSON with keys ``domain``, ``A``,
``B``, ``C``, ``W``, ``V``, ``Q``, ``R``, matrices as row-major nested lists)
or from ``--example NAME``.  Controller arguments accept either a witness
name from the chosen example or a path to a JSON file with keys ``A_K``,
``B_K``, ``C_K`` and optional ``D_K``.

Exit codes: 0 success, 1 failed example checks, 2 invalid input,
3 numerical failure, 4 no path found.  All numerics are deterministic;
randomized steps take explicit ``--seed`` values and nothing is read from
environment variables.
"""

from __future__ import annotations

import argparse
import json
import sys
from enum import Enum
from pathlib import Path

import numpy as np

from .connectivity import path_between
from .cost import hessian_matrix, lqg_cost, lqg_gradient, restricted_rcond
from .errors import LandscapeError, NoPathFound
from .examples import get_example, list_examples
from .model import (
    Controller,
    Direction,
    Plant,
    controller_from_dict,
    controller_to_dict,
    is_stabilizing,
    perturb,
    plant_from_dict,
)
from .optimizer import (
    OptimizerConfig,
    Parameterization,
    Terminal,
    certify_limit,
    descend,
    init_near_optimal,
    init_pole_placement,
)
from .synthesis import analyze_stationary, riccati_controller

__all__ = ["main", "build_parser"]

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_INVALID = 2
EXIT_NUMERICAL = 3
EXIT_NO_PATH = 4


# ---------------------------------------------------------------------------
# Input loading and output rendering.
# ---------------------------------------------------------------------------

def _jsonable(value):
    """Recursively convert numpy/enum values into plain JSON types."""
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        return float(value)
    return value


def _emit(payload: dict, table: bool) -> None:
    payload = _jsonable(payload)
    if not table:
        print(json.dumps(payload, indent=2))
        return
    for key, value in payload.items():
        if isinstance(value, list) and value and isinstance(value[0], list):
            print(f"{key}:")
            block = np.array2string(np.asarray(value, dtype=float),
                                    precision=6, suppress_small=True)
            for line in block.splitlines():
                print(f"  {line}")
        elif isinstance(value, dict):
            print(f"{key}:")
            for k2, v2 in value.items():
                print(f"  {k2}: {v2}")
        else:
            print(f"{key}: {value}")


def _resolve_plant(args) -> tuple[Plant, object | None]:
    """Return the plant plus the example object when one was named."""
    if getattr(args, "example", None):
        ex = get_example(args.example)
        return ex.plant, ex
    if getattr(args, "plant", None):
        with open(args.plant, encoding="utf-8") as fh:
            data = json.load(fh)
        return plant_from_dict(data), None
    raise ValueError("a plant is required: pass --plant FILE or "
                     "--example NAME")


def _resolve_controller(spec: str, example) -> Controller:
    """Interpret a controller argument as a witness name or a JSON file."""
    if example is not None and spec in example.controllers:
        return example.controllers[spec]
    path = Path(spec)
    if path.exists():
        with open(path, encoding="utf-8") as fh:
            return controller_from_dict(json.load(fh))
    hint = ""
    if example is not None:
        hint = (f"; example {example.name!r} provides: "
                f"{', '.join(sorted(example.controllers))}")
    raise ValueError(f"controller {spec!r} is neither a witness name nor an "
                     f"existing file{hint}")


def _add_plant_options(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("plant source (choose one)")
    group.add_argument("--plant", metavar="FILE",
                       help="JSON plant description")
    group.add_argument("--example", metavar="NAME",
                       help="named example plant (see 'example --list')")
    parser.add_argument("--table", action="store_true",
                        help="human-readable output instead of JSON")


# ---------------------------------------------------------------------------
# Subcommands.
# ---------------------------------------------------------------------------

def cmd_synthesize(args) -> int:
    plant, _ = _resolve_plant(args)
    K, J = riccati_controller(plant)
    mrep = K.minimality()
    warnings = []
    if not mrep.minimal:
        warnings.append("non-minimal optimum")
    payload = {
        "domain": plant.domain.value,
        "controller": controller_to_dict(K),
        "J": J,
        "controllable": mrep.controllable,
        "observable": mrep.observable,
        "minimal": mrep.minimal,
        "warnings": warnings,
    }
    _emit(payload, args.table)
    for w in warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK


def cmd_stationary(args) -> int:
    plant, example = _resolve_plant(args)
    K = _resolve_controller(args.controller, example)
    report = analyze_stationary(plant, K, tol=args.tol)
    payload = {
        "verdict": report.verdict,
        "grad_norm": report.grad_norm,
        "J": report.J,
        "controllable": report.minimality.controllable,
        "observable": report.minimality.observable,
        "detail": report.detail,
    }
    if report.recovered is not None:
        rec = report.recovered
        payload["recovered"] = {
            "T": rec.T,
            "P": rec.P,
            "S": rec.S,
            "riccati_residual_P": rec.riccati_residual_P,
            "riccati_residual_S": rec.riccati_residual_S,
            "gains_stable": rec.gains_stable,
        }
    _emit(payload, args.table)
    return EXIT_OK


def cmd_grad_check(args) -> int:
    plant, example = _resolve_plant(args)
    K = _resolve_controller(args.controller, example)
    grad = lqg_gradient(plant, K)
    rng = np.random.default_rng(args.seed)
    q, p, m = K.order, K.p, K.m
    g_vec = grad.as_direction().to_vector()
    results = []
    for _ in range(args.directions):
        d = Direction(dA=rng.standard_normal((q, q)),
                      dB=rng.standard_normal((q, p)),
                      dC=rng.standard_normal((m, q)))
        scale = np.linalg.norm(d.to_vector())
        d = Direction(dA=d.dA / scale, dB=d.dB / scale, dC=d.dC / scale)
        predicted = float(g_vec @ d.to_vector())
        h = args.h
        rel = np.inf
        for _attempt in range(4):
            try:
                Jp = lqg_cost(plant, perturb(K, d, h)).J
                Jm = lqg_cost(plant, perturb(K, d, -h)).J
            except LandscapeError:
                h *= 0.1
                continue
            fd = (Jp - Jm) / (2 * h)
            rel = abs(fd - predicted) / (1.0 + abs(predicted))
            break
        results.append({"predicted": predicted, "h": h, "rel_err": rel})
    max_rel = max(r["rel_err"] for r in results)
    payload = {
        "grad_norm": grad.norm(),
        "directions": results,
        "max_rel_err": max_rel,
        "ok": max_rel <= args.rtol,
        "rtol": args.rtol,
    }
    _emit(payload, args.table)
    return EXIT_OK if max_rel <= args.rtol else EXIT_NUMERICAL


def cmd_hessian(args) -> int:
    plant, example = _resolve_plant(args)
    K = _resolve_controller(args.controller, example)
    if args.restricted:
        spec = restricted_rcond(plant, K)
        payload = {
            "restricted": True,
            "min_eig": spec.min_eig,
            "max_eig": spec.max_eig,
            "rcond": spec.rcond,
        }
        _emit(payload, args.table)
        return EXIT_OK
    H = hessian_matrix(plant, K)
    eigs = np.sort(np.linalg.eigvalsh(H))
    payload = {
        "restricted": False,
        "dimension": int(H.shape[0]),
        "coordinates": "[vec(dC); vec(dB); vec(dA)] (row-major)",
        "eigenvalues": eigs,
        "min_eig": float(eigs[0]),
        "max_eig": float(eigs[-1]),
        "matrix": H,
    }
    _emit(payload, args.table)
    return EXIT_OK


def cmd_path(args) -> int:
    plant, example = _resolve_plant(args)
    K0 = _resolve_controller(args.start, example)
    K1 = _resolve_controller(args.end, example)
    samples = path_between(plant, K0, K1, steps=args.steps)
    margins = [is_stabilizing(plant, K).margin for K in samples]
    payload = {
        "steps": args.steps,
        "samples": len(samples),
        "all_stabilizing": all(m < 0 for m in margins),
        "worst_margin": max(margins),
        "start": controller_to_dict(samples[0]),
        "end": controller_to_dict(samples[-1]),
    }
    if args.out:
        out = Path(args.out)
        full = dict(payload)
        full["controllers"] = [controller_to_dict(K) for K in samples]
        full["margins"] = margins
        out.parent.mkdir(parents=True, exist_ok=True)
        out.write_text(json.dumps(_jsonable(full), indent=2),
                       encoding="utf-8")
        payload["out"] = str(out)
        if not args.no_plot:
            from .plots import save_path_plot
            png = out.with_suffix(".png")
            save_path_plot(plant, samples, png)
            payload["plot"] = str(png)
    _emit(payload, args.table)
    return EXIT_OK


def cmd_descend(args) -> int:
    plant, example = _resolve_plant(args)
    if args.controller is not None:
        K0 = _resolve_controller(args.controller, example)
    elif args.init == "pole":
        K0 = init_pole_placement(plant, rng=args.seed)
    else:
        K0 = init_near_optimal(plant, delta=args.delta, rng=args.seed)
    config = OptimizerConfig(
        grad_tol=args.grad_tol,
        max_iters=args.max_iters,
        parameterization=(Parameterization.CANONICAL
                          if args.param == "canonical"
                          else Parameterization.FULL),
        seed=args.seed,
    )
    trace = descend(plant, K0, config)
    cert = certify_limit(plant, trace.final, tol=args.certify_tol)
    last = trace.records[-1]
    payload = {
        "terminal": trace.terminal,
        "parameterization": trace.parameterization,
        "iterations": trace.iterations,
        "monotone": trace.monotone,
        "J": last.J,
        "grad_norm": last.grad_norm,
        "controller": controller_to_dict(trace.final),
        "certificate": cert.to_dict(),
    }
    if args.out:
        out = Path(args.out)
        trace.write_csv(out)
        payload["out"] = str(out)
        if not args.no_plot:
            from .plots import save_trace_plot
            png = out.with_suffix(".png")
            save_trace_plot(trace, png)
            payload["plot"] = str(png)
    _emit(payload, args.table)
    return EXIT_OK


def cmd_example(args) -> int:
    if args.list:
        for ex in list_examples():
            print(f"{ex.name:10s} {ex.summary}")
        return EXIT_OK
    if not args.name:
        raise ValueError("an example name is required (or use --list)")
    ex = get_example(args.name)
    print(f"{ex.name}: {ex.summary}")
    results = ex.checks()
    failed = 0
    for r in results:
        mark = "PASS" if r.passed else "FAIL"
        line = f"[{mark}] {r.label}"
        if r.detail and (args.verbose or not r.passed):
            line += f"  ({r.detail})"
        print(line)
        failed += 0 if r.passed else 1
    print(f"SUMMARY: {len(results) - failed}/{len(results)} checks passed")
    return EXIT_OK if failed == 0 else EXIT_CHECK_FAILED


# ---------------------------------------------------------------------------
# Parser and entry point.
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lqg-landscape",
        description=("Analyze the cost landscape of linear-quadratic output "
                     "feedback over stabilizing dynamical controllers."),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synthesize",
                       help="optimal controller and cost for a plant")
    _add_plant_options(p)
    p.set_defaults(func=cmd_synthesize)

    p = sub.add_parser("stationary",
                       help="certify a stationary point")
    _add_plant_options(p)
    p.add_argument("controller", help="witness name or controller JSON file")
    p.add_argument("--tol", type=float, default=None,
                   help="relative gate for gradient/certificate residuals "
                        "(default 1e-6)")
    p.set_defaults(func=cmd_stationary)

    p = sub.add_parser("grad-check",
                       help="finite-difference validation of the gradient")
    _add_plant_options(p)
    p.add_argument("controller", help="witness name or controller JSON file")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the probe directions (default 0)")
    p.add_argument("--directions", type=int, default=5,
                   help="number of probe directions (default 5)")
    p.add_argument("--h", type=float, default=1e-6,
                   help="central-difference step (default 1e-6)")
    p.add_argument("--rtol", type=float, default=1e-5,
                   help="acceptance threshold on the relative error")
    p.set_defaults(func=cmd_grad_check)

    p = sub.add_parser("hessian",
                       help="Hessian eigenvalues at a controller")
    _add_plant_options(p)
    p.add_argument("controller", help="witness name or controller JSON file")
    p.add_argument("--restricted", action="store_true",
                   help="restrict to directions transverse to the "
                        "similarity orbit (requires a stationary point)")
    p.set_defaults(func=cmd_hessian)

    p = sub.add_parser("path",
                       help="stabilizing path between two controllers")
    _add_plant_options(p)
    p.add_argument("start", help="witness name or controller JSON file")
    p.add_argument("end", help="witness name or controller JSON file")
    p.add_argument("--steps", type=int, default=200,
                   help="number of segments per leg (default 200)")
    p.add_argument("--out", metavar="FILE",
                   help="write full sample list as JSON (a PNG with the "
                        "same stem is rendered next to it)")
    p.add_argument("--no-plot", action="store_true",
                   help="suppress the PNG when --out is given")
    p.set_defaults(func=cmd_path)

    p = sub.add_parser("descend",
                       help="gradient descent over stabilizing controllers")
    _add_plant_options(p)
    p.add_argument("controller", nargs="?", default=None,
                   help="initial controller (witness name or JSON file); "
                        "when omitted, --init chooses the starting point")
    p.add_argument("--init", choices=["pole", "near-optimal"],
                   default="pole",
                   help="initialization when no controller is given "
                        "(default: pole placement)")
    p.add_argument("--param", choices=["full", "canonical"], default="full",
                   help="parameterization of the descent (default full)")
    p.add_argument("--seed", type=int, default=0,
                   help="seed for the initialization (default 0)")
    p.add_argument("--delta", type=float, default=1e-2,
                   help="perturbation size for --init near-optimal")
    p.add_argument("--grad-tol", type=float, default=1e-6,
                   help="relative gradient stopping tolerance")
    p.add_argument("--certify-tol", type=float, default=1e-3,
                   help="relative gate for the limit certificate; looser "
                        "than --grad-tol because canonical descent controls "
                        "only the section-restricted gradient, and near a "
                        "stiff optimum the full gradient lags it")
    p.add_argument("--max-iters", type=int, default=10_000,
                   help="iteration cap (default 10000)")
    p.add_argument("--out", metavar="FILE",
                   help="write the iteration trace as CSV (a PNG with the "
                        "same stem is rendered next to it)")
    p.add_argument("--no-plot", action="store_true",
                   help="suppress the PNG when --out is given")
    p.set_defaults(func=cmd_descend)

    p = sub.add_parser("example",
                       help="run a named example's expected-value report")
    p.add_argument("name", nargs="?", default=None,
                   help="example name, e.g. ex3.2 or ex4.5(0.1)")
    p.add_argument("--list", action="store_true",
                   help="list available examples")
    p.add_argument("--verbose", action="store_true",
                   help="print details for passing checks too")
    p.set_defaults(func=cmd_example)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except NoPathFound as exc:
        print(f"no path found: {exc}", file=sys.stderr)
        return EXIT_NO_PATH
    except LandscapeError as exc:
        print(f"numerical failure: {type(exc).__name__}: {exc}",
              file=sys.stderr)
        return EXIT_NUMERICAL
    except (ValueError, KeyError, FileNotFoundError,
            json.JSONDecodeError) as exc:
        message = exc.args[0] if exc.args else str(exc)
        print(f"invalid input: {message}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    raise SystemExit(main())
