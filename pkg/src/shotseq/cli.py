"""Command-line front end.

Subcommands: ``optimize`` (run one assembly optimization), ``learn``
(estimate a transition matrix from a reference), ``bench`` (accuracy table
against the oracle), ``eval`` (style MSE between two label sequences).

Exit codes: 0 success, 2 invalid flags, 3 data errors, 4 infeasible
instances. Logs go to stderr; data goes to ``--out`` files or stdout.
Every command is deterministic under a fixed ``--seed`` and the result
JSON echoes the full effective configuration, defaults included.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import bench as bench_mod
from .catalog import load_catalog, load_reference
from .continuous import ContinuousConfig, continuous_langevin
from .discrete import (
    OptimizerConfig,
    beam_search,
    brute_force,
    genetic,
    langevin_bs,
    langevin_ga,
)
from .energy import EnergySpec
from .errors import DataError, InfeasibleError, NoTransitionsError
from .syntax import (
    builtin_motion_matrix,
    builtin_shot_size_matrix,
    learn_transition_matrix,
    load_matrix,
    matrix_to_json,
)

_DISCRETE_ALGOS = {
    "oracle": None,
    "bs": beam_search,
    "ga": genetic,
    "langevin-bs": langevin_bs,
    "langevin-ga": langevin_ga,
}


def _write(text: str, out_path) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _log(message: str) -> None:
    print(message, file=sys.stderr)


def _json_energy(value: float):
    return None if math.isinf(value) else value


def _resolve_matrix(args, alphabet: str, reference, weight: float):
    """Pick the score matrix for one alphabet: explicit file, learned from
    the reference, or the built-in table."""
    path = args.size_matrix if alphabet == "size" else args.motion_matrix
    if path:
        return load_matrix(path), f"file:{path}"
    if reference is not None:
        try:
            return learn_transition_matrix(reference, alphabet), f"learned:{args.reference}"
        except NoTransitionsError:
            if weight > 0:
                raise
    builtin = builtin_shot_size_matrix() if alphabet == "size" else builtin_motion_matrix()
    return builtin, "builtin"


def cmd_optimize(args) -> int:
    if args.reference and (args.size_matrix or args.motion_matrix):
        _log("--reference conflicts with --size-matrix/--motion-matrix")
        return 2
    catalog = load_catalog(args.catalog)
    reference = load_reference(args.reference) if args.reference else None
    size_matrix, size_source = _resolve_matrix(args, "size", reference, args.alpha)
    motion_matrix, motion_source = _resolve_matrix(args, "motion", reference, args.beta)

    spec = EnergySpec(
        alpha=args.alpha,
        beta=args.beta,
        gamma=args.gamma,
        size_matrix=size_matrix,
        motion_matrix=motion_matrix,
        script_embedding=catalog.script_embedding if args.gamma > 0 else None,
    )

    epsilon = args.epsilon if args.epsilon is not None else (0.0001 if args.algo == "continuous" else 0.1)
    config_echo = {
        "algo": args.algo,
        "catalog": args.catalog,
        "k": args.k,
        "alpha": args.alpha,
        "beta": args.beta,
        "gamma": args.gamma,
        "size_matrix": size_source,
        "motion_matrix": motion_source,
        "seed": args.seed,
        "iters": args.iters,
        "beam": args.beam,
        "pop": args.pop,
        "rc": args.rc,
        "rm": args.rm,
        "epsilon": epsilon,
        "temp": args.temp,
        "topq": args.topq,
    }

    if args.algo == "continuous":
        ccfg = ContinuousConfig(epsilon=epsilon, iters=args.iters, seed=args.seed)
        config_echo["eta"] = ccfg.eta
        config_echo["sinkhorn_iters"] = ccfg.sinkhorn_iters
        result = continuous_langevin(catalog, args.k, spec, ccfg)
    elif args.algo == "oracle":
        result = brute_force(catalog, args.k, spec)
    else:
        cfg = OptimizerConfig(
            max_iters=args.iters,
            top_q=args.topq,
            beam_size=args.beam,
            population=args.pop,
            crossover_prob=args.rc,
            mutation_prob=args.rm,
            step_size=epsilon,
            temperature=args.temp,
            seed=args.seed,
        )
        result = _DISCRETE_ALGOS[args.algo](catalog, args.k, spec, cfg)

    doc = {
        "config": config_echo,
        "best_energy": _json_energy(result.best_energy),
        "iterations_used": result.iterations_used,
        "sequences": [
            {
                "shot_ids": list(seq.shot_ids),
                "score_size": comp.score_size,
                "score_motion": comp.score_motion,
                "cos_semantic": comp.cos_semantic,
            }
            for seq, comp in zip(result.best_sequences, result.component_scores)
        ],
    }
    if args.trace:
        doc["trace"] = list(result.trace) if result.trace is not None else None
    _write(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def cmd_learn(args) -> int:
    reference = load_reference(args.reference)
    matrix = learn_transition_matrix(reference, args.alphabet)
    _write(matrix_to_json(matrix), args.out)
    _log(f"global sum: {float(matrix.values.sum()):.6f}")
    return 0


def cmd_eval(args) -> int:
    output = load_reference(args.output_labels)
    reference = load_reference(args.reference)
    style = bench_mod.evaluate_style(output, reference)
    if style.size_mse is None:
        _log("warning: no shot-size transitions on both sides; size_mse is null")
    if style.motion_mse is None:
        _log("warning: no motion transitions on both sides; motion_mse is null")
    doc = {"size_mse": style.size_mse, "motion_mse": style.motion_mse}
    _write(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def _parse_scenarios(text: str):
    scenarios = []
    for token in text.split(","):
        token = token.strip()
        if not token:
            continue
        if ":" in token:
            kind, _, count = token.partition(":")
            scenarios.append(bench_mod.Scenario(kind=kind, samples=int(count)))
        else:
            scenarios.append(bench_mod.Scenario(kind=token))
    if not scenarios:
        raise ValueError("no scenarios given")
    return scenarios


def cmd_bench(args) -> int:
    scenarios = _parse_scenarios(args.scenarios)
    algorithms = [token.strip() for token in args.algos.split(",") if token.strip()]
    table = bench_mod.run_ablation(algorithms, scenarios, seed=args.seed)
    _write(table.to_csv(), args.out + ".csv")
    _write(table.to_json(), args.out + ".json")
    _log(f"wrote {args.out}.csv and {args.out}.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shotseq", description="Energy-based shot assembly optimization")
    sub = parser.add_subparsers(dest="command", required=True)

    opt = sub.add_parser("optimize", help="select and order K shots from a catalog")
    opt.add_argument("--catalog", required=True, help="catalog JSON path")
    opt.add_argument("--k", type=int, required=True, help="number of shots to select")
    opt.add_argument("--algo", required=True,
                     choices=["oracle", "bs", "ga", "langevin-bs", "langevin-ga", "continuous"])
    opt.add_argument("--alpha", type=float, default=1.0, help="shot-size syntax weight")
    opt.add_argument("--beta", type=float, default=0.0, help="motion syntax weight")
    opt.add_argument("--gamma", type=float, default=0.0, help="semantic weight")
    opt.add_argument("--size-matrix", help="size score matrix JSON (default: built-in table)")
    opt.add_argument("--motion-matrix", help="motion score matrix JSON (default: built-in table)")
    opt.add_argument("--reference", help="reference labels; learned matrices replace the built-ins")
    opt.add_argument("--seed", type=int, default=0)
    opt.add_argument("--iters", type=int, default=1000, help="maximum iterations")
    opt.add_argument("--beam", type=int, default=15, help="beam size")
    opt.add_argument("--pop", type=int, default=30, help="population size")
    opt.add_argument("--rc", type=float, default=0.8, help="crossover probability")
    opt.add_argument("--rm", type=float, default=0.4, help="mutation probability")
    opt.add_argument("--epsilon", type=float, default=None,
                     help="Langevin step size (default 0.1; noise intensity 0.0001 for continuous)")
    opt.add_argument("--temp", type=float, default=1.0, help="Langevin temperature")
    opt.add_argument("--topq", type=int, default=None,
                     help="stop once this many best-tying sequences are found (default: run all iterations)")
    opt.add_argument("--out", help="result JSON path (default: stdout)")
    opt.add_argument("--trace", action="store_true", help="include the per-iteration incumbent trace")
    opt.set_defaults(func=cmd_optimize)

    learn = sub.add_parser("learn", help="learn a transition matrix from a reference sequence")
    learn.add_argument("--reference", required=True)
    learn.add_argument("--alphabet", required=True, choices=["size", "motion"])
    learn.add_argument("--out", help="matrix JSON path (default: stdout)")
    learn.set_defaults(func=cmd_learn)

    ben = sub.add_parser("bench", help="accuracy of the search algorithms against the oracle")
    ben.add_argument("--scenarios", default="fixed5c3,random5c3,extended-random",
                     help="comma list, optionally name:count")
    ben.add_argument("--algos", default="continuous,bs,ga,langevin-bs,langevin-ga")
    ben.add_argument("--seed", type=int, default=0)
    ben.add_argument("--out", required=True, help="output prefix; writes <out>.csv and <out>.json")
    ben.set_defaults(func=cmd_bench)

    ev = sub.add_parser("eval", help="style MSE between an output and a reference label sequence")
    ev.add_argument("--output-labels", required=True)
    ev.add_argument("--reference", required=True)
    ev.add_argument("--out", help="JSON path (default: stdout)")
    ev.set_defaults(func=cmd_eval)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except FileNotFoundError as exc:
        _log(f"error: {exc}")
        return 3
    except DataError as exc:
        _log(f"error: {type(exc).__name__}: {exc}")
        return 3
    except InfeasibleError as exc:
        _log(f"error: {type(exc).__name__}: {exc}")
        return 4
    except ValueError as exc:
        _log(f"error: {exc}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
