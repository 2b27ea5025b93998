"""Command-line surface, JSON file I/O, and the benchmark harness.

Exit codes: 0 = yes / valid / success, 1 = no / invalid, 2 = usage or
parse error, 3 = resource cap or timeout.  Reports go to stdout as
canonical JSON (sorted keys); diagnostics go to stderr only, so stdout
is byte-stable across reruns except for the wall-time field.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from pathlib import Path

from .coloring import Coloring, PaletteTooLargeError, random_coloring
from .detect import colorful_chain, colorful_cycle
from .instance import (
    Instance,
    InvalidParameterError,
    KexError,
    Solution,
    SolutionError,
    instance_from_dict,
    instance_to_dict,
    planted_instance,
    random_instance,
    solution_from_dict,
    solution_to_dict,
    validate_instance,
    verify_solution,
)
from .oracle import SizeCapExceededError, oracle_max_coverage
from .reductions import (
    binpacking_to_cycles,
    binpacking_to_paths,
    fixed3_to_dag,
    from_directed_kpath,
    three_partition_shift,
)
from .solver import (
    SolveStats,
    SolverConfig,
    SolverTimeoutError,
    decide_at_least,
    maximize,
    solve_colorful_paper,
)

EXIT_YES = 0
EXIT_NO = 1
EXIT_USAGE = 2
EXIT_RESOURCE = 3


class ParseError(KexError):
    """Malformed input document; carries a position when known."""

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        super().__init__(message if position is None else f"{message} (at byte {position})")


def parse_instance(text: str | bytes) -> Instance:
    """Decode and validate an instance document; reject unknown fields."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.pos) from exc
    try:
        inst = instance_from_dict(doc)
    except InvalidParameterError as exc:
        raise ParseError(str(exc)) from exc
    issues = validate_instance(inst)
    if issues:
        raise InvalidParameterError("; ".join(map(str, issues)))
    return inst


def emit_instance(inst: Instance) -> str:
    """Canonical instance JSON: sorted keys, sorted arcs, one line."""
    return json.dumps(instance_to_dict(inst), sort_keys=True)


def parse_solution(text: str | bytes) -> Solution:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.pos) from exc
    try:
        return solution_from_dict(doc)
    except InvalidParameterError as exc:
        raise ParseError(str(exc)) from exc


def _dump(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, sort_keys=True) + "\n")


def _read(path: str) -> str:
    return Path(path).read_text(encoding="utf-8")


def _ints(text: str) -> list[int]:
    return [int(tok) for tok in text.split(",") if tok.strip() != ""]


def _pairs(text: str) -> list[tuple[int, int]]:
    out = []
    if not text.strip():
        return out
    for tok in text.split(","):
        u, v = tok.split("-")
        out.append((int(u), int(v)))
    return out


def _colormap(text: str) -> dict[int, int]:
    out: dict[int, int] = {}
    if not text.strip():
        return out
    for tok in text.split(","):
        v, c = tok.split(":")
        out[int(v)] = int(c)
    return out


def _default_seed(args_seed: int | None, need: bool = True) -> tuple[int | None, str]:
    """Resolve the run seed: flag, then KEX_SEED, then logged entropy.

    Deterministic runs that never consume randomness skip the entropy
    fallback so repeated runs stay byte-identical.
    """
    if args_seed is not None:
        return args_seed, "flag"
    env = os.environ.get("KEX_SEED")
    if env is not None:
        return int(env), "env"
    if not need:
        return None, "unused"
    return int.from_bytes(os.urandom(8), "big"), "entropy"


def _cmd_solve(args: argparse.Namespace) -> int:
    inst = parse_instance(_read(args.instance))
    seed, seed_src = _default_seed(args.seed, need=args.mode == "randomized")
    cfg = SolverConfig(
        mode=args.mode,
        variant=args.variant,
        delta=args.delta,
        seed=seed,
        b_max=args.b_max,
    )
    stats = SolveStats()
    stats.start_timer(args.timeout_ms)
    target = args.target if args.target is not None else inst.t
    t0 = time.monotonic()
    if args.maximize:
        t_star, sol = maximize(inst, cfg, stats)
        answer = "yes" if t_star >= target else "no"
        solution = sol if t_star > 0 or answer == "yes" else sol
    else:
        hit = decide_at_least(inst, target, cfg, stats)
        answer = "yes" if hit is not None else "no"
        t_star = hit.coverage if hit is not None else None
        solution = hit
    wall_ms = int((time.monotonic() - t0) * 1000)
    if seed_src == "entropy":
        print(f"seed drawn from entropy: {seed}", file=sys.stderr)
    _dump(
        {
            "answer": answer,
            "t_star": t_star,
            "solution": solution_to_dict(solution) if solution is not None else None,
            "stats": {
                "colorings_tried": stats.colorings_tried,
                "dp_transitions": stats.dp_transitions,
                "wall_time_ms": wall_ms,
                "mode": cfg.mode,
                "variant": cfg.variant,
                "seed": seed,
                "t_star": t_star,
            },
        }
    )
    return EXIT_YES if answer == "yes" else EXIT_NO


def _cmd_verify(args: argparse.Namespace) -> int:
    inst = parse_instance(_read(args.instance))
    sol = parse_solution(_read(args.solution))
    try:
        covered = verify_solution(inst, sol)
    except SolutionError as exc:
        for issue in exc.issues:
            print(str(issue), file=sys.stderr)
        return EXIT_NO
    _dump({"covered": covered})
    return EXIT_YES


def _cmd_oracle(args: argparse.Namespace) -> int:
    inst = parse_instance(_read(args.instance))
    t_star, sol = oracle_max_coverage(inst, size_cap=args.size_cap)
    _dump({"t_star": t_star, "solution": solution_to_dict(sol)})
    return EXIT_YES


def _write_or_print(doc: dict, path: str | None) -> None:
    text = json.dumps(doc, sort_keys=True) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text, encoding="utf-8")


def _cmd_gen(args: argparse.Namespace) -> int:
    if args.kind == "random":
        inst = random_instance(
            args.n, args.altruists, args.arc_prob, args.l_p, args.l_c, args.seed, t=args.t
        )
        _write_or_print(instance_to_dict(inst), args.out)
        return EXIT_YES
    inst, sol = planted_instance(
        args.patients,
        _ints(args.chains),
        _ints(args.cycles),
        args.noise,
        args.seed,
    )
    _write_or_print(instance_to_dict(inst), args.out)
    if args.solution_out is not None:
        _write_or_print(solution_to_dict(sol), args.solution_out)
    return EXIT_YES


def _cmd_reduce(args: argparse.Namespace) -> int:
    if args.gadget == "kpath":
        out = from_directed_kpath(args.n, _pairs(args.arcs), args.k)
    elif args.gadget == "binpack-paths":
        out = binpacking_to_paths(_ints(args.weights), args.bins, args.scale)
    elif args.gadget == "binpack-cycles":
        out = binpacking_to_cycles(_ints(args.weights), args.bins, args.scale)
    else:  # 3part: shift, then build the DAG
        shift = three_partition_shift(_ints(args.items), args.target, args.shift_c)
        out = fixed3_to_dag(list(shift.items), shift.target)
        sidecar_extra = {
            "shift": {"c": shift.shift, "target": shift.target, "items": list(shift.items)},
            "expected": shift.expected,
        }
        doc = instance_to_dict(out.instance)
        sidecar = {
            "expected": shift.expected,
            "paper_params": out.paper_params,
            "certificate_map": out.certificate_map,
        }
        sidecar.update({"shift": sidecar_extra["shift"]})
        _emit_reduction(doc, sidecar, args)
        return EXIT_YES
    doc = instance_to_dict(out.instance)
    sidecar = {
        "expected": out.expected,
        "paper_params": out.paper_params,
        "certificate_map": out.certificate_map,
    }
    _emit_reduction(doc, sidecar, args)
    return EXIT_YES


def _emit_reduction(doc: dict, sidecar: dict, args: argparse.Namespace) -> None:
    if args.out is None:
        _dump({"instance": doc, "sidecar": sidecar})
    else:
        _write_or_print(doc, args.out)
        side_path = args.sidecar or args.out + ".sidecar.json"
        _write_or_print(sidecar, side_path)


def _cmd_detect(args: argparse.Namespace) -> int:
    inst = parse_instance(_read(args.instance))
    coloring = Coloring(
        _colormap(args.patient_colors),
        _colormap(args.altruist_colors) if args.altruist_colors else None,
    )
    colors = set(_ints(args.colors))
    if args.kind == "cycle":
        found = colorful_cycle(inst, coloring, colors)
        doc = {"cycle": list(found.patients)} if found else {"cycle": None}
    else:
        found = colorful_chain(inst, coloring, colors, start_color=args.start_color)
        doc = {"chain": [found.start, *found.patients]} if found else {"chain": None}
    _dump(doc)
    return EXIT_YES if found else EXIT_NO


def bench(
    suite_dir: str,
    cfg: SolverConfig,
    mode: str,
    out: io.TextIOBase,
) -> None:
    """One CSV row per instance file: size, stats, and the answer.

    ``mode`` is deterministic/randomized (decide the instance target via
    the solver) or ``single`` (evaluate one seeded coloring with the
    instrumented single-palette DP; this is the transition-count probe).
    Per-instance failures land in the error column and the run goes on.
    """
    writer = csv.writer(out)
    writer.writerow(
        [
            "instance",
            "n",
            "t",
            "mode",
            "colorings_tried",
            "dp_transitions",
            "wall_time_ms",
            "answer",
            "error",
        ]
    )
    for path in sorted(Path(suite_dir).glob("*.json")):
        stats = SolveStats()
        t0 = time.monotonic()
        answer = ""
        error = ""
        n = t = ""
        try:
            inst = parse_instance(path.read_text(encoding="utf-8"))
            n, t = inst.n, inst.t
            if mode == "single":
                patients = inst.patients()
                base = random_coloring(len(patients), max(inst.t, 1), seed=f"{cfg.seed}|{path.name}")
                chi = {v: base.patient_colors[i] for i, v in enumerate(patients)}
                stats.colorings_tried += 1
                hit = solve_colorful_paper(inst, Coloring(chi), stats)
                answer = "yes" if hit is not None else "no"
            else:
                hit = decide_at_least(inst, inst.t, cfg, stats)
                answer = "yes" if hit is not None else "no"
        except KexError as exc:
            error = f"{type(exc).__name__}: {exc}"
        wall_ms = int((time.monotonic() - t0) * 1000)
        writer.writerow(
            [
                path.name,
                n,
                t,
                mode,
                stats.colorings_tried,
                stats.dp_transitions,
                wall_ms,
                answer,
                error,
            ]
        )


def _cmd_bench(args: argparse.Namespace) -> int:
    seed, _ = _default_seed(args.seed, need=args.mode != "deterministic")
    cfg = SolverConfig(
        mode=args.mode if args.mode != "single" else "deterministic",
        variant=args.variant,
        delta=args.delta,
        seed=seed,
    )
    if args.out is None:
        bench(args.suite, cfg, args.mode, sys.stdout)
    else:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            bench(args.suite, cfg, args.mode, fh)
    return EXIT_YES


def _build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="kex", description=__doc__)
    sub = top.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide or maximize coverage on an instance file")
    p.add_argument("instance")
    p.add_argument("--mode", choices=["deterministic", "randomized"], default="deterministic")
    p.add_argument("--variant", choices=["corrected", "paper"], default="corrected")
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--maximize", action="store_true")
    p.add_argument("--target", type=int, default=None, help="override the instance target")
    p.add_argument("--timeout-ms", type=int, default=None)
    p.add_argument("--b-max", type=int, default=None)
    p.set_defaults(func=_cmd_solve)

    p = sub.add_parser("verify", help="check a solution file against an instance file")
    p.add_argument("instance")
    p.add_argument("solution")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("oracle", help="exact exhaustive optimum (small instances)")
    p.add_argument("instance")
    p.add_argument("--size-cap", type=int, default=22)
    p.set_defaults(func=_cmd_oracle)

    p = sub.add_parser("gen", help="generate instances")
    gsub = p.add_subparsers(dest="kind", required=True)
    g = gsub.add_parser("random")
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--altruists", type=int, default=0)
    g.add_argument("--arc-prob", type=float, required=True)
    g.add_argument("--l-p", type=int, default=0)
    g.add_argument("--l-c", type=int, default=0)
    g.add_argument("--t", type=int, default=0)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("-o", "--out", default=None)
    g.set_defaults(func=_cmd_gen)
    g = gsub.add_parser("plant")
    g.add_argument("--patients", type=int, required=True)
    g.add_argument("--chains", default="")
    g.add_argument("--cycles", default="")
    g.add_argument("--noise", type=int, default=0)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("-o", "--out", default=None)
    g.add_argument("--solution-out", default=None)
    g.set_defaults(func=_cmd_gen)

    p = sub.add_parser("reduce", help="compile a hard-problem source into an instance")
    rsub = p.add_subparsers(dest="gadget", required=True)
    r = rsub.add_parser("kpath")
    r.add_argument("--n", type=int, required=True)
    r.add_argument("--arcs", default="", help='e.g. "0-1,1-2"')
    r.add_argument("--k", type=int, required=True)
    for name in ("binpack-paths", "binpack-cycles"):
        b = rsub.add_parser(name)
        b.add_argument("--weights", required=True, help='e.g. "3,3,3"')
        b.add_argument("--bins", type=int, required=True)
        b.add_argument("--scale", type=int, default=None, help="test-only scaling override")
    r3 = rsub.add_parser("3part")
    r3.add_argument("--items", required=True)
    r3.add_argument("--target", type=int, required=True)
    r3.add_argument("--shift-c", type=int, default=None, help="test-only shift override")
    for rp in rsub.choices.values():
        rp.add_argument("-o", "--out", default=None)
        rp.add_argument("--sidecar", default=None)
        rp.set_defaults(func=_cmd_reduce)

    p = sub.add_parser("detect", help="debug: run one colorful detection")
    p.add_argument("instance")
    p.add_argument("--patient-colors", required=True, help='e.g. "1:1,2:2"')
    p.add_argument("--altruist-colors", default="")
    p.add_argument("--colors", required=True, help='color set, e.g. "1,2"')
    p.add_argument("--kind", choices=["cycle", "chain"], required=True)
    p.add_argument("--start-color", type=int, default=None)
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("bench", help="run a suite directory, emit CSV")
    p.add_argument("suite")
    p.add_argument("--mode", choices=["deterministic", "randomized", "single"], default="deterministic")
    p.add_argument("--variant", choices=["corrected", "paper"], default="corrected")
    p.add_argument("--delta", type=float, default=0.01)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("-o", "--out", default=None)
    p.set_defaults(func=_cmd_bench)
    return top


def run_cli(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (SizeCapExceededError, SolverTimeoutError, PaletteTooLargeError) as exc:
        print(f"resource limit: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except KexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run_cli())


if __name__ == "__main__":
    main()
