"""
Command-line front end.

Artifacts (JSON, CSV) go to stdout or the -o file; logs go to stderr, so two
runs with the same arguments and seed print identical bytes.
"""

import argparse
import json
import logging
import sys
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

import uvicorn
from dotenv import load_dotenv
from pydantic import BaseModel, ValidationError

from app.core.config import settings
from app.core.errors import InputError, LeakguardError
from app.models.instance import Instance
from app.schemas.common import BestResponseMode, CheckKind, EvalMethod, LpStatus, SearchMode
from app.schemas.evaluation import ObservedResponse
from app.services.benchmarks import build_report, lower_bounds_to_csv, report_to_csv
from app.services.bruteforce import bruteforce_optimal_responses, responses_to_observations
from app.services.constructors import SCHEME_NAMES, construct
from app.services.downstream import downstream_utility_model
from app.services.instance_lab import FAMILIES, LOWER_BOUND_FAMILIES, RANDOM_FAMILIES, generate, verify_lower_bound_suite
from app.services.lp_builders import build_persuasive_lp, scheme_from_solution
from app.services.persuasiveness import first_failure, run_check
from app.services.reproduction import reproduce_appendix_c
from app.services.simplex import export_lp, solve
from app.utils.rationals import approx, format_rational, parse_rational
from app.utils.serialization import dumps, instance_hash, parse_model_spec, read_document, write_document

logger = logging.getLogger("app.cli")

EXIT_CODES = """exit codes:
  0  success (check passed, reproduction matched)
  1  a check or bound verification failed
  2  input error: bad flag, malformed document or broken invariant
  3  size refusal: the computation exceeds a configured cap
  4  internal error: a self-check on a result failed
"""


# === Output helpers ===


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(payload: Dict[str, Any], output: Optional[str] = None) -> None:
    _emit(json.dumps(payload, indent=2) + "\n", output)


def _emit_document(document: BaseModel, output: Optional[str]) -> None:
    if output:
        write_document(output, document)
    else:
        sys.stdout.write(dumps(document) + "\n")


def _rational_fields(value: Fraction) -> Dict[str, str]:
    return {"value": format_rational(value), "approx": approx(value)}


def _rational(text: str) -> Fraction:
    try:
        return parse_rational(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def _k_range(text: str) -> List[int]:
    low, separator, high = text.partition("..")
    try:
        values = [int(low)] if not separator else list(range(int(low), int(high) + 1))
    except ValueError:
        raise argparse.ArgumentTypeError(f"k range {text!r} is not of the form a..b") from None
    if not values:
        raise argparse.ArgumentTypeError(f"k range {text!r} is empty")
    return values


def _alphabets(text: str) -> List[Any]:
    # "2,2,3" gives symbol counts, "+-,01" gives explicit symbols
    entries = []
    for entry in text.split(","):
        entry = entry.strip()
        entries.append(int(entry) if entry.isdigit() else list(entry))
    return entries


def _load_instance(path: str) -> Instance:
    return read_document(path, "instance")


# === Subcommands ===


def cmd_gen(args: argparse.Namespace) -> int:
    instance = generate(
        args.family,
        n=args.n,
        k=args.k,
        epsilon=args.epsilon,
        seed=args.seed,
        utility=args.utility,
        pad=args.pad,
    )
    _emit_document(instance, args.output)
    if args.output:
        _emit_json({"instance_hash": instance_hash(instance), "n": instance.n, "tool_version": settings.TOOL_VERSION})
    return 0


def cmd_construct(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    base = read_document(args.base, "scheme") if args.base else None
    scheme = construct(
        args.scheme,
        instance,
        base=base,
        k=args.k,
        gamma=args.gamma,
        i=args.index,
        m=args.m,
        c0=args.c0,
        c1=args.c1,
    )
    logger.info(f"constructed {args.scheme} for instance {instance_hash(instance)[:12]}")
    _emit_document(scheme, args.output)
    return 0


def cmd_check(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    scheme = read_document(args.scheme, "scheme")
    verdict = run_check(CheckKind(args.kind), instance, scheme, k=args.k, mode=BestResponseMode(args.mode))
    violation = first_failure(verdict)
    if violation is not None:
        logger.warning(f"{verdict.check.value} check failed: {violation}")
    _emit_document(verdict, args.output)
    return 0 if verdict.ok else 1


def cmd_solve_lp(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    lp = build_persuasive_lp(instance, args.k)
    if args.export:
        Path(args.export).write_text(export_lp(lp))
    solution = solve(lp)
    payload: Dict[str, Any] = {"k": args.k, "status": solution.status.value, "pivots": solution.pivots}
    if solution.status == LpStatus.OPTIMAL:
        payload.update(_rational_fields(solution.value))
        if args.emit_scheme:
            write_document(args.emit_scheme, scheme_from_solution(instance, solution))
    payload.update({"instance_hash": instance_hash(instance), "tool_version": settings.TOOL_VERSION})
    _emit_json(payload, args.output)
    return 0


def cmd_eval(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    scheme = read_document(args.scheme, "scheme")
    model = parse_model_spec(args.model, instance.n)
    method = EvalMethod.MONTE_CARLO if args.mc is not None else EvalMethod.EXACT
    seed = settings.DEFAULT_SEED if args.seed is None else args.seed
    result = downstream_utility_model(
        instance, scheme, model, method=method, samples=args.mc, seed=seed, mode=BestResponseMode(args.mode)
    )
    if isinstance(result, Fraction):
        payload: Dict[str, Any] = _rational_fields(result)
    else:
        payload = {
            "mean": format_rational(result.mean),
            "approx": approx(result.mean),
            "stderr": result.stderr,
            "samples": result.samples,
            "seed": result.seed,
        }
    payload.update({"method": method.value, "instance_hash": instance_hash(instance), "tool_version": settings.TOOL_VERSION})
    _emit_json(payload, args.output)
    return 0


def cmd_bruteforce(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    pattern = read_document(args.pattern, "pattern")
    alphabets = _alphabets(args.alphabets) if args.alphabets else [2] * instance.n
    seeded = None
    if args.seed_responses:
        try:
            entries = json.loads(Path(args.seed_responses).read_text())
            responses = [ObservedResponse.model_validate(entry) for entry in entries]
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read response table {args.seed_responses}: {exc}") from None
        seeded = responses_to_observations(alphabets, responses)
    result = bruteforce_optimal_responses(
        instance, alphabets, pattern, mode=SearchMode(args.mode), seed_responses=seeded, workers=args.workers
    )
    if args.emit_scheme and result.scheme is not None:
        write_document(args.emit_scheme, result.scheme)
    payload = _rational_fields(result.value)
    payload.update({
        "mode": result.mode.value,
        "lp_count": result.lp_count,
        "feasible_count": result.feasible_count,
        "responses": result.response_table(),
        "instance_hash": instance_hash(instance),
        "tool_version": settings.TOOL_VERSION,
    })
    _emit_json(payload, args.output)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    instance = _load_instance(args.instance)
    models: List[Tuple[str, Any]] = [(spec, parse_model_spec(spec, instance.n)) for spec in args.models.split(",")]
    method = EvalMethod.MONTE_CARLO if args.mc is not None else EvalMethod.EXACT
    report = build_report(instance, args.k_range, models, method=method, seed=args.seed, samples=args.mc)
    _emit(report_to_csv(report), args.output)
    return 0


def cmd_verify_bounds(args: argparse.Namespace) -> int:
    report = verify_lower_bound_suite(args.family, args.k, n=args.n)
    for check in report.checks:
        logger.info(f"{check.name}: {format_rational(check.value)} vs {format_rational(check.bound)} holds={check.holds}")
    _emit(lower_bounds_to_csv([report]), args.output)
    return 0 if report.ok else 1


def cmd_reproduce(args: argparse.Namespace) -> int:
    report = reproduce_appendix_c(SearchMode(args.mode))
    lines = []
    for check in report.checks:
        status = "ok" if check.passed else f"MISMATCH (expected {format_rational(check.expected)})"
        lines.append(f"{check.name}: {format_rational(check.value)} (~{approx(check.value)}) {status}")
    lines.append("PASS" if report.ok else "FAIL")
    _emit("\n".join(lines) + "\n", None)
    return 0 if report.ok else 1


def cmd_serve(args: argparse.Namespace) -> int:
    uvicorn.run("app.main:app", host=args.host, port=args.port, reload=args.reload)
    return 0


# === Parser ===


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="leakguard",
        description="Exact leakage-robust persuasion: schemes, checks, LPs and downstream evaluation.",
        epilog=EXIT_CODES,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.TOOL_VERSION}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log at DEBUG level")
    commands = parser.add_subparsers(dest="command", required=True)

    gen = commands.add_parser("gen", help="generate an instance")
    gen.add_argument("family", choices=FAMILIES)
    gen.add_argument("-n", type=int)
    gen.add_argument("-k", type=int)
    gen.add_argument("--epsilon", type=_rational)
    gen.add_argument("--seed", type=int)
    gen.add_argument("--utility", choices=RANDOM_FAMILIES, default="table", help="random family only")
    gen.add_argument("--pad", type=int, default=0, help="append dummy receivers")
    gen.add_argument("-o", "--output")
    gen.set_defaults(handler=cmd_gen)

    build = commands.add_parser("construct", help="build a named scheme")
    build.add_argument("scheme", choices=SCHEME_NAMES)
    build.add_argument("-i", "--instance", required=True)
    build.add_argument("-k", type=int)
    build.add_argument("--gamma", type=_rational)
    build.add_argument("--index", type=int, help="prefix index i for public-prefix and mask-remove")
    build.add_argument("-m", type=int, help="threshold for mask-match")
    build.add_argument("--c0", type=_rational, default=Fraction(1, 2))
    build.add_argument("--c1", type=_rational, default=Fraction(1, 2))
    build.add_argument("--base", help="base scheme file for subsampling")
    build.add_argument("-o", "--output")
    build.set_defaults(handler=cmd_construct)

    check = commands.add_parser("check", help="check persuasiveness (exit 1 on failure)")
    check.add_argument("kind", choices=[kind.value for kind in CheckKind])
    check.add_argument("-i", "--instance", required=True)
    check.add_argument("-s", "--scheme", required=True)
    check.add_argument("-k", type=int)
    check.add_argument("--mode", choices=[mode.value for mode in BestResponseMode], default="standard")
    check.add_argument("-o", "--output")
    check.set_defaults(handler=cmd_check)

    lp = commands.add_parser("solve-lp", help="optimal k-worst-case persuasive utility")
    lp.add_argument("-i", "--instance", required=True)
    lp.add_argument("-k", type=int, required=True)
    lp.add_argument("--emit-scheme", help="write the optimal scheme here")
    lp.add_argument("--export", help="write the LP as text here")
    lp.add_argument("-o", "--output")
    lp.set_defaults(handler=cmd_solve_lp)

    evaluate = commands.add_parser("eval", help="expected downstream utility under a leakage model")
    evaluate.add_argument("-i", "--instance", required=True)
    evaluate.add_argument("-s", "--scheme", required=True)
    evaluate.add_argument("--model", required=True, help="kstar:K | kclique:K | kbroadcast:K | ker:K | fixed:FILE | mix:FILE")
    how = evaluate.add_mutually_exclusive_group()
    how.add_argument("--exact", action="store_true", help="enumerate the model's support (default)")
    how.add_argument("--mc", type=int, metavar="N", help="Monte Carlo with N samples")
    evaluate.add_argument("--seed", type=int)
    evaluate.add_argument("--mode", choices=[mode.value for mode in BestResponseMode], default="standard")
    evaluate.add_argument("-o", "--output")
    evaluate.set_defaults(handler=cmd_eval)

    brute = commands.add_parser("bruteforce", help="best scheme on given alphabets under a fixed pattern")
    brute.add_argument("-i", "--instance", required=True)
    brute.add_argument("--pattern", required=True)
    brute.add_argument("--alphabets", help="comma-separated sizes or symbol strings; binary by default")
    brute.add_argument("--mode", choices=[mode.value for mode in SearchMode], default=SearchMode.PER_INFORMATION_SET.value)
    brute.add_argument("--seed-responses", help="JSON list of responses; solves only that table")
    brute.add_argument("--workers", type=int, help=f"defaults to WORKER_COUNT ({settings.WORKER_COUNT})")
    brute.add_argument("--emit-scheme")
    brute.add_argument("-o", "--output")
    brute.set_defaults(handler=cmd_bruteforce)

    bench = commands.add_parser("bench", help="benchmark report as CSV")
    bench.add_argument("-i", "--instance", required=True)
    bench.add_argument("--k-range", type=_k_range, required=True, help="a..b")
    bench.add_argument("--models", required=True, help="comma-separated model specs")
    bench.add_argument("--mc", type=int, metavar="N", help="Monte Carlo with N samples instead of exact evaluation")
    bench.add_argument("--seed", type=int)
    bench.add_argument("-o", "--output")
    bench.set_defaults(handler=cmd_bench)

    bounds = commands.add_parser("verify-bounds", help="lower-bound suite of a hard family (exit 1 on failure)")
    bounds.add_argument("--family", choices=LOWER_BOUND_FAMILIES, required=True)
    bounds.add_argument("-k", "--k", type=int, required=True)
    bounds.add_argument("-n", type=int)
    bounds.add_argument("-o", "--output")
    bounds.set_defaults(handler=cmd_verify_bounds)

    reproduce = commands.add_parser("reproduce", help="recompute the three-receiver separations")
    reproduce.add_argument("target", choices=["appendix-c"])
    reproduce.add_argument("--mode", choices=[mode.value for mode in SearchMode], default=SearchMode.PER_INFORMATION_SET.value)
    reproduce.set_defaults(handler=cmd_reproduce)

    serve = commands.add_parser("serve", help="start the HTTP API")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--reload", action="store_true")
    serve.set_defaults(handler=cmd_serve)

    return parser


def cli(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand and return its exit code."""
    load_dotenv()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on bad flags and 0 on --help / --version
        return int(exc.code or 0)

    logging.basicConfig(
        level=logging.DEBUG if args.verbose else settings.LOG_LEVEL,
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
    )
    try:
        return args.handler(args)
    except LeakguardError as exc:
        logger.error(f"{type(exc).__name__}: {exc.message}")
        return exc.exit_code
    except ValidationError as exc:
        logger.error(f"invalid document: {exc.errors()[0].get('msg')}")
        return InputError.exit_code


def main() -> None:
    sys.exit(cli())


if __name__ == "__main__":
    main()
