"""
Benchmark reports: the four optimal utilities and the robustness prices
of one instance across leakage sizes and models.
"""

import csv
import io
import logging
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from app.core.config import settings
from app.core.errors import InternalError, SizeLimitError
from app.models.instance import Instance
from app.models.leakage import FixedModel, LeakageModel
from app.models.report import BenchmarkReport, BenchmarkRow, Bound, LowerBoundReport
from app.models.scheme import SignalingScheme
from app.schemas.common import EvalMethod, LpStatus, SearchMode
from app.schemas.evaluation import MonteCarloEstimate
from app.services.bruteforce import bruteforce_optimal_responses, search_space_size
from app.services.constructors import full_information
from app.services.downstream import PatternEvaluator, exact_model_utility, monte_carlo_utility
from app.services.instance_lab import prefix_sweep
from app.services.lp_builders import ResponseLpTemplate, build_persuasive_lp, scheme_from_solution
from app.services.simplex import solve
from app.utils.profiles import BINARY_ALPHABET
from app.utils.rationals import describe, format_rational
from app.utils.serialization import instance_hash

logger = logging.getLogger(__name__)

CSV_COLUMNS = (
    "instance_id", "n", "k", "model", "opt_private", "opt_persuasive_k", "opt_public",
    "opt_expected", "powr_k", "podr", "method", "seed", "tool_version", "instance_hash",
)
BOUNDS_COLUMNS = (
    "instance", "k", "opt_private", "opt_persuasive_k", "opt_public", "powr_k", "checks_ok", "tool_version",
)


class _OptCache:
    """LP optima and optimal schemes per k, solved once per report."""

    def __init__(self, instance: Instance):
        self.instance = instance
        self._values: Dict[int, Tuple[Fraction, SignalingScheme]] = {}

    def get(self, k: int) -> Tuple[Fraction, SignalingScheme]:
        if k not in self._values:
            solution = solve(build_persuasive_lp(self.instance, k))
            if solution.status != LpStatus.OPTIMAL:
                raise InternalError(f"persuasion LP at k={k} is {solution.status.value}")
            self._values[k] = (solution.value, scheme_from_solution(self.instance, solution))
        return self._values[k]


def _bruteforce_scale(instance: Instance, model: LeakageModel) -> bool:
    if not isinstance(model, FixedModel):
        return False
    template = ResponseLpTemplate(instance, (BINARY_ALPHABET,) * instance.n, model.pattern)
    return search_space_size(template, SearchMode.PER_INFORMATION_SET) <= settings.BRUTEFORCE_INFOSET_CAP


def _candidate_value(
    instance: Instance,
    scheme: SignalingScheme,
    model: LeakageModel,
    method: EvalMethod,
    samples: int,
    seed: int,
) -> Fraction:
    evaluator = PatternEvaluator(instance, scheme)
    if method == EvalMethod.EXACT:
        return exact_model_utility(evaluator, model)
    estimate: MonteCarloEstimate = monte_carlo_utility(evaluator, model, samples, seed)
    return estimate.mean


def expected_bound(
    instance: Instance,
    model: LeakageModel,
    k: int,
    opts: _OptCache,
    method: EvalMethod,
    samples: int,
    seed: int,
) -> Tuple[Bound, str]:
    """OPT_expected as an exact value (brute force) or an interval."""
    opt_private = opts.get(0)[0]
    if _bruteforce_scale(instance, model):
        try:
            result = bruteforce_optimal_responses(instance, (BINARY_ALPHABET,) * instance.n, model.pattern)
            return Bound.exact(result.value), "bruteforce"
        except SizeLimitError as exc:
            logger.warning(f"brute force skipped: {exc.message}")

    candidates: List[Tuple[str, SignalingScheme]] = [
        (f"lp_k{k}", opts.get(k)[1]),
        ("full_information", full_information(instance)),
    ]
    candidates += [(name, prefix.to_scheme()) for name, prefix in prefix_sweep(instance, max(k, 1))]
    best: Optional[Fraction] = None
    for name, scheme in candidates:
        value = _candidate_value(instance, scheme, model, method, samples, seed)
        logger.debug(f"candidate {name}: {describe(value)}")
        if best is None or value > best:
            best = value
    return Bound(low=best, high=opt_private), method.value


def _ratio_bound(numerator: Fraction, bound: Bound) -> Optional[Bound]:
    if bound.low <= 0:
        return None
    return Bound(low=numerator / bound.high, high=numerator / bound.low)


def build_report(
    instance: Instance,
    k_values: Iterable[int],
    models: Sequence[Tuple[str, LeakageModel]],
    method: EvalMethod = EvalMethod.EXACT,
    seed: Optional[int] = None,
    samples: Optional[int] = None,
) -> BenchmarkReport:
    """
    One row per (k, model): the private, k-persuasive and public optima
    from the LP, the expected-robust optimum and both robustness prices.

    The ordering private >= expected >= k-persuasive >= public is checked
    when the model's maximum in-degree is at most k.
    """
    seed = settings.DEFAULT_SEED if seed is None else seed
    samples = settings.DEFAULT_MC_SAMPLES if samples is None else samples
    digest = instance_hash(instance)
    opts = _OptCache(instance)
    opt_private = opts.get(0)[0]
    opt_public = opts.get(instance.n - 1)[0]
    rows: List[BenchmarkRow] = []

    for k in k_values:
        opt_k = opts.get(k)[0]
        for label, model in models:
            expected, row_method = expected_bound(instance, model, k, opts, method, samples, seed)
            consistent: Optional[bool] = None
            if model.max_in_degree() <= k:
                consistent = opt_private >= expected.high and expected.low >= opt_k >= opt_public
            else:
                logger.warning(
                    f"ordering not checked for {label} at k={k}: max in-degree {model.max_in_degree()} exceeds k"
                )
            row = BenchmarkRow(
                instance_id=digest[:12],
                n=instance.n,
                k=k,
                model=label,
                opt_private=opt_private,
                opt_persuasive_k=opt_k,
                opt_public=opt_public,
                opt_expected=expected,
                powr_k=opt_private / opt_k if opt_k else None,
                podr=_ratio_bound(opt_private, expected),
                consistent=consistent,
                method=row_method,
                seed=seed,
            )
            logger.info(f"benchmark row k={k} model={label}: expected {expected}, consistent={consistent}")
            rows.append(row)

    return BenchmarkReport(
        tool_version=settings.TOOL_VERSION,
        instance_hash=digest,
        seed=seed,
        samples=samples if method == EvalMethod.MONTE_CARLO else None,
        method=method.value,
        rows=rows,
    )


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, Fraction):
        return format_rational(value)
    return str(value)


def report_to_csv(report: BenchmarkReport) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for row in report.rows:
        record = {column: _cell(getattr(row, column)) for column in CSV_COLUMNS[:12]}
        record["tool_version"] = report.tool_version
        record["instance_hash"] = report.instance_hash
        writer.writerow(record)
    return buffer.getvalue()


def lower_bounds_to_csv(reports: Sequence[LowerBoundReport]) -> str:
    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=BOUNDS_COLUMNS, lineterminator="\n")
    writer.writeheader()
    for report in reports:
        writer.writerow({
            "instance": report.instance_id,
            "k": report.k,
            "opt_private": format_rational(report.opt_private),
            "opt_persuasive_k": format_rational(report.opt_persuasive_k),
            "opt_public": format_rational(report.opt_public),
            "powr_k": _cell(report.powr_k),
            "checks_ok": str(report.ok).lower(),
            "tool_version": settings.TOOL_VERSION,
        })
    return buffer.getvalue()
