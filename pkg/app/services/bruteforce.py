"""
Brute-force search for the best (possibly indirect) scheme under a fixed
leakage pattern.

Every candidate response table turns into one best-response-constrained LP;
the optimum over all tables is the best utility reachable on the given
alphabets. Two enumeration spaces are supported:

- per_information_set: one response function per receiver, mapping each of
  its reachable observations to an action. Receiver 1 is the most
  significant digit; inside a receiver's digit the bits run over its sorted
  observations, most significant first.
- per_profile: one action mask per signal profile, profile 1 most
  significant. Exponentially larger; kept as a cross-check.

Ties on the optimal value go to the lowest enumeration index, so results do
not depend on the worker count.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from app.core.config import settings
from app.core.errors import InputError, InternalError, SizeLimitError
from app.models.instance import Instance
from app.models.leakage import LeakagePattern, Observation
from app.models.scheme import SignalingScheme, normalize_alphabet
from app.schemas.common import BestResponseMode, LpStatus, SearchMode
from app.schemas.evaluation import BruteForceResult, ObservedResponse
from app.services.best_response import ResponseOracle
from app.services.lp_builders import ObservationKey, ResponseLpTemplate, observation_key
from app.services.simplex import solve
from app.utils.rationals import describe

logger = logging.getLogger(__name__)

# (best value or None, its index, LPs solved, feasible LPs)
_ChunkResult = Tuple[Optional[Fraction], int, int, int]


def _information_set_digits(template: ResponseLpTemplate) -> List[List[ObservationKey]]:
    return [template.observations_of(receiver) for receiver in range(template.instance.n)]


def search_space_size(template: ResponseLpTemplate, mode: SearchMode) -> int:
    if mode == SearchMode.PER_INFORMATION_SET:
        total = 1
        for observations in _information_set_digits(template):
            total *= 2 ** len(observations)
        return total
    return (2 ** template.instance.n) ** template.size


def decode_information_sets(template: ResponseLpTemplate, index: int) -> Dict[ObservationKey, int]:
    """Response table number `index` of the per-information-set enumeration."""
    table: Dict[ObservationKey, int] = {}
    for observations in reversed(_information_set_digits(template)):
        width = len(observations)
        digit = index % (1 << width)
        index >>= width
        for position, key in enumerate(observations):
            table[key] = (digit >> (width - 1 - position)) & 1
    return table


def decode_profile_actions(template: ResponseLpTemplate, index: int) -> List[int]:
    """Action masks number `index` of the per-profile enumeration."""
    base = 1 << template.instance.n
    actions = [0] * template.size
    for position in reversed(range(template.size)):
        index, actions[position] = divmod(index, base)
    return actions


def _program(template: ResponseLpTemplate, mode: SearchMode, index: int):
    if mode == SearchMode.PER_INFORMATION_SET:
        return template.build(decode_information_sets(template, index))
    return template.build_per_profile(decode_profile_actions(template, index))


def _search_chunk(
    instance: Instance, alphabets: Tuple, pattern: LeakagePattern, mode: SearchMode, start: int, stop: int
) -> _ChunkResult:
    template = ResponseLpTemplate(instance, alphabets, pattern)
    best: Optional[Fraction] = None
    best_index = -1
    feasible = 0
    for index in range(start, stop):
        solution = solve(_program(template, mode, index))
        if solution.status != LpStatus.OPTIMAL:
            continue
        feasible += 1
        if best is None or solution.value > best:
            best, best_index = solution.value, index
    return best, best_index, stop - start, feasible


def _chunks(total: int, workers: int) -> List[Tuple[int, int]]:
    count = min(total, max(1, workers * 4))
    step = -(-total // count)
    return [(start, min(start + step, total)) for start in range(0, total, step)]


def _reduce(results: Sequence[_ChunkResult]) -> _ChunkResult:
    best: Optional[Fraction] = None
    best_index = -1
    solved = feasible = 0
    for value, index, count, ok in results:
        solved += count
        feasible += ok
        if value is None:
            continue
        if best is None or value > best or (value == best and index < best_index):
            best, best_index = value, index
    return best, best_index, solved, feasible


def _responses_of(template: ResponseLpTemplate, table: Mapping[ObservationKey, int]) -> List[ObservedResponse]:
    entries = []
    for key in template.observation_keys:
        receiver, own, leaks = key
        entries.append(ObservedResponse(
            receiver=receiver + 1,
            own=template.alphabets[receiver][own],
            leaked=[[j + 1, template.alphabets[j][v]] for j, v in leaks],
            action=table[key],
        ))
    return entries


def _table_of_profile_actions(template: ResponseLpTemplate, actions: Sequence[int], scheme: SignalingScheme) -> Dict[ObservationKey, int]:
    # report the action the winning scheme's support prescribes; unused observations keep the first seen
    table: Dict[ObservationKey, int] = {}
    support = set(scheme.mu0) | set(scheme.mu1)
    for position, keys in enumerate(template.keys):
        in_support = template.profiles[position] in support
        for key in keys:
            action = (actions[position] >> key[0]) & 1
            if key not in table or in_support:
                table[key] = action
    return table


def bruteforce_optimal_responses(
    instance: Instance,
    alphabets: Sequence,
    pattern: LeakagePattern,
    mode: SearchMode = SearchMode.PER_INFORMATION_SET,
    seed_responses: Optional[Mapping[Observation, int]] = None,
    workers: Optional[int] = None,
) -> BruteForceResult:
    """
    Best utility over schemes on the given alphabets under a fixed pattern.

    With `seed_responses` only the LP of that response table is solved.

    Raises:
        SizeLimitError: more candidate tables than the mode's cap
        InputError: seeded responses that no scheme supports
        InternalError: no candidate table is feasible
    """
    template = ResponseLpTemplate(instance, alphabets, pattern)

    if seed_responses is not None:
        table = {observation_key(observation): action for observation, action in seed_responses.items()}
        solution = solve(template.build(table))
        if solution.status != LpStatus.OPTIMAL:
            raise InputError(f"seeded responses are {solution.status.value}")
        logger.info(f"seeded response table solved: {describe(solution.value)}")
        return BruteForceResult(
            value=solution.value,
            scheme=template.scheme_of(solution),
            responses=_responses_of(template, table),
            lp_count=1,
            feasible_count=1,
            mode=mode,
        )

    total = search_space_size(template, mode)
    cap = settings.BRUTEFORCE_INFOSET_CAP if mode == SearchMode.PER_INFORMATION_SET else settings.BRUTEFORCE_PROFILE_CAP
    if total > cap:
        logger.warning(f"brute force refused: {total} candidate tables in {mode.value} mode")
        raise SizeLimitError(f"{mode.value} response tables", total, cap)

    workers = settings.WORKER_COUNT if workers is None else workers
    logger.info(f"brute force over {total} response tables ({mode.value}, {workers} workers)")
    arguments = (instance, template.alphabets, pattern, mode)
    if workers <= 1:
        results = [_search_chunk(*arguments, 0, total)]
    else:
        chunks = _chunks(total, workers)
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_search_chunk, *arguments, start, stop) for start, stop in chunks]
            results = [future.result() for future in futures]

    best, best_index, solved, feasible = _reduce(results)
    if best is None:
        raise InternalError("no response table admits a scheme")

    solution = solve(_program(template, mode, best_index))
    scheme = template.scheme_of(solution)
    if mode == SearchMode.PER_INFORMATION_SET:
        table = decode_information_sets(template, best_index)
    else:
        table = _table_of_profile_actions(template, decode_profile_actions(template, best_index), scheme)
    logger.info(f"brute force optimum {describe(best)} at table {best_index}; {feasible}/{solved} LPs feasible")
    return BruteForceResult(
        value=best,
        scheme=scheme,
        responses=_responses_of(template, table),
        lp_count=solved,
        feasible_count=feasible,
        mode=mode,
    )


def scheme_responses(
    instance: Instance,
    scheme: SignalingScheme,
    pattern: LeakagePattern,
    mode: BestResponseMode = BestResponseMode.STANDARD,
) -> Dict[Observation, int]:
    """Best response of every reachable observation under the scheme's own posteriors."""
    template = ResponseLpTemplate(instance, scheme.alphabets, pattern)
    oracle = ResponseOracle(instance, scheme, mode)
    return {
        template.to_observation(key): oracle.respond(key[0], key[1], key[2])
        for key in template.observation_keys
    }


def responses_to_observations(alphabets: Sequence, responses: Sequence[ObservedResponse]) -> Dict[Observation, int]:
    """Translate a named response table back to index-based observations."""
    names = [normalize_alphabet(entry) for entry in alphabets]

    def index_of(receiver: int, symbol) -> int:
        if not 1 <= receiver <= len(names):
            raise InputError(f"receiver {receiver} outside 1..{len(names)}")
        try:
            return names[receiver - 1].index(str(symbol))
        except ValueError:
            raise InputError(f"symbol {symbol!r} not in receiver {receiver}'s alphabet") from None

    table: Dict[Observation, int] = {}
    for entry in responses:
        leaked = []
        for pair in entry.leaked:
            if len(pair) != 2:
                raise InputError("leaked entries must be [sender, symbol] pairs")
            leaked.append((int(pair[0]), index_of(int(pair[0]), pair[1])))
        observation = Observation(receiver=entry.receiver, own=index_of(entry.receiver, entry.own), leaked=leaked)
        table[observation] = entry.action
    return table
