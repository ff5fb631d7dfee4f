from fastapi import APIRouter
import logging

from app.schemas.evaluation import BruteForceRequest, BruteForceResult
from app.services.bruteforce import bruteforce_optimal_responses, responses_to_observations

logger = logging.getLogger("app.api.bruteforce")

router = APIRouter(prefix="/bruteforce", tags=["brute force"])


@router.post("", response_model=BruteForceResult)
async def run_bruteforce(request: BruteForceRequest):
    """Best scheme on the given alphabets under a fixed pattern; 413 past the search caps"""
    seeded = None
    if request.seed_responses is not None:
        seeded = responses_to_observations(request.alphabets, request.seed_responses)
    logger.info(f"Brute force n={request.instance.n}, {len(request.pattern.edges)} edges, mode={request.mode.value}")
    return bruteforce_optimal_responses(
        request.instance,
        request.alphabets,
        request.pattern,
        mode=request.mode,
        seed_responses=seeded,
    )
