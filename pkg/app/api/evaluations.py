from fractions import Fraction
from typing import Union

from fastapi import APIRouter
import logging

from app.schemas.evaluation import EvaluationRequest, ExactValue, MonteCarloEstimate
from app.services.downstream import downstream_utility_model

logger = logging.getLogger("app.api.evaluations")

router = APIRouter(prefix="/evaluations", tags=["evaluations"])


@router.post("", response_model=Union[ExactValue, MonteCarloEstimate])
async def evaluate_scheme(request: EvaluationRequest):
    """
    Expected downstream utility of a scheme under a leakage model.
    Exact results come back as {"value"}, Monte Carlo as {"mean", "stderr", ...}.
    """
    result = downstream_utility_model(
        request.instance,
        request.scheme,
        request.model,
        method=request.method,
        samples=request.samples,
        seed=request.seed,
        mode=request.mode,
    )
    if isinstance(result, Fraction):
        return ExactValue(value=result)
    return result
