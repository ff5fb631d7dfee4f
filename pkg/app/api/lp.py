from fastapi import APIRouter
import logging

from app.core.config import settings
from app.schemas.common import LpStatus
from app.schemas.lp import SolveRequest, SolveResponse
from app.services.lp_builders import build_persuasive_lp, scheme_from_solution
from app.services.simplex import export_lp, solve
from app.utils.serialization import instance_hash

logger = logging.getLogger("app.api.lp")

router = APIRouter(prefix="/lp", tags=["linear programs"])


@router.post("/solve", response_model=SolveResponse)
async def solve_persuasion_lp(request: SolveRequest):
    """Solve the k-worst-case persuasion LP exactly (k = 0 private, k = n-1 public)"""
    lp = build_persuasive_lp(request.instance, request.k)
    solution = solve(lp)
    logger.info(f"Solved persuasion LP n={request.instance.n} k={request.k}: {solution.status.value}")
    scheme = None
    if request.emit_scheme and solution.status == LpStatus.OPTIMAL:
        scheme = scheme_from_solution(request.instance, solution)
    return SolveResponse(
        status=solution.status,
        value=solution.value,
        pivots=solution.pivots,
        scheme=scheme,
        lp=export_lp(lp) if request.export else None,
        instance_hash=instance_hash(request.instance),
        tool_version=settings.TOOL_VERSION,
    )
