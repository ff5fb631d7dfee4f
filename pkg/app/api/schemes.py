from fastapi import APIRouter
import logging

from app.models.scheme import SignalingScheme
from app.schemas.scheme import CheckRequest, ConstructRequest
from app.schemas.verdict import Verdict
from app.services.constructors import construct
from app.services.persuasiveness import first_failure, run_check

logger = logging.getLogger("app.api.schemes")

router = APIRouter(prefix="/schemes", tags=["schemes"])


@router.post("/construct", response_model=SignalingScheme)
async def construct_scheme(request: ConstructRequest):
    """Build a named scheme for the given instance"""
    logger.info(f"Constructing {request.scheme} for n={request.instance.n}")
    return construct(
        request.scheme,
        request.instance,
        base=request.base,
        k=request.k,
        gamma=request.gamma,
        i=request.i,
        m=request.m,
        c0=request.c0,
        c1=request.c1,
    )


@router.post("/check", response_model=Verdict)
async def check_scheme(request: CheckRequest):
    """Run one persuasiveness check; a failing check is a normal 200 verdict"""
    verdict = run_check(request.check, request.instance, request.scheme, k=request.k, mode=request.mode)
    logger.info(f"Check {request.check.value} k={request.k}: ok={verdict.ok}")
    violation = first_failure(verdict)
    if violation is not None:
        logger.warning(f"Check {request.check.value} failed: {violation}")
    return verdict
