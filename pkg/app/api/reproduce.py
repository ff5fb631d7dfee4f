from fastapi import APIRouter
import logging

from app.models.report import ReproductionReport
from app.schemas.common import SearchMode
from app.services.reproduction import reproduce_appendix_c

logger = logging.getLogger("app.api.reproduce")

router = APIRouter(prefix="/reproduce", tags=["reproduction"])


@router.get("/appendix-c", response_model=ReproductionReport)
async def reproduce_three_receiver_separations(mode: SearchMode = SearchMode.PER_INFORMATION_SET):
    """Recompute the three-receiver separation values and compare them exactly"""
    report = reproduce_appendix_c(mode)
    logger.info(f"Reproduction checks passed: {report.ok}")
    return report
