from fastapi import APIRouter
import logging

from app.schemas.instance import GenerateRequest, InstanceResponse
from app.services.instance_lab import generate
from app.utils.serialization import instance_hash

logger = logging.getLogger("app.api.instances")

router = APIRouter(prefix="/instances", tags=["instances"])


@router.post("/generate", response_model=InstanceResponse)
async def generate_instance(request: GenerateRequest):
    """Generate an instance from a named family"""
    instance = generate(
        request.family,
        n=request.n,
        k=request.k,
        epsilon=request.epsilon,
        seed=request.seed,
        utility=request.utility,
        pad=request.pad,
    )
    digest = instance_hash(instance)
    logger.info(f"Generated {request.family} instance {digest[:12]}")
    return InstanceResponse(instance=instance, instance_hash=digest)
