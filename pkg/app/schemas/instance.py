from typing import Optional

from pydantic import BaseModel, Field

from app.models.base import Rational
from app.models.instance import Instance


class GenerateRequest(BaseModel):
    family: str
    n: Optional[int] = Field(default=None, ge=1)
    k: Optional[int] = None
    epsilon: Optional[Rational] = None
    seed: Optional[int] = None  # random family only
    utility: str = "table"  # random family only
    pad: int = Field(default=0, ge=0)


class InstanceResponse(BaseModel):
    instance: Instance
    instance_hash: str
