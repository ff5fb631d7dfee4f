from typing import Optional

from pydantic import BaseModel, Field

from app.models.base import Rational
from app.models.instance import Instance
from app.models.scheme import SignalingScheme
from app.schemas.common import LpStatus


class SolveRequest(BaseModel):
    instance: Instance
    k: int = Field(ge=0)
    emit_scheme: bool = False
    export: bool = False  # include the LP text dump


class SolveResponse(BaseModel):
    status: LpStatus
    value: Optional[Rational] = None
    pivots: int
    scheme: Optional[SignalingScheme] = None
    lp: Optional[str] = None
    instance_hash: str
    tool_version: str
