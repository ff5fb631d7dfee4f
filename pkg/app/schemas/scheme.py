from fractions import Fraction
from typing import Optional

from pydantic import BaseModel

from app.models.base import Rational
from app.models.instance import Instance
from app.models.scheme import SignalingScheme
from app.schemas.common import BestResponseMode, CheckKind


class ConstructRequest(BaseModel):
    instance: Instance
    scheme: str
    base: Optional[SignalingScheme] = None
    k: Optional[int] = None
    gamma: Optional[Rational] = None
    i: Optional[int] = None
    m: Optional[int] = None
    c0: Rational = Fraction(1, 2)
    c1: Rational = Fraction(1, 2)


class CheckRequest(BaseModel):
    instance: Instance
    scheme: SignalingScheme
    check: CheckKind
    k: Optional[int] = None
    mode: BestResponseMode = BestResponseMode.STANDARD
