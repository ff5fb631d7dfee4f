"""
Evaluation and brute-force result documents.
"""

from typing import Dict, List, Optional, Union

from pydantic import BaseModel, Field

from app.models.base import Rational
from app.models.instance import Instance
from app.models.leakage import LeakageModel, LeakagePattern
from app.models.scheme import SignalingScheme
from app.schemas.common import BestResponseMode, EvalMethod, SearchMode


class MonteCarloEstimate(BaseModel):
    """Sample mean of the downstream utility, exact over the drawn patterns"""
    mean: Rational
    stderr: float
    samples: int
    seed: int


class ExactValue(BaseModel):
    value: Rational


class ObservedResponse(BaseModel):
    """One entry of a response table, receivers 1-based, symbols by name"""
    receiver: int
    own: str
    leaked: List[List] = []  # [sender, symbol]
    action: int = Field(ge=0, le=1)


class BruteForceResult(BaseModel):
    value: Rational
    scheme: Optional[SignalingScheme] = None
    responses: List[ObservedResponse] = []
    lp_count: int = 0
    feasible_count: int = 0
    mode: SearchMode

    def response_table(self) -> Dict[str, int]:
        """Compact "receiver:own|sender=symbol,..." -> action view for logs and reports."""
        table = {}
        for entry in self.responses:
            leaks = ",".join(f"{sender}={symbol}" for sender, symbol in entry.leaked)
            table[f"{entry.receiver}:{entry.own}|{leaks}"] = entry.action
        return table


class EvaluationRequest(BaseModel):
    instance: Instance
    scheme: SignalingScheme
    model: LeakageModel
    method: EvalMethod = EvalMethod.EXACT
    samples: Optional[int] = None
    seed: Optional[int] = None
    mode: BestResponseMode = BestResponseMode.STANDARD


class BruteForceRequest(BaseModel):
    instance: Instance
    alphabets: List[Union[int, List[str]]]
    pattern: LeakagePattern
    mode: SearchMode = SearchMode.PER_INFORMATION_SET
    seed_responses: Optional[List[ObservedResponse]] = None
