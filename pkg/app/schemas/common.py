"""
Enumerations shared by services, API and CLI.
"""

from enum import Enum


class BestResponseMode(str, Enum):
    """How a receiver turns an observation into an action"""
    STANDARD = "standard"  # m0 <= theta * m1
    EXTERNALITY = "externality"  # right side uses only the all-ones profile


class CheckKind(str, Enum):
    """Persuasiveness notion being checked"""
    PRIVATE = "private"
    KWORST = "kworst"
    PUBLIC = "public"
    TWOSIDED = "twosided"


class SearchMode(str, Enum):
    """Enumeration space of the brute-force scheme search"""
    PER_INFORMATION_SET = "per_information_set"
    PER_PROFILE = "per_profile"


class EvalMethod(str, Enum):
    EXACT = "exact"
    MONTE_CARLO = "monte_carlo"


class LpStatus(str, Enum):
    OPTIMAL = "optimal"
    INFEASIBLE = "infeasible"
    UNBOUNDED = "unbounded"


class Relation(str, Enum):
    LE = "<="
    GE = ">="
    EQ = "="
