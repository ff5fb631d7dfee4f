from fractions import Fraction
from typing import Annotated

from pydantic import BaseModel, ConfigDict, PlainSerializer, PlainValidator, WithJsonSchema

from app.utils.rationals import format_rational, parse_rational

# Exact rational field: accepts Fraction, int or "p/q"; dumps as "p/q".
Rational = Annotated[
    Fraction,
    PlainValidator(parse_rational),
    PlainSerializer(format_rational, return_type=str),
    WithJsonSchema({"type": "string", "pattern": r"^-?\d+(/\d+)?$"}),
]


class FrozenModel(BaseModel):
    """Base model for immutable domain objects"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True, populate_by_name=True)
