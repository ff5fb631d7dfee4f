"""
Canonical JSON documents.

Every document kind is a pydantic model; loading translates validation
failures into InvariantViolation naming the first broken invariant.
"""

import hashlib
import json
import re
from pathlib import Path
from typing import Any, Dict, Union

from pydantic import BaseModel, TypeAdapter, ValidationError

from app.core.errors import InputError, InvariantViolation
from app.models.instance import Instance
from app.models.leakage import (
    FiniteMixture,
    FixedModel,
    KBroadcast,
    KClique,
    KErdosRenyi,
    KStar,
    LeakageModel,
    LeakagePattern,
    MixtureComponent,
    Observation,
)
from app.models.report import BenchmarkReport
from app.models.scheme import PrefixScheme, SignalingScheme

DOCUMENT_KINDS: Dict[str, Any] = {
    "instance": TypeAdapter(Instance),
    "scheme": TypeAdapter(SignalingScheme),
    "prefix_scheme": TypeAdapter(PrefixScheme),
    "pattern": TypeAdapter(LeakagePattern),
    "model": TypeAdapter(LeakageModel),
    "mixture": TypeAdapter(FiniteMixture),
    "observation": TypeAdapter(Observation),
    "benchmark_report": TypeAdapter(BenchmarkReport),
}

_PARAMETRIC = {"kstar": KStar, "kclique": KClique, "kbroadcast": KBroadcast, "ker": KErdosRenyi}
_PREFIX_RE = re.compile(r"^(Value|Assertion) error, ")


def _first_error(exc: ValidationError) -> str:
    error = exc.errors()[0]
    message = _PREFIX_RE.sub("", str(error.get("msg", "invalid document")))
    location = ".".join(str(part) for part in error.get("loc", ()))
    return message if not location else f"{message} (at {location})"


def _invariant_of(exc: ValidationError) -> InvariantViolation:
    error = exc.errors()[0]
    invariant = _PREFIX_RE.sub("", str(error.get("msg", "invalid document")))
    return InvariantViolation(invariant, _first_error(exc))


def validate(kind: str, data: Any) -> Any:
    """Validate a decoded JSON value as a document of the given kind."""
    adapter = DOCUMENT_KINDS.get(kind)
    if adapter is None:
        raise InputError(f"unknown document kind {kind!r}")
    try:
        return adapter.validate_python(data)
    except ValidationError as exc:
        raise _invariant_of(exc) from None


def loads(kind: str, text: str) -> Any:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"malformed JSON: {exc.msg} at line {exc.lineno}") from None
    return validate(kind, data)


def dumps(document: BaseModel) -> str:
    return document.model_dump_json(by_alias=True, indent=2)


def canonical_json(document: BaseModel) -> str:
    return json.dumps(document.model_dump(mode="json", by_alias=True), sort_keys=True, separators=(",", ":"))


def instance_hash(instance: Instance) -> str:
    """sha256 hex digest of the instance's canonical JSON."""
    return hashlib.sha256(canonical_json(instance).encode("utf-8")).hexdigest()


def read_document(path: Union[str, Path], kind: str) -> Any:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None
    return loads(kind, text)


def write_document(path: Union[str, Path], document: BaseModel) -> None:
    Path(path).write_text(dumps(document) + "\n")


def _mixture_from(data: Any) -> FiniteMixture:
    # a bare list holds [weight, pattern] pairs or {"weight", "pattern"} objects
    if isinstance(data, list):
        components = []
        for entry in data:
            if isinstance(entry, (list, tuple)) and len(entry) == 2:
                components.append({"weight": entry[0], "pattern": entry[1]})
            else:
                components.append(entry)
        data = {"components": components}
    if not isinstance(data, dict):
        raise InputError("mixture document must be a list or an object with components")
    try:
        return FiniteMixture(components=tuple(
            MixtureComponent.model_validate(component) for component in data.get("components", ())
        ))
    except ValidationError as exc:
        raise _invariant_of(exc) from None


def parse_model_spec(spec: str, n: int) -> LeakageModel:
    """
    kstar:K | kclique:K | kbroadcast:K | ker:K | fixed:FILE | mix:FILE

    Raises:
        InputError: unknown family, non-integer K or unreadable file
        InvariantViolation: parameters or file contents break a model invariant
    """
    family, separator, argument = spec.partition(":")
    if not separator or not argument:
        raise InputError(f"model spec {spec!r} is not of the form family:argument")
    if family in _PARAMETRIC:
        try:
            k = int(argument)
        except ValueError:
            raise InputError(f"model spec {spec!r}: K must be an integer") from None
        try:
            return _PARAMETRIC[family](n=n, k=k)
        except ValidationError as exc:
            raise _invariant_of(exc) from None
    if family == "fixed":
        return FixedModel(pattern=read_document(argument, "pattern"))
    if family == "mix":
        path = Path(argument)
        try:
            data = json.loads(path.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read mixture {path}: {exc}") from None
        return _mixture_from(data)
    raise InputError(f"unknown model family {family!r}; expected kstar, kclique, kbroadcast, ker, fixed or mix")
