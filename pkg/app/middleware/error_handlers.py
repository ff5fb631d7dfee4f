"""
Error handling middleware for the FastAPI application.

Every error body has the same shape as LeakguardError.to_dict(): a "detail"
message, the "error" class name and the HTTP "status_code". Validation
failures additionally name the first violated invariant.
"""

import logging
import re
import traceback
from typing import Any, Dict, Sequence

from fastapi import FastAPI, Request, status
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import ValidationError
from starlette.exceptions import HTTPException as StarletteHTTPException

from app.core.errors import LeakguardError

logger = logging.getLogger("app.errors")

_MESSAGE_PREFIX = re.compile(r"^(Value|Assertion) error, ")


def _body(status_code: int, error: str, detail: str, **extra: Any) -> JSONResponse:
    content = {"detail": detail, "error": error, "status_code": status_code}
    content.update(extra)
    return JSONResponse(status_code=status_code, content=content)


def _invariant_body(errors: Sequence[Dict[str, Any]]) -> JSONResponse:
    # ctx may hold the raised exception object, which is not JSON-serializable
    plain = [
        {"loc": [str(part) for part in error.get("loc", ())], "msg": _MESSAGE_PREFIX.sub("", str(error.get("msg", "")))}
        for error in errors
    ]
    invariant = plain[0]["msg"] if plain else "invalid document"
    logger.warning(f"Invariant violation: {invariant} ({len(plain)} error(s))")
    return _body(
        status.HTTP_422_UNPROCESSABLE_ENTITY,
        "InvariantViolation",
        invariant,
        invariant=invariant,
        errors=plain,
    )


async def validation_exception_handler(request: Request, exc: RequestValidationError):
    """Request bodies that fail model validation, e.g. theta not descending."""
    return _invariant_body(exc.errors())


async def pydantic_validation_exception_handler(request: Request, exc: ValidationError):
    """Documents built inside a route that fail validation."""
    return _invariant_body(exc.errors())


async def http_exception_handler(request: Request, exc: StarletteHTTPException):
    logger.warning(f"HTTP {exc.status_code} on {request.url.path}: {exc.detail}")
    return _body(exc.status_code, "HTTPException", str(exc.detail))


async def leakguard_exception_handler(request: Request, exc: LeakguardError):
    """
    Domain errors carry their own status: 422 for input problems, 413 for
    size refusals, 500 for failed self-checks.
    """
    log = logger.error if exc.status_code >= 500 else logger.warning
    log(f"{type(exc).__name__} on {request.url.path}: {exc.message}")
    content = exc.to_dict()
    content["status_code"] = exc.status_code
    return JSONResponse(status_code=exc.status_code, content=content)


async def general_exception_handler(request: Request, exc: Exception):
    logger.error(f"Unhandled exception on {request.url.path}: {exc}\n{traceback.format_exc()}")
    return _body(status.HTTP_500_INTERNAL_SERVER_ERROR, "InternalError", "An unexpected error occurred.")


def register_exception_handlers(app: FastAPI) -> None:
    app.add_exception_handler(RequestValidationError, validation_exception_handler)
    app.add_exception_handler(StarletteHTTPException, http_exception_handler)
    app.add_exception_handler(ValidationError, pydantic_validation_exception_handler)
    app.add_exception_handler(LeakguardError, leakguard_exception_handler)
    app.add_exception_handler(Exception, general_exception_handler)
