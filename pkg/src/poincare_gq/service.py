"""HTTP service exposing the classifier, the synthesizer and the verification suites.

Failures are answered with an :class:`~poincare_gq.schemas.ErrorOut` body
whose ``exit_code`` is the code the command line exits with.

Run with ``python -m poincare_gq.service [--host H] [--port P]``.
"""
from __future__ import annotations

import argparse

from fastapi import FastAPI, Request
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse

from . import __version__, app as ops
from .schemas import ClassifyOut, CoFormIn, ErrorOut, FieldOut, InvariantsOut, RunConfig, VerifyOut
from .suites import SUITES

HTTP_STATUS = {ops.EXIT_PARSE: 422, ops.EXIT_DEGENERATE: 422, ops.EXIT_QUADRATURE: 500}

api = FastAPI(title="poincare-gq", version=__version__)


def _error(code: int, exc: BaseException) -> JSONResponse:
    body = ErrorOut(exit_code=code, error=type(exc).__name__, detail=str(exc))
    status = 404 if code == ops.EXIT_PARSE and isinstance(exc, ops.UnknownSuiteError) else HTTP_STATUS[code]
    return JSONResponse(status_code=status, content=body.model_dump())


@api.exception_handler(RequestValidationError)
async def _bad_request(request: Request, exc: RequestValidationError) -> JSONResponse:
    return _error(ops.EXIT_PARSE, exc)


async def _library_error(request: Request, exc: Exception) -> JSONResponse:
    return _error(ops.exit_code_for(exc), exc)


for _cls in ops.KNOWN_ERRORS:
    api.add_exception_handler(_cls, _library_error)


@api.get("/health")
def health() -> dict:
    return {"status": "ok", "version": __version__}


@api.get("/suites")
def suites() -> list[str]:
    return sorted(SUITES)


@api.post("/classify", response_model=ClassifyOut)
def classify(form: CoFormIn) -> ClassifyOut:
    return ops.classify_form(form)


@api.post("/invariants", response_model=InvariantsOut)
def invariants(form: CoFormIn) -> InvariantsOut:
    return ops.invariants(form)


@api.post("/synthesize", response_model=FieldOut)
def synthesize(cfg: RunConfig) -> FieldOut:
    return ops.field_out(ops.synthesize_field(cfg))


@api.post("/verify/{suite}", response_model=VerifyOut)
def verify(suite: str, seed: int = 0) -> VerifyOut:
    return ops.verify(suite, seed)


def main(argv: list[str] | None = None) -> None:
    import uvicorn

    parser = argparse.ArgumentParser(prog="python -m poincare_gq.service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=8000)
    args = parser.parse_args(argv)
    uvicorn.run(api, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
