"""Operations behind the HTTP service and the command line.

Every function takes and returns pydantic models so that both front-ends
share one code path.  :func:`exit_code_for` maps library exceptions onto the
documented process exit codes.
"""
from __future__ import annotations

import json

import numpy as np
import pydantic

from .fields import WaveField
from .massive import SingularConfigurationError
from .orbits import DegenerateInputError, MissingParameterError, canonical_rep, classify
from .pipeline import synthesize
from .quadrature import DomainError, QuadratureError
from .schemas import (
    ClassifyOut,
    CoFormIn,
    FieldOut,
    InvariantsOut,
    RunConfig,
    VerifyOut,
    from_matrix,
    to_matrix,
)
from .spinor import CoForm, ValidationError, dyn_vars, orbit_invariants, pauli_lubanski
from .suites import UnknownSuiteError, run_suite

EXIT_OK = 0
EXIT_CRITERION = 1
EXIT_PARSE = 2
EXIT_DEGENERATE = 3
EXIT_QUADRATURE = 4


KNOWN_ERRORS = (pydantic.ValidationError, json.JSONDecodeError, UnknownSuiteError, ValidationError,
                DegenerateInputError, DomainError, SingularConfigurationError, QuadratureError)


def exit_code_for(exc: BaseException) -> int | None:
    """Exit code for a known failure, ``None`` for anything unexpected."""
    if isinstance(exc, (pydantic.ValidationError, json.JSONDecodeError, UnknownSuiteError, ValidationError)):
        return EXIT_PARSE
    if isinstance(exc, (DegenerateInputError, DomainError, SingularConfigurationError)):
        return EXIT_DEGENERATE
    if isinstance(exc, QuadratureError):
        return EXIT_QUADRATURE
    return None


def to_coform(form: CoFormIn) -> CoForm:
    return CoForm(to_matrix(form.a), to_matrix(form.k))


def classify_form(form: CoFormIn) -> ClassifyOut:
    t = classify(to_coform(form))
    d = t.to_dict()
    label = {k: v for k, v in d.items() if k not in ClassifyOut.model_fields}
    canonical, conditions = None, {}
    try:
        rep = canonical_rep(t)
    except MissingParameterError:
        pass
    else:
        canonical = CoFormIn(a=from_matrix(rep.alpha.a), k=from_matrix(rep.alpha.k))
        conditions = dict(rep.conditions)
    return ClassifyOut(type=t.type_id, massSq=t.massSq, wSq=t.wSq, quantizable=t.quantizable,
                       r_quantizable=t.r_quantizable, listed=t.listed, label=label,
                       canonical=canonical, conditions=conditions)


def invariants(form: CoFormIn) -> InvariantsOut:
    alpha = to_coform(form)
    if alpha.norm() == 0.0:
        raise DegenerateInputError("dual element is zero")
    massSq, wSq = orbit_invariants(alpha)
    P, l, g = dyn_vars(alpha)
    W = pauli_lubanski(alpha)
    return InvariantsOut(massSq=massSq, wSq=wSq, P=P.tolist(), l=l.tolist(), g=g.tolist(), W=W.tolist())


def synthesize_field(cfg: RunConfig) -> WaveField:
    return synthesize(cfg)


def field_out(wf: WaveField) -> FieldOut:
    return FieldOut(metadata=wf.metadata, points=wf.points.tolist(),
                    values=[[[z.real, z.imag] for z in row] for row in wf.values.tolist()])


def field_in(out: FieldOut) -> WaveField:
    vals = np.array([[complex(re, im) for re, im in row] for row in out.values], dtype=complex)
    return WaveField(np.array(out.points, dtype=float), vals.reshape(len(out.points), -1), out.metadata)


def verify(suite: str, seed: int = 0) -> VerifyOut:
    passed, checks = run_suite(suite, seed)
    return VerifyOut(suite=suite, passed=passed, checks=checks)
