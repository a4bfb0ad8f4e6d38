"""Coadjoint orbit types, canonical representatives and quantizability flags."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .spinor import (
    CoForm,
    I2,
    PAULI,
    current_tolerances,
    h_inv,
    pauli_lubanski,
    orbit_invariants,
)

__all__ = [
    "OrbitType",
    "CanonicalRep",
    "DegenerateInputError",
    "ClassificationError",
    "MissingParameterError",
    "classify",
    "canonical_rep",
    "quantizability",
    "family_orbit_types",
    "NILPOTENT",
]

S3 = PAULI[2]
#: The nilpotent matrix [[0, 0], [1, 0]] used by several representatives.
NILPOTENT = np.array([[0, 0], [1, 0]], dtype=complex)
E11 = np.diag([1.0, 0.0]).astype(complex)


class DegenerateInputError(ValueError):
    """The dual element vanishes (or a sign needed by a representative is zero)."""


class ClassificationError(ValueError):
    """No row of the orbit table matches the measured invariants."""


class MissingParameterError(ValueError):
    pass


@dataclass(frozen=True)
class OrbitType:
    """Orbit label together with the invariants needed to rebuild a representative.

    ``s`` is set only for type 4 (``W = sP``).  ``det_a`` is the invariant of
    type 2, ``sign_trP`` distinguishes the two sheets for types 3, 4 and 5 and
    ``sign_trW`` the two null or timelike directions of ``W`` for types 7 and 9.
    """

    type_id: int
    massSq: float = 0.0
    wSq: float = 0.0
    s: float | None = None
    det_a: complex | None = None
    sign_trP: int | None = None
    sign_trW: int | None = None
    quantizable: bool = False
    r_quantizable: bool = False
    listed: bool = False
    T: int | None = None
    chi: int | None = None

    def to_dict(self) -> dict:
        d = {
            "type": self.type_id,
            "massSq": self.massSq,
            "wSq": self.wSq,
            "quantizable": self.quantizable,
            "r_quantizable": self.r_quantizable,
            "listed": self.listed,
        }
        for name in ("s", "sign_trP", "sign_trW", "T", "chi"):
            v = getattr(self, name)
            if v is not None:
                d[name] = v
        if self.det_a is not None:
            d["det_a"] = [self.det_a.real, self.det_a.imag]
        return d


@dataclass(frozen=True)
class CanonicalRep:
    alpha: CoForm
    conditions: dict = field(default_factory=dict)


def _is_zero(q: float, norm: float, tol: float, degree: int) -> bool:
    # q is homogeneous of the given degree in alpha, so the cutoff scales alike
    return abs(q) <= tol * (1.0 + norm) ** degree


def _sign(x: float) -> int:
    return 1 if x > 0 else -1


def classify(alpha: CoForm, tol: float | None = None) -> OrbitType:
    tol = current_tolerances().classify if tol is None else tol
    n = alpha.norm()
    if n <= tol:
        raise DegenerateInputError("dual element is zero within tolerance")
    massSq, wSq = orbit_invariants(alpha)
    W = pauli_lubanski(alpha)
    P = h_inv(-alpha.k)
    k_zero = float(np.max(np.abs(alpha.k))) <= tol * (1.0 + n)
    W_zero = float(np.max(np.abs(W))) <= tol * (1.0 + n) ** 2
    P_null = _is_zero(massSq, n, tol, 2)
    W_null = _is_zero(wSq, n, tol, 4)

    if k_zero:
        det_a = complex(np.linalg.det(alpha.a))
        if _is_zero(abs(det_a), n, tol, 2):
            t = OrbitType(1)
        else:
            t = OrbitType(2, det_a=det_a)
        return _with_flags(replace(t, massSq=0.0, wSq=0.0))

    trP = float(P[3])
    if P_null:
        if W_null:
            # W is orthogonal to the null vector P and null itself, so W = sP
            s = float(np.dot(W, P) / np.dot(P, P))
            if np.max(np.abs(W - s * P)) > tol * (1.0 + n) ** 2:
                raise ClassificationError("null P with null W not proportional to P")
            t = OrbitType(4, s=s, sign_trP=_sign(trP))
        elif wSq < 0:
            t = OrbitType(3, sign_trP=_sign(trP))
        else:
            raise ClassificationError("null momentum with timelike W")
        return _with_flags(replace(t, massSq=0.0, wSq=0.0 if W_null else wSq))

    if massSq > 0:
        if not W_null and wSq > 0:
            raise ClassificationError("timelike momentum with timelike W")
        return _with_flags(
            OrbitType(5, massSq=massSq, wSq=0.0 if W_null else wSq, sign_trP=_sign(trP))
        )

    # spacelike momentum
    if W_zero:
        return _with_flags(OrbitType(6, massSq=massSq, wSq=0.0))
    trW = float(W[3])
    if W_null:
        if _is_zero(trW, n, tol, 2):
            raise ClassificationError("null W with vanishing time component")
        return _with_flags(OrbitType(9, massSq=massSq, wSq=0.0, sign_trW=_sign(trW)))
    if wSq > 0:
        return _with_flags(OrbitType(7, massSq=massSq, wSq=wSq, sign_trW=_sign(trW)))
    return _with_flags(OrbitType(8, massSq=massSq, wSq=wSq))


def _integer(x: float, tol: float = 1e-9) -> int | None:
    r = round(x)
    if r >= 1 and abs(x - r) <= tol * max(1.0, abs(x)):
        return int(r)
    return None


def _with_flags(t: OrbitType) -> OrbitType:
    q, rq = quantizability(t)
    extra = _quantization_data(t)
    return replace(t, quantizable=q, r_quantizable=rq, listed=q, **extra)


def _quantization_data(t: OrbitType) -> dict:
    """Integer ``T`` (and ``chi``) for the families quantizable but not over R."""
    four_pi = 4.0 * math.pi
    if t.type_id == 2 and t.det_a is not None:
        d = t.det_a
        if abs(d.imag) <= 1e-12 * max(1.0, abs(d)) and d.real > 0:
            T = _integer(8.0 * math.pi * math.sqrt(d.real))
            if T:
                return {"T": T}
    if t.type_id == 4 and t.s is not None and t.s != 0:
        T = _integer(four_pi * abs(t.s))
        if T:
            return {"T": T, "chi": _sign(t.s)}
    if t.type_id in (5, 7) and t.wSq != 0 and t.massSq != 0:
        ratio = -t.wSq / t.massSq
        if ratio > 0:
            T = _integer(four_pi * math.sqrt(ratio))
            if T:
                out = {"T": T}
                if t.type_id == 7 and t.sign_trW is not None:
                    out["chi"] = -t.sign_trW
                return out
    return {}


def quantizability(t: OrbitType) -> tuple[bool, bool]:
    """``(quantizable, r_quantizable)`` for the listed families.

    Orbits outside both lists are reported as ``(False, False)``; their
    ``listed`` attribute is then False.
    """
    if t.type_id in (3, 6, 8, 9):
        return True, True
    if t.type_id == 5 and t.wSq == 0:
        return True, True
    if t.type_id in (2, 4, 5, 7) and _quantization_data(t):
        return True, False
    return False, False


def _need(t: OrbitType, *names: str) -> None:
    missing = [n for n in names if getattr(t, n) is None]
    if missing:
        raise MissingParameterError(f"type {t.type_id} needs {', '.join(missing)}")


def canonical_rep(t: OrbitType) -> CanonicalRep:
    """Canonical representative of the orbit labelled by ``t``.

    For type 9 the representative is ``{i eta s3 + 2 N, mu s3}`` with
    ``mu = sqrt(-|P|)``, ``N`` the nilpotent matrix and ``eta = -sign(Tr W)``.
    The diagonal part alone gives a timelike ``W`` (type 7); the nilpotent term
    makes ``W`` null while keeping it nonzero.
    """
    tid = t.type_id
    Z = np.zeros((2, 2), dtype=complex)
    if tid == 1:
        return CanonicalRep(CoForm(NILPOTENT, Z), {})
    if tid == 2:
        _need(t, "det_a")
        r = np.sqrt(-complex(t.det_a))
        # branch: Im r > 0, or r real and positive
        if r.imag < 0 or (r.imag == 0 and r.real < 0):
            r = -r
        return CanonicalRep(CoForm(r * S3, Z), {"branch": "Im sqrt > 0 or sqrt > 0"})
    if tid == 3:
        _need(t, "sign_trP")
        c = math.sqrt(-t.wSq)
        return CanonicalRep(CoForm(c * NILPOTENT, -t.sign_trP * E11), {"sign_trP": t.sign_trP})
    if tid == 4:
        _need(t, "s", "sign_trP")
        return CanonicalRep(
            CoForm(0.5j * t.s * S3, -t.sign_trP * E11), {"sign_trP": t.sign_trP, "s": t.s}
        )
    if tid == 5:
        _need(t, "sign_trP")
        if t.massSq <= 0:
            raise MissingParameterError("type 5 needs |P| > 0")
        beta = 0.5 * math.sqrt(max(-t.wSq, 0.0) / t.massSq)
        return CanonicalRep(
            CoForm(1j * beta * S3, -t.sign_trP * math.sqrt(t.massSq) * I2),
            {"sign_trP": t.sign_trP},
        )
    if t.massSq >= 0:
        raise MissingParameterError(f"type {tid} needs |P| < 0")
    mu = math.sqrt(-t.massSq)
    if tid == 6:
        return CanonicalRep(CoForm(Z, mu * S3), {})
    if tid == 7:
        _need(t, "sign_trW")
        beta = -0.5 * t.sign_trW * math.sqrt(-t.wSq / t.massSq)
        return CanonicalRep(CoForm(1j * beta * S3, mu * S3), {"sign_trW": t.sign_trW})
    if tid == 8:
        c = math.sqrt(t.wSq / t.massSq)
        return CanonicalRep(CoForm(c * NILPOTENT, mu * S3), {})
    if tid == 9:
        _need(t, "sign_trW")
        eta = -t.sign_trW
        return CanonicalRep(
            CoForm(1j * eta * S3 + 2.0 * NILPOTENT, mu * S3), {"eta": eta, "sign_trW": t.sign_trW}
        )
    raise ValueError(f"unknown orbit type {tid}")


def family_orbit_types(eta: int, chi: int, T: int, m: float) -> list[OrbitType]:
    """One generic orbit label per row, parametrised by particle-style data.

    The sign of ``Tr P`` is ``-eta`` (the sign of the energy) and spin-type
    scales are built from ``T/4pi``.
    """
    c = T / (4.0 * math.pi)
    sP = -eta
    return [
        OrbitType(1),
        OrbitType(2, det_a=complex((T / (8.0 * math.pi)) ** 2)),
        OrbitType(3, wSq=-(m * c) ** 2, sign_trP=sP),
        OrbitType(4, s=chi * c, sign_trP=sP),
        OrbitType(5, massSq=m * m, wSq=-(m * c) ** 2, sign_trP=sP),
        OrbitType(6, massSq=-m * m),
        OrbitType(7, massSq=-m * m, wSq=(m * c) ** 2, sign_trW=chi),
        OrbitType(8, massSq=-m * m, wSq=-(m * c) ** 2),
        OrbitType(9, massSq=-m * m, sign_trW=-eta),
    ]
