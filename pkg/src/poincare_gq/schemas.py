"""Request and response models shared by the HTTP service and the CLI.

Complex numbers travel as ``[re, im]`` pairs; a bare number is read as a real
value.  Matrices are nested 2x2 lists of such entries.
"""
from __future__ import annotations

from typing import Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator

Complex = Union[float, list[float]]


def to_complex(v) -> complex:
    if isinstance(v, (int, float)):
        return complex(v)
    if isinstance(v, (list, tuple)) and len(v) == 2:
        return complex(float(v[0]), float(v[1]))
    raise ValueError(f"expected a number or an [re, im] pair, got {v!r}")


def from_complex(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


def to_matrix(rows) -> np.ndarray:
    M = np.array([[to_complex(v) for v in row] for row in rows], dtype=complex)
    if M.shape != (2, 2):
        raise ValueError("expected a 2x2 matrix")
    return M


def from_matrix(M) -> list[list[list[float]]]:
    return [[from_complex(v) for v in row] for row in np.asarray(M)]


class Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class CoFormIn(Strict):
    a: list[list[Complex]]
    k: list[list[Complex]]

    @field_validator("a", "k")
    @classmethod
    def _two_by_two(cls, v):
        to_matrix(v)
        return v


class ParticleIn(Strict):
    family: Literal["kg", "dirac", "weyl", "penrose", "photon"] = "kg"
    m: float = Field(1.3, ge=0.0)
    eta: Literal[-1, 1] = -1
    chi: Literal[-1, 1] = 1
    T: int = Field(1, ge=1, le=4)
    ell: Optional[Literal[-1, 1]] = None


class ProfileIn(Strict):
    kind: Literal["bump"] = "bump"
    center: Optional[list[float]] = None
    radius: Optional[float] = None
    amplitude: Complex = 1.0
    polarization: list[Complex] = Field(default_factory=lambda: [1.0, [0.0, 0.4]])
    vector: list[Complex] = Field(default_factory=lambda: [0.3, [0.0, 1.0], -0.5, [0.7, 0.2]])

    @field_validator("polarization")
    @classmethod
    def _spinor(cls, v):
        zs = [to_complex(x) for x in v]
        if len(zs) != 2 or not any(zs):
            raise ValueError("polarization must be a nonzero 2-spinor")
        return v

    @field_validator("vector")
    @classmethod
    def _four_vector(cls, v):
        if len(v) != 4:
            raise ValueError("photon vector amplitudes need four components")
        for x in v:
            to_complex(x)
        return v


class GridIn(Strict):
    origin: list[float] = Field(default_factory=lambda: [0.0, 0.0, 0.0, 0.0])
    extent: list[float] = Field(default_factory=lambda: [1.0, 1.0, 1.0, 0.0])
    samples: list[int] = Field(default_factory=lambda: [8, 8, 8, 1])

    @field_validator("origin", "extent", "samples")
    @classmethod
    def _four(cls, v):
        if len(v) != 4:
            raise ValueError("spacetime grids have four axes")
        return v


class QuadratureIn(Strict):
    order: int = Field(32, ge=2, le=256)
    fiber_order: int = Field(8, ge=2, le=64)


class RunConfig(Strict):
    particle: ParticleIn = Field(default_factory=ParticleIn)
    profile: ProfileIn = Field(default_factory=ProfileIn)
    grid: GridIn = Field(default_factory=GridIn)
    quadrature: QuadratureIn = Field(default_factory=QuadratureIn)
    seed: int = 0


class ClassifyOut(BaseModel):
    type: int
    massSq: float
    wSq: float
    quantizable: bool
    r_quantizable: bool
    listed: bool
    label: dict
    canonical: Optional[CoFormIn] = None
    conditions: dict = Field(default_factory=dict)


class InvariantsOut(BaseModel):
    massSq: float
    wSq: float
    P: list[float]
    l: list[float]
    g: list[float]
    W: list[float]


class FieldOut(BaseModel):
    metadata: dict
    points: list[list[float]]
    values: list[list[list[float]]]


class Check(BaseModel):
    name: str
    value: float
    tolerance: float
    passed: bool
    detail: dict = Field(default_factory=dict)


class VerifyOut(BaseModel):
    suite: str
    passed: bool
    checks: list[Check]


class ErrorOut(BaseModel):
    exit_code: int
    error: str
    detail: str
