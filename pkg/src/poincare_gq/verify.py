"""Residuals of the wave equations and gauge identities.

A *synthesizer* is a callable ``synth(X, multiplier)`` returning wave values
of shape (n, c) at spacetime points ``X`` (n, 4), where the optional
``multiplier(batch)`` multiplies the momentum-space integrand.  Two
differentiation methods are offered:

``analytic``
    derivatives of the plane-wave factor are taken under the integral:
    ``d_mu`` becomes multiplication by ``2 pi i eta k_4`` (mu = 4) or
    ``-2 pi i eta k_mu`` (spatial mu).
``fd``
    central finite differences of sampled values (5-point for first
    derivatives, 3-point for second derivatives).
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np

from .fields import as_points
from .massive import GAMMA, MassiveSpec, massive_wave
from .massless import MasslessSpec, massless_wave
from .photon import potential_wave
from .spinor import EPS, PAULI, h_inv, h_map

__all__ = [
    "ResidualReport", "InsufficientMarginError", "symbol", "Differentiator", "synth_massive",
    "synth_massless", "synth_potential", "kg_residual", "dirac_residual", "weyl_residual",
    "penrose_residual", "lorenz_gauge_residual", "dalembert_residual", "pointwise_residual",
    "penrose_coefficients",
]

Synth = Callable[[np.ndarray, Callable | None], np.ndarray]


class InsufficientMarginError(ValueError):
    pass


@dataclass
class ResidualReport:
    equation: str
    max_abs: float
    max_rel: float
    n_samples: int
    method: str

    def to_dict(self) -> dict:
        return asdict(self)

    def passed(self, tol: float) -> bool:
        return self.max_rel <= tol


def symbol(K, eta: int, mu: int) -> np.ndarray:
    """Factor produced by ``d/dx^mu`` acting on ``exp(2 pi i eta <k, x>)``."""
    k = h_inv(np.asarray(K, dtype=complex))
    fac = k[..., 3] if mu == 3 else -k[..., mu]
    return 2j * math.pi * eta * fac


# ---------------------------------------------------------------------------
# synthesizer adaptors
# ---------------------------------------------------------------------------

def synth_massive(spec: MassiveSpec, f, grid) -> Synth:
    return lambda X, mult=None: massive_wave(spec, f, X, grid, multiplier=mult)


def synth_massless(spec: MasslessSpec, f, grid) -> Synth:
    return lambda X, mult=None: massless_wave(spec, f, X, grid, multiplier=mult)


def synth_potential(A, grid, eta: int = -1) -> Synth:
    return lambda X, mult=None: potential_wave(A, X, grid, eta, multiplier=mult)


# ---------------------------------------------------------------------------
# derivatives
# ---------------------------------------------------------------------------

class Differentiator:
    """Values and derivatives of a synthesized wave at fixed points."""

    def __init__(self, synth: Synth, points, eta: int, method: str = "analytic", h: float = 1e-3):
        if method not in ("analytic", "fd"):
            raise ValueError(f"unknown method {method!r}")
        if not h > 0:
            raise InsufficientMarginError("finite-difference step must be positive")
        self.synth = synth
        self.X = as_points(points)
        self.eta = eta
        self.method = method
        self.h = h
        self._cache: dict = {}

    def value(self) -> np.ndarray:
        if "v" not in self._cache:
            self._cache["v"] = np.asarray(self.synth(self.X, None))
        return self._cache["v"]

    def _shifted(self, offsets: list[tuple[int, float]]) -> list[np.ndarray]:
        X = self.X
        pts = []
        for mu, s in offsets:
            Y = X.copy()
            Y[:, mu] += s
            pts.append(Y)
        vals = np.asarray(self.synth(np.concatenate(pts), None))
        return np.split(vals, len(offsets))

    def d(self, mu: int) -> np.ndarray:
        key = ("d", mu)
        if key not in self._cache:
            if self.method == "analytic":
                eta = self.eta
                self._cache[key] = np.asarray(self.synth(self.X, lambda b: symbol(b.K, eta, mu)[:, None]))
            else:
                h = self.h
                f2, f1, m1, m2 = self._shifted([(mu, 2 * h), (mu, h), (mu, -h), (mu, -2 * h)])
                self._cache[key] = (-f2 + 8 * f1 - 8 * m1 + m2) / (12.0 * h)
        return self._cache[key]

    def dd(self, mu: int) -> np.ndarray:
        key = ("dd", mu)
        if key not in self._cache:
            if self.method == "analytic":
                eta = self.eta
                self._cache[key] = np.asarray(self.synth(self.X, lambda b: (symbol(b.K, eta, mu) ** 2)[:, None]))
            else:
                h = self.h
                f1, m1 = self._shifted([(mu, h), (mu, -h)])
                self._cache[key] = (f1 - 2 * self.value() + m1) / (h * h)
        return self._cache[key]


def _report(eq: str, res: np.ndarray, scale: np.ndarray, method: str) -> ResidualReport:
    r = np.abs(res).reshape(len(res), -1).max(axis=1) if res.size else np.zeros(0)
    s = float(np.max(scale)) if scale.size else 0.0
    mx = float(r.max()) if r.size else 0.0
    return ResidualReport(eq, mx, mx / s if s > 0 else 0.0, int(len(res)), method)


def _norm(a):
    return np.abs(a).reshape(len(a), -1).max(axis=1)


# ---------------------------------------------------------------------------
# residuals
# ---------------------------------------------------------------------------

def kg_residual(synth: Synth, points, m: float, eta: int = -1, method: str = "analytic",
                h: float = 1e-3) -> ResidualReport:
    """``(box + 4 pi^2 m^2) psi`` with ``box = d_4^2 - sum_j d_j^2``."""
    D = Differentiator(synth, points, eta, method, h)
    mass = 4.0 * math.pi ** 2 * m * m
    if method == "analytic":
        # the whole operator in one integral: the symbol vanishes at every node
        def mult(b):
            return (sum((1 if mu == 3 else -1) * symbol(b.K, eta, mu) ** 2 for mu in range(4)) + mass)[:, None]

        res = np.asarray(synth(D.X, mult))
        scale = mass * _norm(D.value())
        return _report("kg", res, scale, method)
    terms = [D.dd(3)] + [-D.dd(j) for j in range(3)] + [mass * D.value()]
    res = sum(terms)
    scale = sum(_norm(t) for t in terms)
    return _report("kg", res, scale, method)


def dirac_residual(synth: Synth, points, m: float, eta: int = -1, method: str = "analytic",
                   h: float = 1e-3) -> ResidualReport:
    """``(gamma^nu d_nu - 2 pi i eta m) psi``."""
    D = Differentiator(synth, points, eta, method, h)
    terms = [np.einsum("ij,nj->ni", GAMMA[mu], D.d(mu)) for mu in range(4)]
    terms.append(-2j * math.pi * eta * m * D.value())
    res = sum(terms)
    scale = sum(_norm(t) for t in terms)
    return _report("dirac", res, scale, method)


def weyl_residual(synth: Synth, points, eta: int, chi: int, method: str = "analytic",
                  h: float = 1e-3) -> ResidualReport:
    """``(I d_4 + chi sigma.grad) psi``."""
    D = Differentiator(synth, points, eta, method, h)
    terms = [D.d(3)] + [chi * np.einsum("ij,nj->ni", PAULI[j], D.d(j)) for j in range(3)]
    res = sum(terms)
    scale = sum(_norm(t) for t in terms)
    return _report("weyl", res, scale, method)


def penrose_coefficients() -> np.ndarray:
    """``c_mu`` with ``nabla^{AA'} = sum_mu c_mu[A, A'] d_mu``.

    ``nabla_{BB'} = 1/2 h(d)`` and ``nabla^{AA'} = -eps nabla eps``.
    """
    out = np.empty((4, 2, 2), dtype=complex)
    for mu in range(4):
        e = np.zeros(4)
        e[mu] = 1.0
        out[mu] = -(EPS @ (0.5 * h_map(e)) @ EPS)
    return out


def penrose_residual(synth: Synth, points, eta: int, chi: int, T: int, method: str = "analytic",
                     h: float = 1e-3) -> ResidualReport:
    """Contraction of ``nabla^{AA'}`` with the first spinor index.

    For ``chi = +1`` the index is lowered with ``eps`` and contracted on
    ``A'``; for ``chi = -1`` the raised index is contracted on ``A``.
    """
    D = Differentiator(synth, points, eta, method, h)
    C = penrose_coefficients()
    terms = []
    for mu in range(4):
        psi = D.d(mu).reshape(len(D.X), 2, 2 ** (T - 1))
        op = C[mu] @ EPS if chi == 1 else C[mu].T
        terms.append(np.einsum("ab,nbr->nar", op, psi).reshape(len(D.X), -1))
    res = sum(terms)
    scale = sum(_norm(t) for t in terms)
    return _report("penrose", res, scale, method)


def lorenz_gauge_residual(synth: Synth, points, eta: int = -1, method: str = "analytic",
                          h: float = 1e-3) -> ResidualReport:
    """``sum_mu d A~^mu / d x^mu`` for a potential with components (A^1..A^4)."""
    D = Differentiator(synth, points, eta, method, h)
    terms = [D.d(mu)[:, mu:mu + 1] for mu in range(4)]
    res = sum(terms)
    scale = sum(_norm(t) for t in terms)
    return _report("lorenz", res, scale, method)


def dalembert_residual(synth: Synth, points, eta: int = -1, method: str = "analytic",
                       h: float = 1e-3) -> ResidualReport:
    """``box A~^mu`` for every component."""
    D = Differentiator(synth, points, eta, method, h)
    terms = [D.dd(3)] + [-D.dd(j) for j in range(3)]
    res = sum(terms)
    scale = sum(_norm(t) for t in terms)
    return _report("dalembert", res, scale, method)


# ---------------------------------------------------------------------------
# pointwise (prewave) identities
# ---------------------------------------------------------------------------

def pointwise_residual(equation: str, value, K, eta: int, m: float = 0.0, chi: int = 1, T: int = 1) -> float:
    """Relative residual of a prewave value at momentum ``K``: the operator
    applied to ``value * exp(2 pi i eta <k, x>)`` divided by the plane wave."""
    v = np.asarray(value, dtype=complex).reshape(-1)
    s = [symbol(K, eta, mu) for mu in range(4)]
    if equation == "dirac":
        terms = [s[mu] * (GAMMA[mu] @ v) for mu in range(4)] + [-2j * math.pi * eta * m * v]
    elif equation == "weyl":
        terms = [s[3] * v] + [chi * s[j] * (PAULI[j] @ v) for j in range(3)]
    elif equation == "penrose":
        C = penrose_coefficients()
        psi = v.reshape(2, 2 ** (T - 1))
        terms = [s[mu] * ((C[mu] @ EPS if chi == 1 else C[mu].T) @ psi).reshape(-1) for mu in range(4)]
    elif equation == "kg":
        terms = [s[3] ** 2 * v] + [-(s[j] ** 2) * v for j in range(3)] + [4 * math.pi ** 2 * m * m * v]
    else:
        raise ValueError(f"unknown equation {equation!r}")
    res = np.abs(sum(terms)).max()
    scale = sum(np.abs(t).max() for t in terms)
    return float(res / scale) if scale > 0 else 0.0
