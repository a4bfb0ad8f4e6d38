"""Homogeneous functions on the fibre bundles over momentum space.

A state is a function ``f`` on the total space of a circle bundle that is
homogeneous of degree ``-T``: ``f(s Z) = s^{-T} f(Z)`` for ``|s| = 1``.  It is
stored as a compact base profile ``b`` together with a rule fixing the phase:

``polarization`` (default)
    ``f(Z) = b(base(Z)) * conj(xi^* w)^T`` with ``w`` the first spinor of ``Z``
    (massive case) or ``Z`` itself (massless case).  Smooth on the whole
    bundle, with no chart needed.
``section``
    ``f(lambda c(base)) = lambda^{-T} b(base)`` for a chosen section ``c`` of
    the bundle over the base: the canonical-phase representative for massive
    particles, ``sigma_U`` or ``sigma_V`` for massless ones.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .quadrature import Profile, chart_to_momentum
from .spinor import h_inv

__all__ = ["HomogeneousSection"]


def _momentum_coords(K: np.ndarray) -> np.ndarray:
    return h_inv(K)[..., :3]


@dataclass(frozen=True)
class HomogeneousSection:
    degree: int
    profile: Profile
    polarization: tuple | None = (1.0, 0.0)
    chart_section: str = "auto"

    def __post_init__(self):
        if self.degree < 0:
            raise ValueError("degree must be non-negative")
        if self.polarization is not None:
            xi = np.asarray(self.polarization, dtype=complex)
            if xi.shape != (2,) or not np.any(xi != 0):
                raise ValueError("polarization must be a nonzero 2-spinor")
        if self.chart_section not in ("auto", "U", "V", "canonical"):
            raise ValueError(f"unknown chart section {self.chart_section!r}")

    @property
    def xi(self) -> np.ndarray:
        return np.asarray(self.polarization, dtype=complex)

    # -- base profile --------------------------------------------------------
    def base_value(self, K: np.ndarray, spinor: np.ndarray | None = None) -> np.ndarray:
        p = _momentum_coords(K)
        ch = self.profile.chart
        if ch in ("HM", "CPLUS"):
            return self.profile(p)
        if spinor is None:
            raise ValueError("profile on H^m x P1 needs the fibre spinor")
        a1, a2 = spinor[..., 0], spinor[..., 1]
        with np.errstate(divide="ignore", invalid="ignore"):
            zeta = a2 / a1 if ch == "HM_P1_S" else a1 / a2
        coords = np.concatenate([p, zeta.real[..., None], zeta.imag[..., None]], axis=-1)
        out = np.zeros(p.shape[:-1], dtype=complex)
        ok = np.isfinite(zeta)
        out[ok] = self.profile(coords[ok])
        return out

    # -- massive: Z = (w, z) in the constraint set z^* w = 1 -----------------
    def massive(self, K: np.ndarray, Z: np.ndarray) -> np.ndarray:
        w = Z[..., :2]
        b = self.base_value(K, w)
        T = self.degree
        if self.polarization is not None:
            return b * np.conj(w @ np.conj(self.xi)) ** T
        # canonical phase: first nonzero component of w real and positive
        first = np.where(np.abs(w[..., 0]) > 1e-300, w[..., 0], w[..., 1])
        lam = first / np.abs(first)
        return b * lam ** (-T)

    # -- massless: z in C^2 - 0 ------------------------------------------------
    def massless(self, K: np.ndarray, z: np.ndarray, chi: int) -> np.ndarray:
        b = self.base_value(K)
        T = self.degree
        if self.polarization is not None:
            return b * np.conj(z @ np.conj(self.xi)) ** T
        from .massless import cone_section_values

        c = cone_section_values(_momentum_coords(K), chi, self._cone_chart())
        lam = np.sum(np.conj(c) * z, axis=-1) / np.sum(np.abs(c) ** 2, axis=-1)
        return b * lam ** (-T)

    def _cone_chart(self) -> str:
        if self.chart_section in ("U", "V"):
            return self.chart_section
        c = np.asarray(self.profile.center[:3], dtype=float)
        return "U" if c[2] >= 0 else "V"

    def with_profile(self, profile: Profile) -> "HomogeneousSection":
        return HomogeneousSection(self.degree, profile, self.polarization, self.chart_section)


def base_momentum(profile: Profile, m: float = 1.0) -> np.ndarray:
    """Momentum matrix at the profile centre (handy for tests)."""
    chart = "CPLUS" if profile.chart == "CPLUS" else "HM"
    return chart_to_momentum(chart, np.asarray(profile.center[:3], float), m)
