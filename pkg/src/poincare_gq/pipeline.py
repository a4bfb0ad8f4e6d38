"""From a run configuration to a synthesized wave field.

The steps follow the construction order: particle data, momentum-space
profile, homogeneous section, invariant-measure grid, and finally the
plane-wave integral at every spacetime sample.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import __version__
from .fields import WaveField, spacetime_grid
from .massive import MassiveSpec, massive_wave
from .massless import MasslessSpec, massless_wave
from .orbits import DegenerateInputError
from .photon import ConeVectorField, PhotonSpec, photon_wave, sym_components
from .quadrature import Profile, QuadratureGrid, build_polar_grid
from .schemas import RunConfig, to_complex
from .sections import HomogeneousSection

DEFAULT_PROFILES = {
    "HM": ((0.2, 0.0, 0.1), 0.8),
    "CPLUS": ((0.3, 0.1, 0.8), 0.4),
}
DEFAULT_ORDER = {"kg": 32, "dirac": 16, "weyl": 16, "penrose": 16, "photon": 16}


@dataclass
class Pipeline:
    family: str
    eta: int
    synth: Callable[[np.ndarray, Callable | None], np.ndarray]
    n_components: int
    grid: QuadratureGrid
    metadata: dict

    def __call__(self, X: np.ndarray) -> np.ndarray:
        return self.synth(X, None)


def chart_of(family: str) -> str:
    return "HM" if family in ("kg", "dirac") else "CPLUS"


def make_profile(cfg: RunConfig) -> Profile:
    fam = cfg.particle.family
    chart = chart_of(fam)
    c0, r0 = DEFAULT_PROFILES[chart]
    pr = cfg.profile
    center = tuple(pr.center) if pr.center is not None else c0
    radius = pr.radius if pr.radius is not None else r0
    return Profile(pr.kind, chart, center, radius, to_complex(pr.amplitude))


def quad_orders(cfg: RunConfig) -> tuple[int, int, int]:
    fam = cfg.particle.family
    o = cfg.quadrature.order if "order" in cfg.quadrature.model_fields_set else DEFAULT_ORDER[fam]
    return (o, max(2, o // 2), o)


def build(cfg: RunConfig) -> Pipeline:
    part = cfg.particle
    fam = part.family
    prof = make_profile(cfg)
    orders = quad_orders(cfg)
    pol = tuple(to_complex(v) for v in cfg.profile.polarization)
    rfn = prof.support_radius_fn()
    if fam in ("kg", "dirac") and part.m == 0.0:
        raise DegenerateInputError(f"the {fam} family needs a positive mass")
    if fam == "kg":
        spec = MassiveSpec(part.m, part.eta, 0)
        grid = build_polar_grid(prof.center, rfn, orders, "NU_HM", part.m)
        synth = lambda X, mult=None: massive_wave(spec, prof, X, grid, multiplier=mult)  # noqa: E731
        ncomp = 1
    elif fam == "dirac":
        spec = MassiveSpec(part.m, part.eta, 1)
        f = HomogeneousSection(1, prof, pol)
        grid = build_polar_grid(prof.center, rfn, orders, "MU_HM_P1", part.m,
                                fiber_order=cfg.quadrature.fiber_order)
        synth = lambda X, mult=None: massive_wave(spec, f, X, grid, multiplier=mult)  # noqa: E731
        ncomp = 4
    elif fam in ("weyl", "penrose"):
        T = 1 if fam == "weyl" else part.T
        spec = MasslessSpec(part.eta, part.chi, T)
        f = HomogeneousSection(T, prof, pol)
        grid = build_polar_grid(prof.center, rfn, orders, "OMEGA_CPLUS")
        synth = lambda X, mult=None: massless_wave(spec, f, X, grid, multiplier=mult)  # noqa: E731
        ncomp = 2 ** T
    elif fam == "photon":
        ell = part.ell if part.ell is not None else -part.eta
        spec = PhotonSpec(part.eta, ell)
        vec = [to_complex(v) for v in cfg.profile.vector]
        if len(vec) != 4:
            raise ValueError("photon vector amplitudes need four components")
        A = ConeVectorField([lambda p, a=a: a * prof(p) for a in vec])
        grid = build_polar_grid(prof.center, rfn, orders, "OMEGA_CPLUS")

        def synth(X, mult=None):
            if mult is not None:
                raise ValueError("photon waves take no integrand multiplier")
            return sym_components(photon_wave(spec, A, X, grid))

        ncomp = 3
    else:  # pragma: no cover - rejected by the schema
        raise ValueError(f"unknown family {fam!r}")
    meta = {
        "particle": part.model_dump(),
        "profile": {"chart": prof.chart, "center": list(prof.center), "radius": prof.radius,
                    "amplitude": [complex(prof.amplitude).real, complex(prof.amplitude).imag],
                    "polarization": [[z.real, z.imag] for z in pol]},
        "grid": cfg.grid.model_dump(),
        "quadrature": {"measure": grid.measure_id, "orders": list(orders),
                       "fiber_order": cfg.quadrature.fiber_order, "nodes": int(grid.n_nodes)},
        "seed": cfg.seed,
        "version": __version__,
    }
    return Pipeline(fam, part.eta, synth, ncomp, grid, meta)


def synthesize(cfg: RunConfig) -> WaveField:
    pipe = build(cfg)
    g = cfg.grid
    X = spacetime_grid(g.origin, g.extent, g.samples)
    vals = np.asarray(pipe(X)).reshape(len(X), pipe.n_components)
    return WaveField(X, vals, pipe.metadata)
