"""Geometric quantization of the Poincare group double cover, done numerically.

Modules by layer:

``spinor``, ``orbits``
    group law, Lie algebra, dual pairing, orbit classification
``quadrature``, ``sections``, ``fields``
    invariant measures, compact profiles, homogeneous sections
``massive``, ``massless``, ``photon``
    prewaves and synthesized wave functions
``twistor``, ``representation``
    contact and symplectic geometry, the unitary action and its operators
``verify``, ``suites``
    residual engine and named verification suites
``pipeline``, ``io``, ``app``, ``service``, ``cli``
    batch front-end
"""
from __future__ import annotations

__version__ = "0.1.0"
