"""Containers and helpers shared by the wave-synthesis modules."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .spinor import h_inv

__all__ = [
    "WaveField",
    "spacetime_grid",
    "momentum_vectors",
    "plane_phase",
    "tensor_power",
    "as_points",
]


def as_points(x) -> np.ndarray:
    """Coerce one four-vector or a stack of them to shape (n, 4)."""
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[None, :]
    if x.shape[-1] != 4:
        raise ValueError("spacetime points need four components (x1, x2, x3, x4)")
    return x


def momentum_vectors(K: np.ndarray) -> np.ndarray:
    """Four-vectors ``k = h^{-1}(K)`` of a stack of hermitian matrices."""
    return h_inv(K)


def plane_phase(K: np.ndarray, X: np.ndarray, eta: int) -> np.ndarray:
    """``exp(2 pi i eta <k, x>)`` for every node (rows) and point (columns).

    This is the factor ``exp(-i pi eta Tr(K eps conj(h(x)) eps))`` common to
    every prewave, rewritten through ``1/2 Tr(h(x) eps conj(h(y)) eps) = -<x, y>``.
    """
    k = momentum_vectors(K)
    X = as_points(X)
    dot = np.multiply.outer(k[:, 3], X[:, 3]) - k[:, :3] @ X[:, :3].T
    return np.exp((2j * math.pi * eta) * dot)


def tensor_power(v: np.ndarray, T: int) -> np.ndarray:
    """Flattened ``v^{(x)T}`` for a stack of vectors ``v`` of shape (n, d)."""
    v = np.asarray(v)
    out = np.ones(v.shape[:-1] + (1,), dtype=complex)
    for _ in range(T):
        out = (out[..., :, None] * v[..., None, :]).reshape(v.shape[:-1] + (-1,))
    return out


def spacetime_grid(origin, extent, samples) -> np.ndarray:
    """Regular grid, x1 slowest and x4 fastest, as an (n, 4) array.

    ``extent[i]`` is the total width along axis i; an axis with one sample sits
    at ``origin[i]``.
    """
    axes = []
    for o, e, n in zip(origin, extent, samples):
        n = int(n)
        if n < 1:
            raise ValueError("samples per axis must be >= 1")
        axes.append(np.array([float(o)]) if n == 1 else np.linspace(o, o + e, n))
    if len(axes) != 4:
        raise ValueError("spacetime grids have four axes")
    return np.stack(np.meshgrid(*axes, indexing="ij"), -1).reshape(-1, 4)


@dataclass
class WaveField:
    """Complex spin-tensor samples on spacetime points.

    ``values`` has shape (n_points, n_components).
    """

    points: np.ndarray
    values: np.ndarray
    metadata: dict = field(default_factory=dict)

    @property
    def n_components(self) -> int:
        return self.values.shape[1]
