"""Invariant measures, compact test profiles and a deterministic quadrature engine.

Measures
--------
``NU_HM``        d^3p / sqrt(m^2 + p^2) on the mass hyperboloid, chart ``HM``.
``OMEGA_CPLUS``  d^3p / |p| on the future light cone, chart ``CPLUS``.
``MU_HM_P1``     invariant volume on H^m x P1(C).  In the chart ``z = (1, zeta)``
                 (``HM_P1_S``) or ``z = (zeta, 1)`` (``HM_P1_N``) its density with
                 respect to ``d^3p dRe(zeta) dIm(zeta)`` is ``1 / (E D^2)`` where
                 ``D = z^* eps conj(K) eps z = -|z|^2 (E - p.u)``.  Written on the
                 sphere of directions ``u`` it becomes
                 ``d^3p/E  dS(u) / (4 (E - p.u)^2)``, which is the form used by the
                 product grids below.

Summation order
---------------
Nodes are visited in lexicographic order of their tensor indices (last axis
fastest, fibre nodes innermost).  The node list is cut into fixed-size chunks
whose size depends only on the grid and the integrand shape; each chunk is
summed with ``numpy.sum`` and the chunk partials are combined by a fixed
pairwise tree.  Worker threads (``GQ_THREADS``) only change which thread
evaluates a chunk, never the arithmetic, so results are bit-identical for
every thread count.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from .spinor import EPS, h_map

__all__ = [
    "MEASURES", "CHARTS", "QuadratureError", "DomainError", "ChartPoint", "Profile",
    "NodeBatch", "QuadratureGrid", "measure_density", "chart_to_momentum",
    "integrate", "build_grid", "build_polar_grid", "build_pullback_grid",
    "sphere_rule", "spinor_of_direction", "direction_of_spinor", "gq_threads",
    "pairwise_sum",
]

MEASURES = ("NU_HM", "OMEGA_CPLUS", "MU_HM_P1")
CHARTS = ("HM", "CPLUS", "HM_P1_S", "HM_P1_N")


class QuadratureError(RuntimeError):
    """Non-finite integrand values or an unusable grid."""


class DomainError(ValueError):
    """A point or support lies outside (or touches the boundary of) its chart."""


# ---------------------------------------------------------------------------
# chart geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ChartPoint:
    chart_id: str
    coords: tuple

    def __post_init__(self):
        if self.chart_id not in CHARTS:
            raise DomainError(f"unknown chart {self.chart_id!r}")


def _energy(p: np.ndarray, m: float, chart: str) -> np.ndarray:
    r2 = np.sum(p * p, axis=-1)
    if chart == "CPLUS":
        return np.sqrt(r2)
    return np.sqrt(m * m + r2)


def chart_to_momentum(chart: str, p, m: float = 1.0) -> np.ndarray:
    """Momentum matrix ``K = h(p, E)`` for chart coordinates ``p``."""
    p = np.asarray(p, dtype=float)
    E = _energy(p, m, chart)
    return h_map(np.concatenate([p, E[..., None]], axis=-1))


def _chart_spinor(chart: str, zeta: np.ndarray) -> np.ndarray:
    one = np.ones_like(zeta)
    if chart == "HM_P1_S":
        return np.stack([one, zeta], axis=-1)
    return np.stack([zeta, one], axis=-1)


def direction_of_spinor(z) -> np.ndarray:
    """Unit vector ``u`` with ``h(u, 1) = 2 z z^* / z^* z``."""
    z = np.asarray(z, dtype=complex)
    n2 = np.sum(np.abs(z) ** 2, axis=-1)
    c = np.conj(z[..., 0]) * z[..., 1]
    return np.stack(
        [2 * c.real / n2, 2 * c.imag / n2, (np.abs(z[..., 0]) ** 2 - np.abs(z[..., 1]) ** 2) / n2],
        axis=-1,
    )


def spinor_of_direction(theta, phi) -> np.ndarray:
    """Unit spinor ``(cos(theta/2), e^{i phi} sin(theta/2))`` over the direction (theta, phi)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    return np.stack([np.cos(theta / 2) + 0j, np.exp(1j * phi) * np.sin(theta / 2)], axis=-1)


def measure_density(point: ChartPoint, measure_id: str, m: float = 1.0) -> float:
    """Positive density of an invariant measure in chart coordinates."""
    c = np.asarray(point.coords, dtype=float)
    if measure_id == "NU_HM":
        if point.chart_id != "HM":
            raise DomainError("NU_HM lives on chart HM")
        return float(1.0 / _energy(c[:3], m, "HM"))
    if measure_id == "OMEGA_CPLUS":
        if point.chart_id != "CPLUS":
            raise DomainError("OMEGA_CPLUS lives on chart CPLUS")
        r = float(np.linalg.norm(c[:3]))
        if r == 0.0:
            raise DomainError("the apex p = 0 is not on the cone chart")
        return 1.0 / r
    if measure_id == "MU_HM_P1":
        if point.chart_id not in ("HM_P1_S", "HM_P1_N"):
            raise DomainError("MU_HM_P1 lives on charts HM_P1_S / HM_P1_N")
        p, zeta = c[:3], complex(c[3], c[4])
        return float(_mu_chart_density(point.chart_id, p[None], np.array([zeta]), m)[0])
    raise DomainError(f"unknown measure {measure_id!r}")


def _mu_chart_density(chart: str, p: np.ndarray, zeta: np.ndarray, m: float) -> np.ndarray:
    K = chart_to_momentum("HM", p, m)
    z = _chart_spinor(chart, zeta)
    Kt = EPS @ np.conj(K) @ EPS
    D = np.einsum("ni,nij,nj->n", np.conj(z), Kt, z).real
    E = _energy(p, m, "HM")
    return 1.0 / (E * D * D)


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

def _bump(r: np.ndarray) -> np.ndarray:
    out = np.zeros_like(r, dtype=float)
    inside = r < 1.0
    ri = r[inside]
    out[inside] = np.exp(-1.0 / (1.0 - ri * ri))
    return out


@dataclass(frozen=True)
class Profile:
    """Compactly supported smooth profile in chart coordinates.

    ``kind="bump"`` is ``amplitude * exp(-1/(1 - r^2))`` with ``r`` the distance
    to ``center`` in units of ``radius``.  ``kind="table"`` multiplies that
    envelope by a cubic interpolant of ``table`` sampled on the regular grid
    spanning the bounding box (one table axis per real coordinate).
    """

    kind: str
    chart: str
    center: tuple
    radius: float
    amplitude: complex = 1.0
    table: np.ndarray | None = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in ("bump", "table"):
            raise ValueError(f"unknown profile kind {self.kind!r}")
        if self.chart not in CHARTS:
            raise DomainError(f"unknown chart {self.chart!r}")
        if not (self.radius > 0 and math.isfinite(self.radius)):
            raise DomainError("profile support is empty (radius must be positive)")
        want = 5 if self.chart.startswith("HM_P1") else 3
        if len(self.center) != want:
            raise ValueError(f"chart {self.chart} needs a {want}-dimensional center")
        if self.chart == "CPLUS":
            if np.linalg.norm(self.center) <= self.radius * (1.0 + 1e-9):
                raise DomainError("support touches the cone apex p = 0")
        if self.kind == "table":
            if self.table is None or np.ndim(self.table) != want:
                raise ValueError("table profiles need a value table with one axis per coordinate")
            if min(np.shape(self.table)) < 4:
                raise ValueError("cubic table interpolation needs at least 4 samples per axis")
        object.__setattr__(self, "_interp", self._make_interp())

    @property
    def dim(self) -> int:
        return len(self.center)

    def _make_interp(self):
        if self.kind != "table":
            return None
        tab = np.asarray(self.table, dtype=complex)
        axes = [
            np.linspace(c - self.radius, c + self.radius, n) for c, n in zip(self.center, tab.shape)
        ]
        re = RegularGridInterpolator(axes, tab.real, method="cubic")
        im = RegularGridInterpolator(axes, tab.imag, method="cubic")
        return re, im

    def __call__(self, coords) -> np.ndarray:
        coords = np.asarray(coords, dtype=float)
        c = np.asarray(self.center, dtype=float)
        r = np.linalg.norm(coords - c, axis=-1) / self.radius
        val = complex(self.amplitude) * _bump(r)
        if self.kind == "table":
            inside = r < 1.0
            re, im = self._interp
            mult = np.zeros(r.shape, dtype=complex)
            pts = coords[inside]
            mult[inside] = re(pts) + 1j * im(pts)
            val = val * mult
        return val

    def support_radius_fn(self):
        return lambda dirs: np.full(len(dirs), float(self.radius))

    @classmethod
    def from_dict(cls, d: dict) -> "Profile":
        amp = d.get("amplitude", [1.0, 0.0])
        amp = complex(amp[0], amp[1]) if isinstance(amp, (list, tuple)) else complex(amp)
        table = d.get("table")
        if table is not None:
            t = np.asarray(table, dtype=float)
            table = t[..., 0] + 1j * t[..., 1] if t.shape[-1] == 2 and t.ndim == len(d["center"]) + 1 else t
        return cls(
            kind=d.get("kind", "bump"),
            chart=d["chart"],
            center=tuple(float(v) for v in d["center"]),
            radius=float(d["radius"]),
            amplitude=amp,
            table=table,
        )

    def to_dict(self) -> dict:
        d = {
            "kind": self.kind,
            "chart": self.chart,
            "center": list(self.center),
            "radius": self.radius,
            "amplitude": [complex(self.amplitude).real, complex(self.amplitude).imag],
        }
        if self.table is not None:
            t = np.asarray(self.table, dtype=complex)
            d["table"] = np.stack([t.real, t.imag], axis=-1).tolist()
        return d


# ---------------------------------------------------------------------------
# grids
# ---------------------------------------------------------------------------

@dataclass
class NodeBatch:
    """A contiguous block of quadrature nodes.

    ``weight`` already includes the measure density.  ``p`` are momentum chart
    coordinates, ``K`` the momentum matrices; for ``MU_HM_P1`` grids ``spinor``
    holds a unit representative of the fibre point ``[a]`` and ``u`` its
    direction, and ``coords`` the raw chart coordinates.
    """

    p: np.ndarray
    K: np.ndarray
    weight: np.ndarray
    coords: np.ndarray
    spinor: np.ndarray | None = None
    u: np.ndarray | None = None

    def __len__(self) -> int:
        return len(self.weight)


def sphere_rule(n_theta: int, n_phi: int | None = None):
    """Gauss-Legendre in cos(theta) times the trapezoid rule in phi.

    Returns ``(theta, phi, weights)`` flattened, with weights summing to 4*pi.
    """
    n_phi = 2 * n_theta if n_phi is None else n_phi
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = (np.arange(n_phi) + 0.5) * (2.0 * math.pi / n_phi)
    T, F = np.meshgrid(theta, phi, indexing="ij")
    W = np.repeat(wx, n_phi) * (2.0 * math.pi / n_phi)
    return T.ravel(), F.ravel(), W


@dataclass
class QuadratureGrid:
    """Quadrature nodes for one invariant measure.

    Base nodes (momentum part) are stored explicitly; for ``MU_HM_P1`` with a
    spherical fibre rule the fibre nodes are kept separately and combined with
    the base nodes on the fly, fibre index innermost.
    """

    measure_id: str
    chart: str
    m: float
    coords: np.ndarray
    weights: np.ndarray
    orders: tuple
    fiber: tuple | None = None  # (theta, phi, weights) for the sphere fibre
    description: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.measure_id not in MEASURES:
            raise DomainError(f"unknown measure {self.measure_id!r}")
        self.coords = np.asarray(self.coords, dtype=float)
        self.weights = np.asarray(self.weights, dtype=float)
        if self.fiber is not None:
            th, ph, fw = self.fiber
            self._fspinor = spinor_of_direction(th, ph)
            self._fu = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], -1)
            self._fw = np.asarray(fw, dtype=float)
        if not np.sum(self.weights) > 0:
            raise QuadratureError("grid has no positive weight")

    @property
    def n_base(self) -> int:
        return len(self.weights)

    @property
    def n_fiber(self) -> int:
        return 1 if self.fiber is None else len(self._fw)

    @property
    def n_nodes(self) -> int:
        return self.n_base * self.n_fiber

    def batch(self, start: int, stop: int) -> NodeBatch:
        """Nodes ``start:stop`` in the documented lexicographic order."""
        nf = self.n_fiber
        idx = np.arange(start, stop)
        bi, fi = idx // nf, idx % nf
        c = self.coords[bi]
        w = self.weights[bi]
        if self.chart in ("HM_P1_S", "HM_P1_N"):
            p = c[:, :3]
            zeta = c[:, 3] + 1j * c[:, 4]
            z = _chart_spinor(self.chart, zeta)
            z = z / np.linalg.norm(z, axis=-1, keepdims=True)
            K = chart_to_momentum("HM", p, self.m)
            return NodeBatch(p, K, w, c, spinor=z, u=direction_of_spinor(z))
        p = c
        if self.fiber is None:
            return NodeBatch(p, chart_to_momentum(self.chart, p, self.m), w, c)
        # momentum data depend on the base node only: computed once per base node
        b0, b1 = int(bi[0]), int(bi[-1]) + 1
        Kb = chart_to_momentum(self.chart, self.coords[b0:b1], self.m)
        K = Kb[bi - b0]
        E = 0.5 * (K[:, 0, 0].real + K[:, 1, 1].real)
        u = self._fu[fi]
        fw = self._fw[fi] / (4.0 * (E - np.sum(p * u, axis=-1)) ** 2)
        return NodeBatch(p, K, w * fw, c, spinor=self._fspinor[fi], u=u)


def gq_threads() -> int:
    """Worker count from ``GQ_THREADS`` (default 1)."""
    raw = os.environ.get("GQ_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise QuadratureError(f"GQ_THREADS must be an integer, got {raw!r}") from None
    return max(1, n)


def pairwise_sum(parts: Sequence[np.ndarray]) -> np.ndarray:
    """Fixed-shape pairwise tree reduction."""
    parts = list(parts)
    if not parts:
        raise QuadratureError("nothing to reduce")
    while len(parts) > 1:
        nxt = [parts[i] + parts[i + 1] for i in range(0, len(parts) - 1, 2)]
        if len(parts) % 2:
            nxt.append(parts[-1])
        parts = nxt
    return parts[0]


def _chunk_size(grid: QuadratureGrid, out_size: int) -> int:
    # about 2^21 complex entries per chunk, rounded to a power of two
    target = max(64, (1 << 21) // max(1, out_size))
    size = 1 << int(math.floor(math.log2(target)))
    return max(64, size)


def integrate(
    f: Callable[[NodeBatch], np.ndarray],
    grid: QuadratureGrid,
    out_size: int = 1,
    threads: int | None = None,
) -> np.ndarray | complex:
    """``sum_i w_i f(node_i) density(node_i)`` with a deterministic reduction.

    ``f`` maps a :class:`NodeBatch` of ``n`` nodes to an array whose first axis
    has length ``n``.  ``out_size`` is a hint for the size of one node's value
    (it only sets the chunk size).
    """
    n = grid.n_nodes
    cs = _chunk_size(grid, out_size)
    bounds = [(s, min(s + cs, n)) for s in range(0, n, cs)]

    def work(b):
        batch = grid.batch(*b)
        vals = np.asarray(f(batch))
        if vals.shape[:1] != (len(batch),):
            raise QuadratureError("integrand must return one value per node")
        if not np.all(np.isfinite(vals)):
            raise QuadratureError("non-finite integrand value at a quadrature node")
        w = batch.weight.reshape((-1,) + (1,) * (vals.ndim - 1))
        return np.sum(vals * w, axis=0)

    nthreads = gq_threads() if threads is None else max(1, threads)
    if nthreads == 1 or len(bounds) == 1:
        partials = [work(b) for b in bounds]
    else:
        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            partials = list(ex.map(work, bounds))
    total = pairwise_sum(partials)
    return total[()] if np.ndim(total) == 0 else total


def _gl(order: int, lo: float, hi: float):
    x, w = np.polynomial.legendre.leggauss(order)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def _tensor(axes):
    nodes = np.stack(np.meshgrid(*[a[0] for a in axes], indexing="ij"), -1).reshape(-1, len(axes))
    w = np.ones(1)
    for a in axes:
        w = np.multiply.outer(w, a[1]).ravel()
    return nodes, w


def _base_density(chart: str, coords: np.ndarray, m: float, measure_id: str) -> np.ndarray:
    if measure_id == "OMEGA_CPLUS":
        return 1.0 / np.linalg.norm(coords, axis=-1)
    if measure_id == "NU_HM" or chart == "HM":
        return 1.0 / _energy(coords, m, "HM")
    zeta = coords[:, 3] + 1j * coords[:, 4]
    return _mu_chart_density(chart, coords[:, :3], zeta, m)


_DEFAULT_CHART = {"NU_HM": "HM", "OMEGA_CPLUS": "CPLUS"}


def _check_pair(chart: str, measure_id: str) -> None:
    ok = {
        "NU_HM": ("HM",),
        "OMEGA_CPLUS": ("CPLUS",),
        "MU_HM_P1": ("HM", "HM_P1_S", "HM_P1_N"),
    }[measure_id]
    if chart not in ok:
        raise DomainError(f"profile chart {chart} does not carry measure {measure_id}")


def build_grid(
    profile: Profile,
    order_per_axis: int = 48,
    measure_id: str | None = None,
    m: float = 1.0,
    fiber_order: int = 16,
) -> QuadratureGrid:
    """Tensor Gauss-Legendre grid over the bounding box of the profile support.

    Nodes outside the support simply carry a zero integrand.  For ``MU_HM_P1``
    with a momentum-only (``HM``) profile the fibre is covered by
    :func:`sphere_rule` with ``fiber_order`` polar nodes.
    """
    if measure_id is None:
        measure_id = _DEFAULT_CHART.get(profile.chart, "MU_HM_P1")
        if profile.chart == "HM":
            measure_id = "NU_HM"
    if measure_id not in MEASURES:
        raise DomainError(f"unknown measure {measure_id!r}")
    _check_pair(profile.chart, measure_id)
    if order_per_axis < 1:
        raise ValueError("order must be positive")
    axes = [_gl(order_per_axis, c - profile.radius, c + profile.radius) for c in profile.center]
    nodes, w = _tensor(axes)
    w = w * _base_density(profile.chart, nodes, m, measure_id if profile.chart != "HM" else "NU_HM")
    fiber = None
    if measure_id == "MU_HM_P1" and profile.chart == "HM":
        fiber = sphere_rule(fiber_order)
    orders = (order_per_axis,) * profile.dim + ((fiber_order, 2 * fiber_order) if fiber else ())
    return QuadratureGrid(
        measure_id, profile.chart, m, nodes, w, orders, fiber=fiber,
        description={"kind": "box", "order": order_per_axis, "fiber_order": fiber_order if fiber else None},
    )


def build_polar_grid(
    center,
    radius_fn: Callable[[np.ndarray], np.ndarray],
    orders: tuple[int, int, int],
    measure_id: str,
    m: float = 1.0,
    fiber_order: int = 16,
) -> QuadratureGrid:
    """Polar grid over a region star-shaped about ``center`` (momentum charts).

    ``radius_fn`` maps unit directions of shape (n, 3) to the distance from
    ``center`` to the support boundary.  Radial Gauss-Legendre, Gauss-Legendre
    in cos(theta), trapezoid in phi: spectrally accurate for smooth integrands
    vanishing to all orders at the boundary.
    """
    chart = "CPLUS" if measure_id == "OMEGA_CPLUS" else "HM"
    n_r, n_t, n_p = orders
    th, ph, wa = sphere_rule(n_t, n_p)
    dirs = np.stack([np.sin(th) * np.cos(ph), np.sin(th) * np.sin(ph), np.cos(th)], -1)
    R = np.asarray(radius_fn(dirs), dtype=float)
    x, wx = np.polynomial.legendre.leggauss(n_r)
    s = 0.5 * (x + 1.0)
    r = R[:, None] * s[None, :]
    wr = (0.5 * wx)[None, :] * R[:, None] * r * r
    nodes = np.asarray(center, float)[None, None, :] + r[..., None] * dirs[:, None, :]
    nodes = nodes.reshape(-1, 3)
    w = (wa[:, None] * wr).ravel()
    if chart == "CPLUS" and np.any(np.linalg.norm(nodes, axis=-1) == 0):
        raise DomainError("polar grid reaches the cone apex")
    w = w * _base_density(chart, nodes, m, "OMEGA_CPLUS" if chart == "CPLUS" else "NU_HM")
    fiber = sphere_rule(fiber_order) if measure_id == "MU_HM_P1" else None
    return QuadratureGrid(
        measure_id, chart, m, nodes, w, tuple(orders), fiber=fiber,
        description={"kind": "polar", "orders": list(orders)},
    )


def _spatial_action(A: np.ndarray, chart: str, p: np.ndarray, m: float) -> np.ndarray:
    K = chart_to_momentum(chart, p, m)
    K2 = A @ K @ np.conj(A.T)
    return np.stack([K2[..., 1, 0].real, K2[..., 1, 0].imag, 0.5 * (K2[..., 0, 0] - K2[..., 1, 1]).real], -1)


def build_pullback_grid(
    profile: Profile,
    A: np.ndarray,
    orders: tuple[int, int, int],
    measure_id: str,
    m: float = 1.0,
    fiber_order: int = 16,
) -> QuadratureGrid:
    """Polar grid over the support of ``f o A`` for a ball-supported profile.

    The support ``{p : |A.p - c| < R}`` is star-shaped about the preimage of
    the centre; its boundary along each ray is located by bisection.
    """
    chart = "CPLUS" if measure_id == "OMEGA_CPLUS" else "HM"
    A = np.asarray(A, dtype=complex)
    Ai = np.linalg.inv(A)
    c = np.asarray(profile.center, float)
    R = float(profile.radius)
    p0 = _spatial_action(Ai, chart, c[None], m)[0]

    def radius_fn(dirs):
        def outside(r):
            q = _spatial_action(A, chart, p0[None] + r[:, None] * dirs, m)
            return np.linalg.norm(q - c, axis=-1) >= R

        lo = np.zeros(len(dirs))
        hi = np.full(len(dirs), R)
        for _ in range(200):
            bad = ~outside(hi)
            if not bad.any():
                break
            hi[bad] *= 2.0
        for _ in range(70):
            mid = 0.5 * (lo + hi)
            o = outside(mid)
            hi = np.where(o, mid, hi)
            lo = np.where(o, lo, mid)
        return 0.5 * (lo + hi)

    return build_polar_grid(p0, radius_fn, orders, measure_id, m, fiber_order)
