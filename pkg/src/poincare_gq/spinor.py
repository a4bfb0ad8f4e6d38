"""Spinor algebra for SL(2,C) + H(2).

Conventions
-----------
A four-vector ``x = (x1, x2, x3, x4)`` is mapped to the hermitian matrix
``h(x) = x4*I + x1*s1 + x2*s2 + x3*s3`` so that ``det h(x)`` equals the
Minkowski square ``x4**2 - |x|**2``.  Group elements are pairs ``(A, H)`` with
``A`` unimodular and ``H`` hermitian, multiplied by
``(A, H)(B, K) = (AB, A K A^* + H)``.  Dual elements ``{a, k}`` are paired with
Lie algebra elements ``(b, m)`` through ``1/2 Tr(k eps conj(m) eps) - 2 Re Tr(ab)``.
"""
from __future__ import annotations

import contextlib
import contextvars
from dataclasses import dataclass

import numpy as np
import scipy.linalg

__all__ = [
    "I2", "EPS", "PAULI", "Tolerances", "tolerances", "current_tolerances",
    "ValidationError", "h_map", "h_inv", "minkowski", "eps_conj",
    "GroupElem", "AlgElem", "CoForm", "group_mul", "group_inv",
    "act_on_spacetime", "alg_exp", "pairing", "coadjoint", "adjoint",
    "dyn_vars", "coform_from_dyn_vars", "pauli_lubanski", "orbit_invariants",
    "BASIS", "random_traceless", "random_sl2", "random_group", "random_alg",
    "random_coform",
]

I2 = np.eye(2, dtype=complex)
EPS = np.array([[0.0, 1.0], [-1.0, 0.0]], dtype=complex)
PAULI = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)


class ValidationError(ValueError):
    """Raised when a matrix violates a structural invariant beyond tolerance."""


@dataclass(frozen=True)
class Tolerances:
    matrix: float = 1e-12
    classify: float = 1e-9


_TOL: contextvars.ContextVar[Tolerances] = contextvars.ContextVar(
    "poincare_gq_tolerances", default=Tolerances()
)


def current_tolerances() -> Tolerances:
    return _TOL.get()


@contextlib.contextmanager
def tolerances(**overrides: float):
    """Temporarily override tolerances, e.g. ``with tolerances(matrix=1e-9): ...``."""
    tok = _TOL.set(Tolerances(**{**current_tolerances().__dict__, **overrides}))
    try:
        yield _TOL.get()
    finally:
        _TOL.reset(tok)


# ---------------------------------------------------------------------------
# four-vectors and hermitian matrices
# ---------------------------------------------------------------------------

def h_map(x) -> np.ndarray:
    """Hermitian matrix of a four-vector; vectorised over leading axes."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 4:
        raise ValueError("four-vector must have 4 components")
    out = np.empty(x.shape[:-1] + (2, 2), dtype=complex)
    out[..., 0, 0] = x[..., 3] + x[..., 2]
    out[..., 1, 1] = x[..., 3] - x[..., 2]
    out[..., 0, 1] = x[..., 0] - 1j * x[..., 1]
    out[..., 1, 0] = x[..., 0] + 1j * x[..., 1]
    return out


def _check_herm(M: np.ndarray, tol: float | None = None) -> None:
    tol = current_tolerances().matrix if tol is None else tol
    dev = np.max(np.abs(M - np.conj(np.swapaxes(M, -1, -2))), initial=0.0)
    scale = max(1.0, float(np.max(np.abs(M), initial=0.0)))
    if dev > tol * scale:
        raise ValidationError(f"matrix is not hermitian (deviation {dev:.3e})")


def h_inv(M) -> np.ndarray:
    """Four-vector of a hermitian matrix (inverse of :func:`h_map`)."""
    M = np.asarray(M, dtype=complex)
    _check_herm(M)
    x = np.empty(M.shape[:-2] + (4,), dtype=float)
    x[..., 3] = 0.5 * (M[..., 0, 0].real + M[..., 1, 1].real)
    x[..., 2] = 0.5 * (M[..., 0, 0].real - M[..., 1, 1].real)
    off = 0.5 * (M[..., 1, 0] + np.conj(M[..., 0, 1]))
    x[..., 0] = off.real
    x[..., 1] = off.imag
    return x


def minkowski(x, y) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    return x[..., 3] * y[..., 3] - np.sum(x[..., :3] * y[..., :3], axis=-1)


def eps_conj(M) -> np.ndarray:
    """``eps conj(M) eps``, which equals minus the adjugate for 2x2 hermitian M."""
    return EPS @ np.conj(M) @ EPS


def _dag(M: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(M, -1, -2))


# ---------------------------------------------------------------------------
# value types
# ---------------------------------------------------------------------------

def _as2x2(M) -> np.ndarray:
    M = np.array(M, dtype=complex)
    if M.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got shape {M.shape}")
    return M


def _project_herm(M: np.ndarray, what: str) -> np.ndarray:
    try:
        _check_herm(M)
    except ValidationError as exc:
        raise ValidationError(f"{what}: {exc}") from None
    return 0.5 * (M + _dag(M))


def _project_traceless(a: np.ndarray, what: str) -> np.ndarray:
    tol = current_tolerances().matrix
    tr = np.trace(a)
    if abs(tr) > tol * max(1.0, float(np.max(np.abs(a)))):
        raise ValidationError(f"{what}: trace {abs(tr):.3e} exceeds tolerance")
    return a - 0.5 * tr * I2


def _project_sl2(A: np.ndarray) -> np.ndarray:
    tol = current_tolerances().matrix
    d = np.linalg.det(A)
    # relative to the natural scale of the determinant (|A|^2)
    scale = max(1.0, float(np.sum(np.abs(A) ** 2)))
    if abs(d - 1.0) > tol * scale:
        raise ValidationError(f"A: |det - 1| = {abs(d - 1):.3e} exceeds tolerance")
    return A / np.sqrt(d)


@dataclass(frozen=True, eq=False)
class GroupElem:
    A: np.ndarray
    H: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "A", _project_sl2(_as2x2(self.A)))
        object.__setattr__(self, "H", _project_herm(_as2x2(self.H), "H"))
        self.A.setflags(write=False)
        self.H.setflags(write=False)

    @classmethod
    def identity(cls) -> "GroupElem":
        return cls(I2, np.zeros((2, 2)))

    def __matmul__(self, other: "GroupElem") -> "GroupElem":
        return group_mul(self, other)


@dataclass(frozen=True, eq=False)
class AlgElem:
    a: np.ndarray
    h: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _project_traceless(_as2x2(self.a), "a"))
        object.__setattr__(self, "h", _project_herm(_as2x2(self.h), "h"))
        self.a.setflags(write=False)
        self.h.setflags(write=False)

    def __add__(self, other: "AlgElem") -> "AlgElem":
        return AlgElem(self.a + other.a, self.h + other.h)

    def __mul__(self, c: float) -> "AlgElem":
        return AlgElem(c * self.a, c * self.h)

    __rmul__ = __mul__

    def bracket(self, other: "AlgElem") -> "AlgElem":
        """Lie bracket ``([a,a'], a h' + h' a^* - a' h - h a'^*)``."""
        a, h, b, k = self.a, self.h, other.a, other.h
        return AlgElem(a @ b - b @ a, a @ k + k @ _dag(a) - b @ h - h @ _dag(b))


@dataclass(frozen=True, eq=False)
class CoForm:
    a: np.ndarray
    k: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _project_traceless(_as2x2(self.a), "a"))
        object.__setattr__(self, "k", _project_herm(_as2x2(self.k), "k"))
        self.a.setflags(write=False)
        self.k.setflags(write=False)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.a) ** 2) + np.sum(np.abs(self.k) ** 2)))

    def __sub__(self, other: "CoForm") -> "CoForm":
        return CoForm(self.a - other.a, self.k - other.k)


# ---------------------------------------------------------------------------
# group operations
# ---------------------------------------------------------------------------

def group_mul(g1: GroupElem, g2: GroupElem) -> GroupElem:
    A, H = g1.A, g1.H
    return GroupElem(A @ g2.A, A @ g2.H @ _dag(A) + H)


def group_inv(g: GroupElem) -> GroupElem:
    Ai = np.linalg.inv(g.A)
    return GroupElem(Ai, -Ai @ g.H @ _dag(Ai))


def act_on_spacetime(g: GroupElem, x) -> np.ndarray:
    return h_inv(g.A @ h_map(x) @ _dag(g.A) + g.H)


def alg_exp(X: AlgElem, t: float = 1.0) -> GroupElem:
    """Exponential ``(e^{ta}, int_0^t e^{sa} h e^{sa^*} ds)``.

    The integral is read off the exponential of the block matrix
    ``[[a, h], [0, -a^*]]``: its upper-right block is
    ``F = int_0^t e^{(t-s)a} h e^{-s a^*} ds``, and ``F e^{t a^*}`` is the
    required integral.  This is exact for diagonalisable and nilpotent ``a``
    alike, so no case split is needed.
    """
    M = np.zeros((4, 4), dtype=complex)
    M[:2, :2] = X.a
    M[:2, 2:] = X.h
    M[2:, 2:] = -_dag(X.a)
    E = scipy.linalg.expm(t * M)
    eA = E[:2, :2]
    H = E[:2, 2:] @ _dag(eA)
    return GroupElem(eA, 0.5 * (H + _dag(H)))


# ---------------------------------------------------------------------------
# dual pairing and coadjoint action
# ---------------------------------------------------------------------------

def pairing(alpha: CoForm, X: AlgElem) -> float:
    val = 0.5 * np.trace(alpha.k @ eps_conj(X.h)) - 2.0 * np.trace(alpha.a @ X.a).real
    return float(np.real(val))


def adjoint(g: GroupElem, X: AlgElem) -> AlgElem:
    """``Ad_g X``, the derivative of ``g exp(tX) g^{-1}`` at ``t = 0``."""
    A, H = g.A, g.H
    Ai = np.linalg.inv(A)
    b = A @ X.a @ Ai
    m = A @ X.h @ _dag(A) - b @ H - H @ _dag(b)
    return AlgElem(b, m)


def coadjoint(g: GroupElem, alpha: CoForm) -> CoForm:
    A, H = g.A, g.H
    Ai = np.linalg.inv(A)
    kk = A @ alpha.k @ _dag(A)
    a = A @ alpha.a @ Ai + 0.25 * (kk @ eps_conj(H) - H @ eps_conj(kk))
    return CoForm(a, kk)


# ---------------------------------------------------------------------------
# dynamical variables
# ---------------------------------------------------------------------------

def _vec3_of_herm_traceless(M: np.ndarray) -> np.ndarray:
    return h_inv(M)[:3]


def dyn_vars(alpha: CoForm) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Return ``(P, l, g)`` with ``h(P) = -k``, ``h(l,0) = i(a^*-a)``, ``h(g,0) = -(a+a^*)``."""
    a = alpha.a
    P = h_inv(-alpha.k)
    l = _vec3_of_herm_traceless(1j * (_dag(a) - a))
    g = _vec3_of_herm_traceless(-(a + _dag(a)))
    return P, l, g


def coform_from_dyn_vars(P, l, g) -> CoForm:
    """Inverse of :func:`dyn_vars`: ``a = -1/2 (h(g,0) - i h(l,0))``, ``k = -h(P)``."""
    hl = h_map(np.append(np.asarray(l, float), 0.0))
    hg = h_map(np.append(np.asarray(g, float), 0.0))
    return CoForm(-0.5 * (hg - 1j * hl), -h_map(P))


def pauli_lubanski(alpha: CoForm) -> np.ndarray:
    """Four-vector ``W`` with ``h(W) = i(ak - k a^*)``."""
    a, k = alpha.a, alpha.k
    return h_inv(1j * (a @ k - k @ _dag(a)))


def orbit_invariants(alpha: CoForm) -> tuple[float, float]:
    """``(|P|, |W|) = (det k, det h(W))``."""
    W = pauli_lubanski(alpha)
    return float(np.linalg.det(alpha.k).real), float(minkowski(W, W))


def _basis() -> dict[str, AlgElem]:
    Z = np.zeros((2, 2), dtype=complex)
    out: dict[str, AlgElem] = {}
    for j in range(3):
        out[f"P{j + 1}"] = AlgElem(Z, -PAULI[j])
        out[f"l{j + 1}"] = AlgElem(0.5j * PAULI[j], Z)
        out[f"g{j + 1}"] = AlgElem(0.5 * PAULI[j], Z)
    out["P4"] = AlgElem(Z, I2)
    return out


#: Generators of translations (P), rotations (l) and boosts (g).
BASIS: dict[str, AlgElem] = _basis()


# ---------------------------------------------------------------------------
# seeded random sampling for harnesses
# ---------------------------------------------------------------------------

def random_traceless(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    a = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
    a -= 0.5 * np.trace(a) * I2
    return scale * a


def random_sl2(rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    A = scipy.linalg.expm(random_traceless(rng, scale))
    return A / np.sqrt(np.linalg.det(A))


def random_group(rng: np.random.Generator, scale: float = 1.0) -> GroupElem:
    return GroupElem(random_sl2(rng, scale), h_map(rng.normal(size=4)))


def random_alg(rng: np.random.Generator, scale: float = 1.0) -> AlgElem:
    return AlgElem(random_traceless(rng, scale), h_map(scale * rng.normal(size=4)))


def random_coform(rng: np.random.Generator, scale: float = 1.0) -> CoForm:
    return CoForm(random_traceless(rng, scale), h_map(scale * rng.normal(size=4)))
