"""Positive-sectional-curvature cone: boundary scale t_A and classifiers.

A diagonal Aloff-Wallach metric (t, s) with s in the admissible region has
positive sectional curvature exactly when t < t_A(s, xi).  The boundary scale
is t_A = (2/9) <v, A~^-1 v>^-1, built from the symmetric matrix A~(s) with

    a~_j = 4/s_j
    b~_j = -sigma(s)/(s0 s1 s2) + (s_{j-1} - s_j + s_{j+1})/(s_{j-1} s_{j+1})
    sigma(s) = 2 s1 s2 + 2 s0 s2 + 2 s0 s1 - s0^2 - s1^2 - s2^2

(indices cyclic mod 3) and the unit-circle direction vector

    v(s, xi) = (-(1+xi), xi, 1) / (s_j * sqrt(2(xi^2+xi+1))) componentwise.

A~ is invertible away from the round diagonal inside {sigma > 0}; on the
s1 = s2 slice everything collapses to the closed form t_A(x, s, s)
= x(4s - x)/(3s).  The Berger cone is simply x1 < 2 x2.
"""

from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SingularMatrixError
from .spaces import BergerMetric, xi_value

__all__ = [
    "STriple",
    "ConeClass",
    "ConeVerdict",
    "sigma",
    "is_round_diagonal",
    "in_omega_sigma",
    "in_d_sigma",
    "a_tilde",
    "a_tilde_partial",
    "v_vector",
    "v_partial",
    "t_a",
    "t_a_closed",
    "a_tilde_inverse_slice",
    "classify_2param",
    "classify_3param",
    "classify_berger",
    "classify_aw_slice",
    "normalized_region",
]

# Relative width of the numerical round diagonal {s0 = s1 = s2}.
ROUND_DIAGONAL_RTOL = 1e-13
# Condition-number ceiling before the 3x3 solve is declared singular.
CONDITION_LIMIT = 1e12

# Extended precision for the inner 3x3 solve when the platform provides it;
# plain double leaves ~5e-12 relative error next to the round diagonal.
_SOLVE_DTYPE = np.longdouble if np.finfo(np.longdouble).eps < 1e-18 else np.float64


@dataclass(frozen=True)
class STriple:
    """Positive triple (s0, s1, s2) of scale factors."""

    s0: float
    s1: float
    s2: float

    def __post_init__(self):
        for name in ("s0", "s1", "s2"):
            if not getattr(self, name) > 0.0:
                raise ValueError(f"{name} must be strictly positive")

    def as_array(self) -> np.ndarray:
        return np.array([self.s0, self.s1, self.s2])

    @property
    def in_omega_sigma(self) -> bool:
        return sigma(self) > 0.0

    @property
    def in_d_sigma(self) -> bool:
        return self.in_omega_sigma and not is_round_diagonal(self)


def _s_array(s) -> np.ndarray:
    arr = s.as_array() if isinstance(s, STriple) else np.asarray(s, dtype=float)
    if arr.shape != (3,):
        raise ValueError(f"expected a triple, got shape {arr.shape}")
    if not np.all(arr > 0.0):
        raise ValueError(f"scale factors must be strictly positive, got {arr}")
    return arr


def sigma(s) -> float:
    """Quadratic sigma(s) = 2s1s2 + 2s0s2 + 2s0s1 - s0^2 - s1^2 - s2^2."""
    s0, s1, s2 = _s_array(s)
    return 2 * s1 * s2 + 2 * s0 * s2 + 2 * s0 * s1 - s0 * s0 - s1 * s1 - s2 * s2


def is_round_diagonal(s) -> bool:
    arr = _s_array(s)
    mean = arr.mean()
    return bool(np.max(np.abs(arr - mean)) <= ROUND_DIAGONAL_RTOL * mean)


def in_omega_sigma(s) -> bool:
    return sigma(s) > 0.0


def in_d_sigma(s) -> bool:
    return in_omega_sigma(s) and not is_round_diagonal(s)


def _a_tilde_entries(arr: np.ndarray) -> np.ndarray:
    sig = (2 * arr[1] * arr[2] + 2 * arr[0] * arr[2] + 2 * arr[0] * arr[1]
           - arr[0] * arr[0] - arr[1] * arr[1] - arr[2] * arr[2])
    prod = arr[0] * arr[1] * arr[2]
    b = np.empty(3, dtype=arr.dtype)
    for j in range(3):
        sm, sj, sp = arr[(j - 1) % 3], arr[j], arr[(j + 1) % 3]
        b[j] = -sig / prod + (sm - sj + sp) / (sm * sp)
    return np.array([
        [4 / arr[0], b[2], b[1]],
        [b[2], 4 / arr[1], b[0]],
        [b[1], b[0], 4 / arr[2]],
    ], dtype=arr.dtype)


def a_tilde(s) -> np.ndarray:
    """Symmetric 3x3 matrix A~(s); warns when s is outside D_sigma."""
    arr = _s_array(s)
    if not in_d_sigma(arr):
        warnings.warn("A~ evaluated outside D_sigma; matrix may be singular",
                      RuntimeWarning, stacklevel=2)
    return _a_tilde_entries(arr)


def a_tilde_partial(s, i: int) -> np.ndarray:
    """Analytic partial derivative of A~(s) with respect to s_i."""
    if i not in (0, 1, 2):
        raise ValueError("component index must be 0, 1 or 2")
    arr = _s_array(s)
    sig = sigma(arr)
    prod = arr[0] * arr[1] * arr[2]
    dsig = 2 * (arr.sum() - arr[i]) - 2 * arr[i]
    db = np.empty(3)
    for j in range(3):
        sm, sj, sp = arr[(j - 1) % 3], arr[j], arr[(j + 1) % 3]
        num = sm - sj + sp
        # common part: d/ds_i of -sigma/(s0 s1 s2)
        d = -dsig / prod + sig / (prod * arr[i])
        if i == j:
            d += -1.0 / (sm * sp)
        if i == (j - 1) % 3:
            d += 1.0 / (sm * sp) - num / (sm * sm * sp)
        if i == (j + 1) % 3:
            d += 1.0 / (sm * sp) - num / (sm * sp * sp)
        db[j] = d
    da = np.zeros(3)
    da[i] = -4.0 / (arr[i] * arr[i])
    return np.array([
        [da[0], db[2], db[1]],
        [db[2], da[1], db[0]],
        [db[1], db[0], da[2]],
    ])


def v_vector(s, xi) -> np.ndarray:
    """Direction vector v(s, xi) entering the boundary scale t_A."""
    arr = _s_array(s)
    x = xi_value(xi)
    den = np.sqrt(2.0 * (x * x + x + 1.0))
    return np.array([-(1.0 + x) / (arr[0] * den),
                     x / (arr[1] * den),
                     1.0 / (arr[2] * den)])


def v_partial(s, xi, i: int) -> np.ndarray:
    """Partial derivative of v with respect to s_i (one nonzero component)."""
    if i not in (0, 1, 2):
        raise ValueError("component index must be 0, 1 or 2")
    arr = _s_array(s)
    v = v_vector(arr, xi)
    out = np.zeros(3)
    out[i] = -v[i] / arr[i]
    return out


def _solve3_pivoted(matrix: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Gaussian elimination with partial pivoting; dtype-generic (3x3)."""
    a = matrix.copy()
    b = rhs.copy()
    for k in range(2):
        p = k + int(np.argmax(np.abs(a[k:, k])))
        if p != k:
            a[[k, p]] = a[[p, k]]
            b[[k, p]] = b[[p, k]]
        for i in range(k + 1, 3):
            m = a[i, k] / a[k, k]
            a[i, k:] -= m * a[k, k:]
            b[i] -= m * b[k]
    out = np.empty_like(b)
    for i in (2, 1, 0):
        out[i] = (b[i] - a[i, i + 1:] @ out[i + 1:]) / a[i, i]
    return out


def t_a(s, xi) -> float:
    """Boundary scale t_A(s, xi) = (2/9) <v, A~^-1 v>^-1.

    Returns 0 on the round diagonal (within ROUND_DIAGONAL_RTOL).  Solves
    A~ w = v by a pivoted 3x3 elimination (no explicit inverse) and raises
    SingularMatrixError when cond(A~) exceeds 1e12, which can only happen
    outside D_sigma.
    """
    arr = _s_array(s)
    x = xi_value(xi)
    if is_round_diagonal(arr):
        return 0.0
    cond = np.linalg.cond(_a_tilde_entries(arr))
    if not np.isfinite(cond) or cond > CONDITION_LIMIT:
        raise SingularMatrixError(f"A~({arr}) has condition {cond:.3e} > {CONDITION_LIMIT:.0e}")
    wide = arr.astype(_SOLVE_DTYPE)
    matrix = _a_tilde_entries(wide)
    v = v_vector(arr, x).astype(_SOLVE_DTYPE)
    w = _solve3_pivoted(matrix, v)
    qform = v @ w
    return float(_SOLVE_DTYPE(2.0) / _SOLVE_DTYPE(9.0) / qform)


def t_a_closed(x: float, s: float) -> float:
    """Closed form t_A(x, s, s) = x(4s - x)/(3s) on the s1 = s2 slice.

    Only certified where sigma(x, s, s) = x(4s - x) > 0, i.e. x < 4s.
    """
    if not (x > 0.0 and s > 0.0):
        raise DomainError(f"need x > 0 and s > 0, got ({x}, {s})")
    if x >= 4.0 * s:
        raise DomainError(f"x = {x} >= 4s = {4 * s}: sigma <= 0, closed form not certified")
    return x * (4.0 * s - x) / (3.0 * s)


def a_tilde_inverse_slice(x: float, s: float) -> np.ndarray:
    """Closed-form inverse of A~(x, s, s), prefactor 1/((s-x)^2 (4s-x))."""
    if not (x > 0.0 and s > 0.0):
        raise DomainError(f"need x > 0 and s > 0, got ({x}, {s})")
    denom = (s - x) ** 2 * (4.0 * s - x)
    if denom == 0.0:
        raise DomainError(f"inverse prefactor vanishes at (x, s) = ({x}, {s})")
    diag0 = s**3 * x
    off0 = s * s * x * (3.0 * s - x) / 2.0
    diag = s * (16.0 * s**3 - 9.0 * s * s * x + 6.0 * s * x * x - x**3) / 12.0
    off = s * (8.0 * s**3 + 9.0 * s * s * x - 6.0 * s * x * x + x**3) / 12.0
    return np.array([
        [diag0, off0, off0],
        [off0, diag, off],
        [off0, off, diag],
    ]) / denom


class ConeClass(enum.Enum):
    POSITIVELY_CURVED = "PositivelyCurved"
    HAS_NONPOSITIVE_PLANE = "HasNonpositivePlane"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class ConeVerdict:
    """Classification plus the signed margin of the deciding inequality."""

    classification: ConeClass
    margin: float

    def __post_init__(self):
        if self.classification is ConeClass.POSITIVELY_CURVED and not self.margin > 0.0:
            raise ValueError("PositivelyCurved requires margin > 0")
        if self.classification is ConeClass.HAS_NONPOSITIVE_PLANE and self.margin > 0.0:
            raise ValueError("HasNonpositivePlane requires margin <= 0")
        if self.classification is ConeClass.UNKNOWN and self.margin != 0.0:
            raise ValueError("Unknown carries margin 0 by convention")


def _verdict_from_margin(margin: float) -> ConeVerdict:
    if margin > 0.0:
        return ConeVerdict(ConeClass.POSITIVELY_CURVED, margin)
    return ConeVerdict(ConeClass.HAS_NONPOSITIVE_PLANE, margin)


def classify_2param(t: float, s: float) -> ConeVerdict:
    """Metrics (t, t, s, s) on W^7_{1,1}: positively curved iff t < s."""
    if not (t > 0.0 and s > 0.0):
        raise ValueError(f"need t, s > 0, got ({t}, {s})")
    return _verdict_from_margin(s - t)


def classify_3param(t: float, x: float, s: float) -> ConeVerdict:
    """Metrics (t, x, s, s) on W^7_{1,1}.

    After rescaling to s = 1: certified for x in (0, 1), where the verdict
    is t < t_A against t >= t_A (boundary included on the non-positive
    side).  For x >= s nothing is certified and the verdict is Unknown.
    """
    if not (t > 0.0 and x > 0.0 and s > 0.0):
        raise ValueError(f"need t, x, s > 0, got ({t}, {x}, {s})")
    t_hat, x_hat = t / s, x / s
    if x_hat >= 1.0:
        return ConeVerdict(ConeClass.UNKNOWN, 0.0)
    return _verdict_from_margin(t_a_closed(x_hat, 1.0) - t_hat)


def classify_berger(m) -> ConeVerdict:
    """Berger metrics: positively curved iff x1 < 2 x2."""
    x1, x2 = (m.x1, m.x2) if isinstance(m, BergerMetric) else m
    if not (x1 > 0.0 and x2 > 0.0):
        raise ValueError(f"need x1, x2 > 0, got ({x1}, {x2})")
    return _verdict_from_margin(2.0 * x2 - x1)


def classify_aw_slice(state, xi, slice_rtol: float = 0.05) -> ConeVerdict:
    """Classify a 4-tuple (t, s0, s1, s2) near the s1 = s2 slice at any xi.

    The certified slice statement (x in (0, s), t vs t_A) extends to an open
    neighbourhood; `slice_rtol` bounds the accepted relative spread
    |s1 - s2| / mean.  Off-slice beyond that, or with s0 outside (0, mean),
    the verdict is Unknown.
    """
    t, s0, s1, s2 = (float(c) for c in state)
    if min(t, s0, s1, s2) <= 0.0:
        raise ValueError(f"state must be strictly positive, got {state}")
    s_mean = 0.5 * (s1 + s2)
    if abs(s1 - s2) > slice_rtol * s_mean:
        return ConeVerdict(ConeClass.UNKNOWN, 0.0)
    if s0 >= s_mean:
        return ConeVerdict(ConeClass.UNKNOWN, 0.0)
    return _verdict_from_margin(t_a((s0, s1, s2), xi) - t)


def normalized_region(x: float, s: float) -> str:
    """Region of the unit-volume plane: G (sec > 0), P (non-positive plane),
    W (undetermined).  Ties 4x^3 s^4 - x^4 s^3 = 3 belong to P."""
    if not (x > 0.0 and s > 0.0):
        raise ValueError(f"need x, s > 0, got ({x}, {s})")
    q = 4.0 * x**3 * s**4 - x**4 * s**3
    if 3.0 >= q:
        return "P"
    return "G" if x < s else "W"
