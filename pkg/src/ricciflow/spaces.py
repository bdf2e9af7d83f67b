"""Invariant diagonal metrics and their Ricci eigenvalues.

Two families are covered: SU(3)-invariant metrics (t, s0, s1, s2) on the
Aloff-Wallach spaces W^7_{k1,k2}, and SU(5)-invariant metrics (x1, x2) on the
Berger space B^13.  The Aloff-Wallach family is parametrized continuously by
xi = k1/k2 in (0, 1]; with Gamma(xi) = xi^2 + xi + 1 the four Ricci
eigenvalues are

    r0 = 3t / (2 Gamma) * ((xi+1)^2/s0^2 + xi^2/s1^2 + 1/s2^2)
    r1 = 6/s0 - 3(xi+1)^2 t / (2 Gamma s0^2) + (s0/(s1 s2) - s1/(s0 s2) - s2/(s0 s1))
    r2 = 6/s1 - 3 xi^2   t / (2 Gamma s1^2) + (s1/(s0 s2) - s0/(s1 s2) - s2/(s0 s1))
    r3 = 6/s2 - 3        t / (2 Gamma s2^2) + (s2/(s0 s1) - s0/(s1 s2) - s1/(s0 s2))

All eigenvalues are homogeneous of degree -1 in the metric coefficients.
`ricci_from_structure` recomputes the same eigenvalues from the structure
constants [ijk] of the isotropy decomposition and serves as an independent
cross-check of the closed forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import permutations
from math import gcd

import numpy as np

__all__ = [
    "XiParam",
    "AWMetric",
    "BergerMetric",
    "RicciEigenvalues",
    "ricci_eigenvalues_aw",
    "ricci_eigenvalues_berger",
    "bracket_constants",
    "ricci_from_structure",
]


@dataclass(frozen=True)
class XiParam:
    """Continuous Aloff-Wallach parameter xi = k1/k2 in (0, 1].

    Instances built from an integer pair keep (k1, k2) around; `gamma` is the
    combination xi^2 + xi + 1 that replaces Gamma/k2^2 in the eigenvalue
    formulas.
    """

    xi: float
    k1: int | None = None
    k2: int | None = None

    def __post_init__(self):
        if not (0.0 < self.xi <= 1.0):
            raise ValueError(f"xi must lie in (0, 1], got {self.xi}")

    @classmethod
    def from_integers(cls, k1: int, k2: int) -> "XiParam":
        if not (0 < k1 <= k2):
            raise ValueError(f"need 0 < k1 <= k2, got ({k1}, {k2})")
        if gcd(k1, k2) != 1:
            raise ValueError(f"(k1, k2) must be coprime, got ({k1}, {k2})")
        return cls(xi=k1 / k2, k1=k1, k2=k2)

    @property
    def gamma(self) -> float:
        return self.xi * self.xi + self.xi + 1.0

    def integer_gamma(self) -> int | None:
        """k1^2 + k2^2 + k1 k2 when built from integers, else None."""
        if self.k1 is None or self.k2 is None:
            return None
        return self.k1 * self.k1 + self.k2 * self.k2 + self.k1 * self.k2


def _require_positive(**fields):
    for name, value in fields.items():
        if not value > 0.0:
            raise ValueError(f"{name} must be strictly positive, got {value}")


@dataclass(frozen=True)
class AWMetric:
    """Diagonal invariant metric (t, s0, s1, s2) on an Aloff-Wallach space."""

    t: float
    s0: float
    s1: float
    s2: float

    def __post_init__(self):
        _require_positive(t=self.t, s0=self.s0, s1=self.s1, s2=self.s2)

    def as_array(self) -> np.ndarray:
        return np.array([self.t, self.s0, self.s1, self.s2])

    def scaled(self, lam: float) -> "AWMetric":
        return AWMetric(lam * self.t, lam * self.s0, lam * self.s1, lam * self.s2)


@dataclass(frozen=True)
class BergerMetric:
    """Diagonal invariant metric (x1, x2) on the Berger space B^13."""

    x1: float
    x2: float

    def __post_init__(self):
        _require_positive(x1=self.x1, x2=self.x2)

    def as_array(self) -> np.ndarray:
        return np.array([self.x1, self.x2])

    def scaled(self, lam: float) -> "BergerMetric":
        return BergerMetric(lam * self.x1, lam * self.x2)


@dataclass(frozen=True)
class RicciEigenvalues:
    """Diagonal Ricci eigenvalues; the Berger family only has r1 and r2."""

    r0: float | None
    r1: float
    r2: float
    r3: float | None

    def as_tuple(self) -> tuple:
        if self.r0 is None:
            return (self.r1, self.r2)
        return (self.r0, self.r1, self.r2, self.r3)


def xi_value(xi) -> float:
    """Accept a XiParam or a bare float in (0, 1]."""
    x = xi.xi if isinstance(xi, XiParam) else float(xi)
    if not (0.0 < x <= 1.0):
        raise ValueError(f"xi must lie in (0, 1], got {x}")
    return x


def aw_eigenvalue_tuple(t, s0, s1, s2, xi):
    """Raw (r0, r1, r2, r3) for coefficients known to be positive.

    The four expressions are written in strictly parallel form so that
    r2 == r3 bit-for-bit whenever s1 == s2 and xi == 1.
    """
    g = xi * xi + xi + 1.0
    c0 = (xi + 1.0) * (xi + 1.0)
    c1 = xi * xi
    c2 = 1.0
    r0 = 3.0 * t / (2.0 * g) * (c0 / (s0 * s0) + c1 / (s1 * s1) + c2 / (s2 * s2))
    r1 = 6.0 / s0 - 3.0 * c0 * t / (2.0 * g * s0 * s0) + (s0 / (s1 * s2) - s1 / (s0 * s2) - s2 / (s0 * s1))
    r2 = 6.0 / s1 - 3.0 * c1 * t / (2.0 * g * s1 * s1) + (s1 / (s0 * s2) - s0 / (s1 * s2) - s2 / (s0 * s1))
    r3 = 6.0 / s2 - 3.0 * c2 * t / (2.0 * g * s2 * s2) + (s2 / (s0 * s1) - s0 / (s1 * s2) - s1 / (s0 * s2))
    return r0, r1, r2, r3


def ricci_eigenvalues_aw(m: AWMetric, xi) -> RicciEigenvalues:
    """Closed-form Ricci eigenvalues of (t, s0, s1, s2) at parameter xi."""
    r0, r1, r2, r3 = aw_eigenvalue_tuple(m.t, m.s0, m.s1, m.s2, xi_value(xi))
    return RicciEigenvalues(r0, r1, r2, r3)


def berger_eigenvalue_tuple(x1, x2):
    """Raw (r1, r2) for the Berger metric (x1, x2).

    The x2 = 1 slice is r1 = (8 + x1^2)/x1, r2 = 5(8 - x1)/4; general x2
    follows from degree -1 homogeneity: r_i(x1, x2) = r_i(x1/x2, 1)/x2.
    """
    r1 = (8.0 * x2 * x2 + x1 * x1) / (x1 * x2 * x2)
    r2 = 5.0 * (8.0 * x2 - x1) / (4.0 * x2 * x2)
    return r1, r2


def ricci_eigenvalues_berger(m: BergerMetric) -> RicciEigenvalues:
    r1, r2 = berger_eigenvalue_tuple(m.x1, m.x2)
    return RicciEigenvalues(None, r1, r2, None)


def bracket_constants(k1: int, k2: int) -> np.ndarray:
    """Structure constants [ijk] of W^7_{k1,k2} as a symmetric 4x4x4 array.

    Index 0 is the one-dimensional module scaled by t, indices 1..3 the
    two-dimensional modules scaled by s0, s1, s2.  With
    Gamma = k1^2 + k2^2 + k1 k2 the nonzero families are

        [110] = 6(k1+k2)^2 / Gamma    [220] = 6 k1^2 / Gamma
        [330] = 6 k2^2 / Gamma        [123] = 4

    together with all permutations; every other entry vanishes.
    """
    if not (0 < k1 <= k2):
        raise ValueError(f"need 0 < k1 <= k2, got ({k1}, {k2})")
    if gcd(k1, k2) != 1:
        raise ValueError(f"(k1, k2) must be coprime, got ({k1}, {k2})")
    gamma = k1 * k1 + k2 * k2 + k1 * k2
    table = np.zeros((4, 4, 4))
    families = {
        (1, 1, 0): 6.0 * (k1 + k2) ** 2 / gamma,
        (2, 2, 0): 6.0 * k1 * k1 / gamma,
        (3, 3, 0): 6.0 * k2 * k2 / gamma,
        (1, 2, 3): 4.0,
    }
    for index, value in families.items():
        for perm in set(permutations(index)):
            table[perm] = value
    return table


# Killing-form coefficient of su(3) relative to <X,Y> = -tr(XY)/2, and the
# module dimensions of the isotropy decomposition.
_B_COEFF = 12.0
_MODULE_DIMS = (1.0, 2.0, 2.0, 2.0)


def ricci_from_structure(k1: int, k2: int, m: AWMetric) -> RicciEigenvalues:
    """Eigenvalues from the general structure-constant formula.

        r_i = b_i/(2 x_i) - (1/2d_i) sum [ijk] x_j/(x_i x_k)
                          + (1/4d_i) sum [ijk] x_i/(x_j x_k)

    with b_i = 12, d = (1, 2, 2, 2) and x = (t, s0, s1, s2).  Independent of
    the closed forms in `ricci_eigenvalues_aw`; sums are compensated so the
    two paths agree to ~1e-13 relative.
    """
    table = bracket_constants(k1, k2)
    x = m.as_array()
    r = []
    for i in range(4):
        first = []
        second = []
        for j in range(4):
            for k in range(4):
                c = table[i, j, k]
                if c != 0.0:
                    first.append(c * x[j] / (x[i] * x[k]))
                    second.append(c * x[i] / (x[j] * x[k]))
        d = _MODULE_DIMS[i]
        r.append(math.fsum([_B_COEFF / (2.0 * x[i]),
                            -math.fsum(first) / (2.0 * d),
                            math.fsum(second) / (4.0 * d)]))
    return RicciEigenvalues(*r)
