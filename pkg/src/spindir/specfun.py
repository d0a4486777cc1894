"""Special functions: factorials, Jacobi polynomials and their roots,
Gauss-Legendre quadrature, Wigner small-d elements and Clebsch-Gordan
coefficients.

Spin labels are carried as :class:`HalfInteger` (twice the value stored as an
int) so that half-integer arithmetic and comparisons are exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache, total_ordering

import numpy as np

from .linalg import SymTridiagonal, eigenvalues

__all__ = [
    "HalfInteger",
    "QuadratureRule",
    "as_half",
    "clebsch_gordan",
    "gauss_legendre",
    "jacobi_deriv",
    "jacobi_eval",
    "jacobi_roots",
    "log_factorial",
    "wigner_small_d",
    "wigner_small_d_diag",
    "wigner_small_d_sum",
]


@total_ordering
@dataclass(frozen=True)
class HalfInteger:
    twice_value: int

    def __post_init__(self):
        if isinstance(self.twice_value, bool) or int(self.twice_value) != self.twice_value:
            raise TypeError(f"twice_value must be an integer, got {self.twice_value!r}")
        object.__setattr__(self, "twice_value", int(self.twice_value))

    @classmethod
    def of(cls, x) -> "HalfInteger":
        """Build from an int, a Fraction, or a float that is a multiple of 1/2."""
        if isinstance(x, HalfInteger):
            return x
        twice = Fraction(x) * 2 if not isinstance(x, float) else Fraction(x).limit_denominator(2) * 2
        if twice.denominator != 1 or (isinstance(x, float) and float(twice) != 2 * x):
            raise ValueError(f"{x!r} is not a multiple of 1/2")
        return cls(int(twice))

    @property
    def is_integer(self) -> bool:
        return self.twice_value % 2 == 0

    def __float__(self) -> float:
        return self.twice_value / 2

    def __add__(self, other):
        return HalfInteger(self.twice_value + as_half(other).twice_value)

    __radd__ = __add__

    def __sub__(self, other):
        return HalfInteger(self.twice_value - as_half(other).twice_value)

    def __rsub__(self, other):
        return as_half(other) - self

    def __neg__(self):
        return HalfInteger(-self.twice_value)

    def __abs__(self):
        return HalfInteger(abs(self.twice_value))

    def __eq__(self, other):
        try:
            return self.twice_value == as_half(other).twice_value
        except (TypeError, ValueError):
            return NotImplemented

    def __lt__(self, other):
        return self.twice_value < as_half(other).twice_value

    def __hash__(self):
        return hash(("HalfInteger", self.twice_value))

    def __int__(self):
        if not self.is_integer:
            raise ValueError(f"{self} is not an integer")
        return self.twice_value // 2

    def __str__(self):
        return str(self.twice_value // 2) if self.is_integer else f"{self.twice_value}/2"

    def __repr__(self):
        return f"HalfInteger({self})"


def as_half(x) -> HalfInteger:
    return HalfInteger.of(x)


_EXACT_LOG_FACTORIALS = tuple(math.log(math.factorial(k)) for k in range(21))


def log_factorial(n: int) -> float:
    """ln(n!) for a non-negative integer n."""
    if n < 0 or int(n) != n:
        raise ValueError(f"log_factorial needs a non-negative integer, got {n!r}")
    n = int(n)
    if n < len(_EXACT_LOG_FACTORIALS):
        return _EXACT_LOG_FACTORIALS[n]
    return math.lgamma(n + 1)


def jacobi_eval(n: int, a: int, b: int, x):
    """P_n^{(a,b)}(x) by the three-term recurrence. Works elementwise on arrays."""
    if n < 0:
        raise ValueError("degree must be non-negative")
    x = np.asarray(x, dtype=float)
    p_prev = np.ones_like(x)
    if n == 0:
        return p_prev if p_prev.ndim else float(p_prev)
    p = (a + 1) + (a + b + 2) * (x - 1) / 2
    for k in range(2, n + 1):
        c = 2 * k + a + b
        a1 = 2 * k * (k + a + b) * (c - 2)
        a2 = (c - 1) * (a * a - b * b)
        a3 = (c - 1) * c * (c - 2)
        a4 = 2 * (k + a - 1) * (k + b - 1) * c
        p_prev, p = p, ((a2 + a3 * x) * p - a4 * p_prev) / a1
    return p if p.ndim else float(p)


def jacobi_deriv(n: int, a: int, b: int, x):
    """d/dx P_n^{(a,b)}(x)."""
    if n == 0:
        return np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0
    return (n + a + b + 1) / 2 * jacobi_eval(n - 1, a + 1, b + 1, x)


def _jacobi_matrix(n: int, a: int, b: int) -> SymTridiagonal:
    k = np.arange(n, dtype=float)
    s = 2 * k + a + b
    with np.errstate(divide="ignore", invalid="ignore"):
        diag = (b * b - a * a) / (s * (s + 2))
    diag[0] = (b - a) / (a + b + 2)
    k = k[1:]
    s = s[1:]
    off = np.sqrt(4 * k * (k + a) * (k + b) * (k + a + b) / (s * s * (s + 1) * (s - 1)))
    return SymTridiagonal(diag, off)


@lru_cache(maxsize=512)
def _jacobi_roots_cached(n: int, a: int, b: int) -> tuple[float, ...]:
    x = eigenvalues(_jacobi_matrix(n, a, b))
    # one Newton step against the recurrence
    x = x - jacobi_eval(n, a, b, x) / jacobi_deriv(n, a, b, x)
    return tuple(np.clip(np.sort(x), -1.0, 1.0))


def jacobi_roots(n: int, a: int, b: int) -> np.ndarray:
    """All roots of P_n^{(a,b)}, ascending (Golub-Welsch plus a Newton polish)."""
    if n < 1:
        raise ValueError("degree must be at least 1")
    return np.array(_jacobi_roots_cached(int(n), int(a), int(b)))


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, f) -> float:
        return float(np.dot(self.weights, f(self.nodes)))


@lru_cache(maxsize=256)
def gauss_legendre(order: int) -> QuadratureRule:
    """Gauss-Legendre rule on [-1, 1], exact through degree 2*order - 1."""
    if order < 1:
        raise ValueError("order must be at least 1")
    x = jacobi_roots(order, 0, 0)
    dp = jacobi_deriv(order, 0, 0, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)
    x.flags.writeable = False
    w.flags.writeable = False
    return QuadratureRule(x, w, order)


def _doubled(*spins) -> list[int]:
    return [as_half(s).twice_value for s in spins]


def _check_projection(j2: int, m2: int, name: str):
    if abs(m2) > j2 or (j2 - m2) % 2:
        raise ValueError(f"invalid projection {name}={m2}/2 for j={j2}/2")


def wigner_small_d(j, mp, m, beta):
    """Wigner d^j_{mp,m}(beta) for a rotation by `beta` about the y axis.

    Evaluated through the Jacobi-polynomial form, which stays accurate for
    large j where the alternating factorial sum cancels catastrophically.
    Accepts scalar or array `beta`.
    """
    j2, mp2, m2 = _doubled(j, mp, m)
    _check_projection(j2, mp2, "mp")
    _check_projection(j2, m2, "m")
    mu = abs(m2 - mp2) // 2
    nu = abs(m2 + mp2) // 2
    s = (j2 - max(abs(m2), abs(mp2))) // 2
    log_c = 0.5 * (log_factorial(s) + log_factorial(s + mu + nu)
                   - log_factorial(s + mu) - log_factorial(s + nu))
    sign = -1.0 if (mp2 > m2 and ((mp2 - m2) // 2) % 2) else 1.0
    beta = np.asarray(beta, dtype=float)
    half = beta / 2
    out = (sign * math.exp(log_c) * np.sin(half) ** mu * np.cos(half) ** nu
           * jacobi_eval(s, mu, nu, np.cos(beta)))
    return out if np.ndim(out) else float(out)


def wigner_small_d_diag(j, m, cos_beta):
    """d^j_{m,m} as a function of cos(beta), for m >= 0.

    Equals ((1+u)/2)^m P_{j-m}^{(0,2m)}(u) with u = cos(beta).
    """
    j2, m2 = _doubled(j, m)
    _check_projection(j2, m2, "m")
    if m2 < 0:
        return wigner_small_d_diag(j, -as_half(m), cos_beta)
    u = np.asarray(cos_beta, dtype=float)
    out = ((1 + u) / 2) ** (m2 / 2) * jacobi_eval((j2 - m2) // 2, 0, m2, u)
    return out if np.ndim(out) else float(out)


def wigner_small_d_sum(j, mp, m, beta):
    """d^j_{mp,m}(beta) from the explicit factorial sum.

    Kept as an independent cross-check of :func:`wigner_small_d`; loses
    accuracy once 2j exceeds roughly 40.
    """
    j2, mp2, m2 = _doubled(j, mp, m)
    _check_projection(j2, mp2, "mp")
    _check_projection(j2, m2, "m")
    jpm, jmm = (j2 + m2) // 2, (j2 - m2) // 2
    jpmp, jmmp = (j2 + mp2) // 2, (j2 - mp2) // 2
    dm = (mp2 - m2) // 2
    log_pre = 0.5 * (log_factorial(jpmp) + log_factorial(jmmp)
                     + log_factorial(jpm) + log_factorial(jmm))
    beta = np.asarray(beta, dtype=float)
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    total = np.zeros_like(beta)
    for k in range(max(0, -dm), min(jpm, jmmp) + 1):
        log_den = (log_factorial(jpm - k) + log_factorial(k)
                   + log_factorial(dm + k) + log_factorial(jmmp - k))
        sign = -1.0 if (dm + k) % 2 else 1.0
        total = total + sign * math.exp(log_pre - log_den) * c ** (jpm + jmmp - 2 * k) * s ** (dm + 2 * k)
    return total if np.ndim(total) else float(total)


def clebsch_gordan(j1, j2, m1, m2, J, M) -> float:
    """Condon-Shortley <j1 m1; j2 m2 | J M> via the Racah formula."""
    a, b, ma, mb, c, mc = _doubled(j1, j2, m1, m2, J, M)
    if ma + mb != mc:
        return 0.0
    if not (abs(a - b) <= c <= a + b) or (a + b + c) % 2:
        return 0.0
    for jj, mm in ((a, ma), (b, mb), (c, mc)):
        if abs(mm) > jj or (jj - mm) % 2:
            return 0.0
    h = lambda v: v // 2  # noqa: E731  (all combinations below are even)
    lf = log_factorial
    log_pre = 0.5 * (math.log(c + 1) + lf(h(c + a - b)) + lf(h(c - a + b))
                     + lf(h(a + b - c)) - lf(h(a + b + c) + 1))
    log_pre += 0.5 * (lf(h(c + mc)) + lf(h(c - mc)) + lf(h(a - ma)) + lf(h(a + ma))
                      + lf(h(b - mb)) + lf(h(b + mb)))
    total = 0.0
    k_min = max(0, h(b - c - ma), h(a - c + mb))
    k_max = min(h(a + b - c), h(a - ma), h(b + mb))
    for k in range(k_min, k_max + 1):
        log_den = (lf(k) + lf(h(a + b - c) - k) + lf(h(a - ma) - k) + lf(h(b + mb) - k)
                   + lf(h(c - b + ma) + k) + lf(h(c - a - mb) + k))
        total += (-1.0) ** k * math.exp(log_pre - log_den)
    return total
