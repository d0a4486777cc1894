"""Symmetric tridiagonal eigenproblems.

Eigenvalues come from Sturm-sequence bisection, run for all eigenvalues at
once; the leading eigenvector comes from shifted inverse iteration.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

__all__ = [
    "ConvergenceError",
    "SymTridiagonal",
    "eigenvalues",
    "leading_eigenpair",
    "sturm_count",
]


class ConvergenceError(RuntimeError):
    """Inverse iteration failed to produce an accurate eigenvector."""


@dataclass(frozen=True)
class SymTridiagonal:
    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float).reshape(-1)
        e = np.array(self.offdiag, dtype=float).reshape(-1)
        if d.size < 1:
            raise ValueError("matrix must be at least 1x1")
        if e.size != d.size - 1:
            raise ValueError(f"offdiag has length {e.size}, expected {d.size - 1}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("entries must be finite")
        d.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def n(self) -> int:
        return self.diag.size

    def norm_inf(self) -> float:
        row = np.abs(self.diag).copy()
        row[:-1] += np.abs(self.offdiag)
        row[1:] += np.abs(self.offdiag)
        return float(row.max())

    def matvec(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    @classmethod
    def from_dense(cls, a, atol: float = 1e-12) -> "SymTridiagonal":
        """Compact a dense symmetric matrix, refusing if it is not tridiagonal."""
        a = np.asarray(a, dtype=float)
        n = a.shape[0]
        if a.shape != (n, n):
            raise ValueError("matrix must be square")
        if not np.allclose(a, a.T, rtol=0.0, atol=atol):
            raise ValueError("matrix is not symmetric")
        band = np.abs(np.subtract.outer(np.arange(n), np.arange(n))) > 1
        if n > 2 and np.max(np.abs(a[band])) >= atol:
            raise ValueError(
                f"matrix is not tridiagonal: off-band entry {np.max(np.abs(a[band])):.3e}"
            )
        return cls(np.diag(a).copy(), np.diag(a, 1).copy())


def sturm_count(t: SymTridiagonal, x) -> np.ndarray:
    """Number of eigenvalues strictly below each shift in `x`."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    tiny = np.finfo(float).tiny ** 0.5
    e2 = t.offdiag ** 2
    q = t.diag[0] - x
    q = np.where(q == 0.0, -tiny, q)
    count = (q < 0).astype(np.int64)
    for i in range(1, t.n):
        q = t.diag[i] - x - e2[i - 1] / q
        q = np.where(q == 0.0, -tiny, q)
        count += q < 0
    return count


def eigenvalues(t: SymTridiagonal) -> np.ndarray:
    """All eigenvalues in ascending order, by bisection on Sturm counts.

    Each eigenvalue is bracketed by the Gershgorin interval and bisected to an
    absolute width of ``1e-13 * max(1, ||t||_inf)``.
    """
    n = t.n
    scale = max(1.0, t.norm_inf())
    tol = 1e-13 * scale
    radius = np.zeros(n)
    radius[:-1] += np.abs(t.offdiag)
    radius[1:] += np.abs(t.offdiag)
    lo = np.full(n, float(np.min(t.diag - radius)) - tol)
    hi = np.full(n, float(np.max(t.diag + radius)) + tol)
    k = np.arange(n)
    # eigenvalue k (0-based) is the smallest x with count(x) > k
    for _ in range(200):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        below = sturm_count(t, mid) > k
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return np.sort(0.5 * (lo + hi))


def _solve_shifted(t: SymTridiagonal, shift: float, b: np.ndarray) -> np.ndarray:
    n = t.n
    if n == 1:
        return b / (t.diag[0] - shift)
    ab = np.zeros((3, n))
    ab[0, 1:] = t.offdiag
    ab[1] = t.diag - shift
    ab[2, :-1] = t.offdiag
    return solve_banded((1, 1), ab, b, check_finite=False)


def _fix_sign(v: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(np.abs(v) > 1e-14 * np.max(np.abs(v)))
    if nz.size and v[nz[0]] < 0:
        v = -v
    return v


def leading_eigenpair(t: SymTridiagonal, rtol: float = 1e-10) -> tuple[float, np.ndarray]:
    """Largest eigenvalue and a unit eigenvector (first nonzero entry positive).

    For a degenerate top eigenvalue any unit vector in the eigenspace may be
    returned.
    """
    lam = float(eigenvalues(t)[-1])
    if t.n == 1:
        return lam, np.ones(1)
    scale = max(1.0, t.norm_inf())
    rng = np.random.default_rng(0)
    for attempt in range(3):
        shift = lam + 1e-12 * scale * (1 + 10 * attempt) * (1 if attempt % 2 == 0 else -1)
        v = np.ones(t.n) / np.sqrt(t.n) if attempt == 0 else rng.standard_normal(t.n)
        with np.errstate(all="ignore"):
            for _ in range(4):
                w = _solve_shifted(t, shift, v)
                norm = np.linalg.norm(w)
                if not np.isfinite(norm) or norm == 0.0:
                    break
                v = w / norm
        if not np.all(np.isfinite(v)):
            continue
        v = _fix_sign(v)
        if np.max(np.abs(t.matvec(v) - lam * v)) < rtol:
            return lam, v
    raise ConvergenceError(f"inverse iteration stagnated at eigenvalue {lam!r}")
