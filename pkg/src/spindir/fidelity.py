"""Average-fidelity kernels, quadratic forms, and the closed-form results.

With the measurement seed fixed to ``sum_j sqrt(2j+1)|j,m>``, the average
fidelity of an effective state A is the quadratic form ``A.T @ M @ A`` with

    M[j, j'] = sqrt((2j+1)(2j'+1)) * int_{-1}^{1} du/2 (1+u)/2 d^j_mm(u) d^j'_mm(u)

where u = cos(beta). The azimuthal phases of the rotation are common to all
sectors at fixed m and drop out of the squared overlap, so only beta is
integrated. The direction measure is normalised to one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .encoding import (
    EffectiveState,
    StrategyTag,
    _check_admissible,
    general_encoding_dim,
    minimal_m,
    optimal_state,
    parallel_state,
    product_state,
)
from .linalg import SymTridiagonal, eigenvalues
from .specfun import HalfInteger, gauss_legendre, jacobi_roots, log_factorial, wigner_small_d_diag

__all__ = [
    "BESSEL_J0_FIRST_ZERO",
    "FidelityKernel",
    "StrategyReport",
    "asymptote",
    "average_fidelity",
    "build_kernel",
    "closed_form",
    "deficit",
    "dense_kernel",
    "f_antiparallel",
    "f_antiparallel_even",
    "f_dim",
    "f_general",
    "f_optimal",
    "f_parallel",
    "kernel_fidelity",
    "product_fidelity_by_m",
    "strategy_report",
]

BESSEL_J0_FIRST_ZERO = 2.404825557695773

KERNEL_GENERAL_MAX_N = 10


@dataclass(frozen=True)
class FidelityKernel:
    n_spins: int
    m: HalfInteger
    matrix: SymTridiagonal

    @property
    def size(self) -> int:
        return self.matrix.n

    def max_eigenvalue(self) -> float:
        return float(eigenvalues(self.matrix)[-1])


@dataclass(frozen=True)
class StrategyReport:
    strategy: StrategyTag
    n_spins: int
    f_closed: float
    f_kernel: float | None = None
    f_mc: float | None = None
    mc_stderr: float | None = None

    @property
    def kernel_gap(self) -> float | None:
        if self.f_kernel is None:
            return None
        return abs(self.f_closed - self.f_kernel)


def dense_kernel(n_spins: int, m) -> np.ndarray:
    """Full kernel matrix over sectors j = m..N/2, before compaction."""
    m = _check_admissible(n_spins, m)
    rule = gauss_legendre(n_spins + 2)
    u, w = rule.nodes, rule.weights
    m2 = m.twice_value
    # rows: sqrt(2j+1) d^j_mm(u_k)
    basis = np.array([
        math.sqrt(j2 + 1) * wigner_small_d_diag(HalfInteger(j2), m, u)
        for j2 in range(m2, n_spins + 1, 2)
    ])
    weighted = basis * (w * (1 + u) / 4)
    return weighted @ basis.T


@lru_cache(maxsize=512)
def _build_kernel(n_spins: int, m2: int) -> FidelityKernel:
    dense = dense_kernel(n_spins, HalfInteger(m2))
    dense = 0.5 * (dense + dense.T)
    return FidelityKernel(n_spins, HalfInteger(m2), SymTridiagonal.from_dense(dense, atol=1e-12))


def build_kernel(n_spins: int, m) -> FidelityKernel:
    """Kernel for (N, m), integrated exactly with an (N+2)-point Gauss rule."""
    m = _check_admissible(n_spins, m)
    return _build_kernel(int(n_spins), m.twice_value)


def average_fidelity(state: EffectiveState, kernel: FidelityKernel) -> float:
    if state.n_spins != kernel.n_spins or state.m != kernel.m:
        raise ValueError(
            f"state (N={state.n_spins}, m={state.m}) does not match "
            f"kernel (N={kernel.n_spins}, m={kernel.m})"
        )
    return float(state.amps @ kernel.matrix.matvec(state.amps))


def f_parallel(n_spins: int) -> float:
    if n_spins < 1:
        raise ValueError("N must be at least 1")
    return (n_spins + 1) / (n_spins + 2)


def f_antiparallel_even(n_spins: int) -> float:
    """Closed form for N = 2n antiparallel product states."""
    if n_spins < 2 or n_spins % 2:
        raise ValueError(f"closed form needs an even N >= 2, got {n_spins}; use f_antiparallel")
    n = n_spins // 2
    total = 0.5
    for j in range(1, n + 1):
        log_t = 2 * log_factorial(n) - log_factorial(n - j) - log_factorial(n + j)
        total += math.exp(log_t) * j / math.sqrt((n + 1) ** 2 - j * j)
    return total


def f_antiparallel(n_spins: int) -> float:
    """Product state with up/down counts as balanced as possible, via the kernel."""
    if n_spins < 2:
        raise ValueError("antiparallel encoding needs N >= 2")
    m = minimal_m(n_spins)
    return average_fidelity(product_state(n_spins, m), build_kernel(n_spins, m))


def f_optimal(n_spins: int) -> float:
    """(1 + x)/2 with x the largest root of P_{N/2+1} (even N) or P^{(0,1)}_{(N+1)/2} (odd N)."""
    if n_spins < 1:
        raise ValueError("N must be at least 1")
    if n_spins % 2 == 0:
        x = jacobi_roots(n_spins // 2 + 1, 0, 0)[-1]
    else:
        x = jacobi_roots((n_spins + 1) // 2, 0, 1)[-1]
    return 0.5 * (1.0 + float(x))


def f_dim(d: int) -> float:
    """Best fidelity with a d-dimensional space used as one spin (d-1)/2."""
    if d < 2:
        raise ValueError("dimension must be at least 2")
    return d / (d + 1)


def f_general(n_spins: int) -> float:
    return f_dim(general_encoding_dim(n_spins))


def asymptote(strategy, n_spins: int) -> float:
    strategy = StrategyTag.parse(strategy)
    if n_spins < 1:
        raise ValueError("N must be at least 1")
    if strategy is StrategyTag.PARALLEL:
        return 1 - 1 / n_spins
    if strategy is StrategyTag.ANTIPARALLEL:
        return 1 - 1 / (2 * n_spins)
    if strategy is StrategyTag.OPTIMAL:
        return 1 - BESSEL_J0_FIRST_ZERO ** 2 / n_spins ** 2
    return 1 - 2.0 ** (-n_spins)


def closed_form(strategy, n_spins: int) -> float:
    """Analytic fidelity; odd-N antiparallel has no closed form and uses the kernel."""
    strategy = StrategyTag.parse(strategy)
    if strategy is StrategyTag.PARALLEL:
        return f_parallel(n_spins)
    if strategy is StrategyTag.ANTIPARALLEL:
        return f_antiparallel_even(n_spins) if n_spins % 2 == 0 else f_antiparallel(n_spins)
    if strategy is StrategyTag.OPTIMAL:
        return f_optimal(n_spins)
    return f_general(n_spins)


def kernel_fidelity(strategy, n_spins: int) -> float | None:
    """Fidelity from the quadratic-form route, or None when it is out of reach."""
    strategy = StrategyTag.parse(strategy)
    if strategy is StrategyTag.PARALLEL:
        return average_fidelity(parallel_state(n_spins), build_kernel(n_spins, HalfInteger(n_spins)))
    if strategy is StrategyTag.ANTIPARALLEL:
        return f_antiparallel(n_spins)
    if strategy is StrategyTag.OPTIMAL:
        return optimal_state(n_spins, build_kernel(n_spins, minimal_m(n_spins)))[1]
    if n_spins > KERNEL_GENERAL_MAX_N:
        return None
    n_eff = general_encoding_dim(n_spins) - 1
    return average_fidelity(parallel_state(n_eff), build_kernel(n_eff, HalfInteger(n_eff)))


def strategy_report(strategy, n_spins: int) -> StrategyReport:
    strategy = StrategyTag.parse(strategy)
    return StrategyReport(strategy, n_spins, closed_form(strategy, n_spins),
                          kernel_fidelity(strategy, n_spins))


def product_fidelity_by_m(n_spins: int) -> dict[HalfInteger, float]:
    """Product-state fidelity for every admissible m (used to locate the best m)."""
    out = {}
    for m2 in range(n_spins % 2, n_spins + 1, 2):
        m = HalfInteger(m2)
        out[m] = average_fidelity(product_state(n_spins, m), build_kernel(n_spins, m))
    return out


def deficit(strategy, n_spins: int) -> float:
    """1 - F, computed without cancellation where a closed form allows it."""
    strategy = StrategyTag.parse(strategy)
    if strategy is StrategyTag.PARALLEL:
        return 1 / (n_spins + 2)
    if strategy is StrategyTag.GENERAL:
        return 1 / (general_encoding_dim(n_spins) + 1)
    if strategy is StrategyTag.OPTIMAL:
        return 1.0 - f_optimal(n_spins)
    return 1.0 - f_antiparallel(n_spins)
