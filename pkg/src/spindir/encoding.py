"""Effective encoding states for each strategy.

An :class:`EffectiveState` keeps one coefficient per total-spin sector
``j = m, m+1, ..., N/2`` at fixed magnetic number ``m``; equivalent copies
of a representation are consolidated into a single amplitude.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .linalg import leading_eigenpair
from .specfun import HalfInteger, as_half, log_factorial

if TYPE_CHECKING:
    from .fidelity import FidelityKernel

__all__ = [
    "EffectiveState",
    "StrategyTag",
    "general_encoding_dim",
    "minimal_m",
    "parallel_state",
    "product_state",
    "optimal_state",
]


class StrategyTag(enum.Enum):
    PARALLEL = "P"
    ANTIPARALLEL = "A"
    OPTIMAL = "O"
    GENERAL = "G"

    @classmethod
    def parse(cls, value) -> "StrategyTag":
        if isinstance(value, cls):
            return value
        text = str(value).strip()
        for tag in cls:
            if text.upper() == tag.value or text.upper() == tag.name:
                return tag
        raise ValueError(f"unknown strategy {value!r}; expected one of P, A, O, G")


@dataclass(frozen=True)
class EffectiveState:
    n_spins: int
    m: HalfInteger
    amps: np.ndarray

    def __post_init__(self):
        m = as_half(self.m)
        object.__setattr__(self, "m", m)
        _check_admissible(self.n_spins, m)
        amps = np.array(self.amps, dtype=float).reshape(-1)
        expected = (self.n_spins - m.twice_value) // 2 + 1
        if amps.size != expected:
            raise ValueError(f"expected {expected} amplitudes, got {amps.size}")
        norm2 = float(np.dot(amps, amps))
        if abs(norm2 - 1.0) > 1e-12:
            raise ValueError(f"amplitudes are not unit norm (sum of squares {norm2!r})")
        amps.flags.writeable = False
        object.__setattr__(self, "amps", amps)

    @property
    def js(self) -> np.ndarray:
        """Sector labels j = m .. N/2 as floats."""
        return float(self.m) + np.arange(self.amps.size)

    @property
    def sectors(self) -> list[HalfInteger]:
        return [HalfInteger(self.m.twice_value + 2 * k) for k in range(self.amps.size)]


def _check_admissible(n_spins: int, m) -> HalfInteger:
    if n_spins < 1 or int(n_spins) != n_spins:
        raise ValueError(f"number of spins must be a positive integer, got {n_spins!r}")
    m = as_half(m)
    if m.twice_value < 0 or m.twice_value > n_spins:
        raise ValueError(f"m={m} outside [0, {n_spins}/2]")
    if (n_spins - m.twice_value) % 2:
        raise ValueError(f"m={m} does not match the half-integrality of N/2={n_spins}/2")
    return m


def minimal_m(n_spins: int) -> HalfInteger:
    """0 for even N, 1/2 for odd N."""
    return HalfInteger(n_spins % 2)


def parallel_state(n_spins: int) -> EffectiveState:
    """All spins up: the stretched state |N/2, N/2>."""
    return EffectiveState(n_spins, HalfInteger(n_spins), np.ones(1))


def product_state(n_spins: int, m) -> EffectiveState:
    """Effective amplitudes of a product state with (N/2 + m) spins up.

    A_j = sqrt((1+2j)/(J+1+j)) * sqrt((J-m)!(J+m)!/((J-j)!(J+j)!)), J = N/2,
    evaluated in log space. The result is not renormalized.
    """
    m = _check_admissible(n_spins, m)
    J2, m2 = n_spins, m.twice_value
    amps = []
    for j2 in range(m2, J2 + 1, 2):
        log_a = 0.5 * (math.log(1 + j2) - math.log((J2 + 2 + j2) / 2))
        log_a += 0.5 * (log_factorial((J2 - m2) // 2) + log_factorial((J2 + m2) // 2)
                        - log_factorial((J2 - j2) // 2) - log_factorial((J2 + j2) // 2))
        amps.append(math.exp(log_a))
    return EffectiveState(n_spins, m, np.array(amps))


def optimal_state(n_spins: int, kernel: "FidelityKernel") -> tuple[EffectiveState, float]:
    """Best effective state for a kernel: its Perron eigenvector and eigenvalue."""
    if kernel.n_spins != n_spins:
        raise ValueError(f"kernel built for N={kernel.n_spins}, not N={n_spins}")
    value, vec = leading_eigenpair(kernel.matrix)
    vec = vec / np.linalg.norm(vec)
    return EffectiveState(n_spins, kernel.m, vec), value


def general_encoding_dim(n_spins: int) -> int:
    """Hilbert-space dimension 2**N used as a single spin (d-1)/2."""
    if n_spins < 1 or n_spins > 62:
        raise ValueError(f"general encoding supports 1 <= N <= 62, got {n_spins}")
    return 1 << n_spins
