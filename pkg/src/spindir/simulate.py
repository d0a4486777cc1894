"""Monte Carlo simulation of the direction-communication protocol.

Alice's direction is fixed to +z (the protocol is rotation invariant), Bob's
continuous POVM outcome is drawn by rejection sampling from its density, and
the score (1 + cos beta)/2 is averaged.

Samples are produced in fixed-size blocks. Block ``k`` always draws from
substream ``k`` of ``SeedSequence(seed)``, so the estimate depends only on
``(strategy, N, samples, seed)`` and not on how many workers run the blocks.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .encoding import (
    EffectiveState,
    StrategyTag,
    general_encoding_dim,
    minimal_m,
    optimal_state,
    parallel_state,
    product_state,
)
from .fidelity import build_kernel
from .specfun import gauss_legendre, wigner_small_d_diag

__all__ = [
    "BLOCK_SIZE",
    "DirectionSample",
    "McReport",
    "Tally",
    "density_bound",
    "estimate_fidelity",
    "povm_density",
    "sample_direction",
    "sample_directions",
    "sample_outcome",
    "sample_outcomes",
    "strategy_state",
]

BLOCK_SIZE = 1 << 16
_MAX_BATCH = 1 << 21


@dataclass(frozen=True)
class DirectionSample:
    """A direction (or a batch of them) as (cos beta, alpha)."""

    cos_beta: np.ndarray | float
    alpha: np.ndarray | float

    def __post_init__(self):
        if np.any(np.abs(self.cos_beta) > 1):
            raise ValueError("cos_beta must lie in [-1, 1]")
        if np.any((self.alpha < 0) | (self.alpha >= 2 * np.pi)):
            raise ValueError("alpha must lie in [0, 2pi)")

    def unit_vector(self) -> np.ndarray:
        c = np.asarray(self.cos_beta, dtype=float)
        s = np.sqrt(np.clip(1 - c * c, 0.0, None))
        return np.stack([s * np.cos(self.alpha), s * np.sin(self.alpha), c], axis=-1)


@dataclass(frozen=True)
class Tally:
    """Sufficient statistics of a run; merging is exact addition."""

    count: int = 0
    total: float = 0.0
    total_sq: float = 0.0
    proposals: int = 0

    @classmethod
    def of(cls, values, proposals: int | None = None) -> "Tally":
        values = np.asarray(values, dtype=float)
        return cls(values.size, float(np.sum(values)), float(np.sum(values * values)),
                   values.size if proposals is None else int(proposals))

    def merge(self, other: "Tally") -> "Tally":
        return Tally(self.count + other.count, self.total + other.total,
                     self.total_sq + other.total_sq, self.proposals + other.proposals)

    @property
    def mean(self) -> float:
        return self.total / self.count

    @property
    def stderr(self) -> float:
        n = self.count
        var = max(self.total_sq - self.total * self.total / n, 0.0) / (n - 1)
        return math.sqrt(var / n)


@dataclass(frozen=True)
class McReport:
    strategy: StrategyTag
    n_spins: int
    samples: int
    f_estimate: float
    stderr: float
    acceptance_rate: float
    seed: int

    def as_dict(self) -> dict:
        return {
            "strategy": self.strategy.value,
            "n_spins": self.n_spins,
            "samples": self.samples,
            "f_estimate": self.f_estimate,
            "stderr": self.stderr,
            "acceptance_rate": self.acceptance_rate,
            "seed": self.seed,
        }


def sample_directions(rng: np.random.Generator, size: int) -> DirectionSample:
    """Isotropic directions: cos beta uniform on [-1, 1], alpha uniform on [0, 2pi)."""
    u = rng.uniform(-1.0, 1.0, size)
    alpha = rng.uniform(0.0, 2 * np.pi, size)
    return DirectionSample(u, alpha)


def sample_direction(rng: np.random.Generator) -> DirectionSample:
    d = sample_directions(rng, 1)
    return DirectionSample(float(d.cos_beta[0]), float(d.alpha[0]))


def povm_density(state: EffectiveState, cos_beta):
    """Outcome density relative to the normalised sphere measure.

    rho(beta) = (sum_j sqrt(2j+1) A_j d^j_mm(beta))**2, so that
    int rho du/2 = 1 over u = cos beta.
    """
    u = np.asarray(cos_beta, dtype=float)
    amp = np.zeros_like(u)
    for j, a in zip(state.sectors, state.amps):
        if a != 0.0:
            amp = amp + math.sqrt(j.twice_value + 1) * a * wigner_small_d_diag(j, state.m, u)
    out = amp * amp
    return out if np.ndim(out) else float(out)


def density_bound(state: EffectiveState) -> float:
    """Envelope for rejection sampling, valid because |d^j_mm| <= 1."""
    return float(np.sum(np.sqrt(2 * state.js + 1) * np.abs(state.amps))) ** 2


def density_normalization(state: EffectiveState) -> float:
    # integrand is a polynomial of degree N in u
    rule = gauss_legendre(state.n_spins + 1)
    return 0.5 * rule.integrate(lambda u: povm_density(state, u))


def sample_outcomes(state: EffectiveState, rng: np.random.Generator, size: int
                    ) -> tuple[DirectionSample, int]:
    """Draw `size` POVM outcomes; also return how many proposals were used."""
    bound = density_bound(state)
    accepted: list[np.ndarray] = []
    have = 0
    proposals = 0
    while have < size:
        need = size - have
        batch = min(_MAX_BATCH, int(need * bound * 1.1) + 64)
        u = rng.uniform(-1.0, 1.0, batch)
        keep = rng.random(batch) * bound < povm_density(state, u)
        idx = np.flatnonzero(keep)
        if idx.size > need:
            idx = idx[:need]
            proposals += int(idx[-1]) + 1
        else:
            proposals += batch
        accepted.append(u[idx])
        have += idx.size
    u = np.concatenate(accepted) if accepted else np.empty(0)
    alpha = rng.uniform(0.0, 2 * np.pi, size)
    return DirectionSample(u, alpha), proposals


def sample_outcome(state: EffectiveState, rng: np.random.Generator) -> DirectionSample:
    d, _ = sample_outcomes(state, rng, 1)
    return DirectionSample(float(d.cos_beta[0]), float(d.alpha[0]))


def _rotate_from_z(alice: DirectionSample, local: DirectionSample) -> np.ndarray:
    """Map outcome vectors given relative to +z onto Alice's frame."""
    v = local.unit_vector()
    cb = np.asarray(alice.cos_beta)
    sb = np.sqrt(np.clip(1 - cb * cb, 0.0, None))
    ca, sa = np.cos(alice.alpha), np.sin(alice.alpha)
    # R = Rz(alpha) Ry(beta)
    x = cb * v[..., 0] + sb * v[..., 2]
    y = v[..., 1]
    z = -sb * v[..., 0] + cb * v[..., 2]
    return np.stack([ca * x - sa * y, sa * x + ca * y, z], axis=-1)


def strategy_state(strategy, n_spins: int) -> EffectiveState:
    """Effective state simulated for a strategy (General: one spin (2**N - 1)/2)."""
    strategy = StrategyTag.parse(strategy)
    if strategy is StrategyTag.PARALLEL:
        return parallel_state(n_spins)
    if strategy is StrategyTag.ANTIPARALLEL:
        if n_spins < 2:
            raise ValueError("antiparallel encoding needs N >= 2")
        return product_state(n_spins, minimal_m(n_spins))
    if strategy is StrategyTag.OPTIMAL:
        return optimal_state(n_spins, build_kernel(n_spins, minimal_m(n_spins)))[0]
    return parallel_state(general_encoding_dim(n_spins) - 1)


def _run_block(state: EffectiveState, seed_seq: np.random.SeedSequence, size: int,
               random_alice: bool) -> Tally:
    rng = np.random.default_rng(seed_seq)
    outcome, proposals = sample_outcomes(state, rng, size)
    if random_alice:
        alice = sample_directions(rng, size)
        guess = _rotate_from_z(alice, outcome)
        f = 0.5 * (1 + np.sum(alice.unit_vector() * guess, axis=-1))
    else:
        f = 0.5 * (1 + outcome.cos_beta)
    return Tally.of(f, proposals)


def block_tallies(strategy, n_spins: int, samples: int, seed: int, workers: int = 1,
                  random_alice: bool = False) -> list[Tally]:
    """Per-block statistics in block order."""
    state = strategy_state(strategy, n_spins)
    n_blocks = -(-samples // BLOCK_SIZE)
    sizes = [BLOCK_SIZE] * (n_blocks - 1) + [samples - BLOCK_SIZE * (n_blocks - 1)]
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    jobs = list(zip(children, sizes))
    if workers <= 1:
        return [_run_block(state, ss, size, random_alice) for ss, size in jobs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda job: _run_block(state, job[0], job[1], random_alice), jobs))


def estimate_fidelity(strategy, n_spins: int, samples: int, seed: int, workers: int = 1,
                      random_alice: bool = False) -> McReport:
    """Monte Carlo estimate of the average fidelity.

    ``random_alice`` switches to the slow path that also draws Alice's
    direction isotropically and scores the guess against it.
    """
    strategy = StrategyTag.parse(strategy)
    if samples < 1000:
        raise ValueError(f"need at least 1000 samples, got {samples}")
    if not 0 <= seed < 2 ** 64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    if workers < 1:
        raise ValueError("workers must be at least 1")
    tally = Tally()
    for t in block_tallies(strategy, n_spins, samples, seed, workers, random_alice):
        tally = tally.merge(t)
    return McReport(strategy, n_spins, tally.count, tally.mean, tally.stderr,
                    tally.count / tally.proposals, seed)
