"""Full tensor-product oracle for N <= 4 spin-1/2 particles.

Works with complex 2**N amplitude vectors and a coupled total-spin basis
built recursively from Clebsch-Gordan coefficients. Slow and small on
purpose: it is used to check the effective-state machinery.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .specfun import HalfInteger, clebsch_gordan

__all__ = [
    "MAX_SPINS",
    "TensorState",
    "build_product",
    "coupled_basis",
    "oracle_overlap",
    "rotate",
    "sector_amplitudes",
    "spin_half_rotation",
]

MAX_SPINS = 4

_UP = np.array([1.0, 0.0], dtype=complex)
_DOWN = np.array([0.0, 1.0], dtype=complex)


@dataclass(frozen=True)
class TensorState:
    n_spins: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if not 1 <= self.n_spins <= MAX_SPINS:
            raise ValueError(f"oracle supports 1 <= N <= {MAX_SPINS}, got {self.n_spins}")
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        if amps.size != 2 ** self.n_spins:
            raise ValueError("amplitude vector has the wrong length")
        if abs(np.vdot(amps, amps).real - 1.0) > 1e-12:
            raise ValueError("state is not normalised")
        object.__setattr__(self, "amplitudes", amps)

    @property
    def m(self) -> HalfInteger:
        """S_z eigenvalue; raises if the state is not an S_z eigenstate."""
        support = np.flatnonzero(np.abs(self.amplitudes) > 1e-14)
        # basis index bit set = spin down; first spin is the most significant bit
        downs = {bin(i).count("1") for i in support}
        if len(downs) != 1:
            raise ValueError("state is not an S_z eigenstate")
        return HalfInteger(self.n_spins - 2 * downs.pop())


def build_product(ups: int, downs: int) -> TensorState:
    """Literal spin string with the up spins first."""
    n = ups + downs
    if ups < 0 or downs < 0 or not 1 <= n <= MAX_SPINS:
        raise ValueError(f"need 1 <= ups + downs <= {MAX_SPINS}")
    v = np.ones(1, dtype=complex)
    for k in range(n):
        v = np.kron(v, _UP if k < ups else _DOWN)
    return TensorState(n, v)


def spin_half_rotation(beta: float, alpha: float = 0.0) -> np.ndarray:
    """exp(-i alpha S_z) exp(-i beta S_y) for spin 1/2."""
    c, s = np.cos(beta / 2), np.sin(beta / 2)
    ry = np.array([[c, -s], [s, c]], dtype=complex)
    rz = np.diag([np.exp(-0.5j * alpha), np.exp(0.5j * alpha)])
    return rz @ ry


def rotate(state: TensorState, beta: float, alpha: float = 0.0) -> TensorState:
    """Apply the same spin-1/2 rotation to every factor."""
    u = spin_half_rotation(beta, alpha)
    full = np.ones((1, 1), dtype=complex)
    for _ in range(state.n_spins):
        full = np.kron(full, u)
    out = full @ state.amplitudes
    return TensorState(state.n_spins, out)


@lru_cache(maxsize=None)
def coupled_basis(n_spins: int) -> tuple[tuple[tuple[int, ...], HalfInteger, HalfInteger, np.ndarray], ...]:
    """Orthonormal total-spin basis, coupling one spin at a time.

    Entries are ``(path, J, M, vector)`` where ``path`` lists the doubled
    intermediate spins (its last element is 2J).
    """
    if not 1 <= n_spins <= MAX_SPINS:
        raise ValueError(f"oracle supports 1 <= N <= {MAX_SPINS}")
    half = HalfInteger(1)
    basis = [((1,), half, HalfInteger(1), _UP), ((1,), half, HalfInteger(-1), _DOWN)]
    for _ in range(n_spins - 1):
        families: dict[tuple[int, ...], dict[int, np.ndarray]] = {}
        for path, _, M, vec in basis:
            families.setdefault(path, {})[M.twice_value] = vec
        new = []
        for path, vecs in families.items():
            j = HalfInteger(path[-1])
            for J2 in (path[-1] + 1, path[-1] - 1):
                if J2 < 0:
                    continue
                J = HalfInteger(J2)
                for M2 in range(-J2, J2 + 1, 2):
                    M = HalfInteger(M2)
                    v = 0
                    for s2, e in ((1, _UP), (-1, _DOWN)):
                        m2 = M2 - s2
                        if m2 in vecs:
                            cg = clebsch_gordan(j, half, HalfInteger(m2), HalfInteger(s2), J, M)
                            v = v + cg * np.kron(vecs[m2], e)
                    new.append((path + (J2,), J, M, v))
        basis = new
    return tuple(basis)


def _sector_components(state: TensorState) -> dict[HalfInteger, np.ndarray]:
    """Projection of the state onto each total-spin sector."""
    out: dict[HalfInteger, np.ndarray] = {}
    for _, J, _, vec in coupled_basis(state.n_spins):
        c = np.vdot(vec, state.amplitudes)
        if J not in out:
            out[J] = np.zeros_like(state.amplitudes)
        out[J] = out[J] + c * vec
    return out


def sector_amplitudes(state: TensorState) -> dict[HalfInteger, float]:
    """Root-sum-square amplitude per total spin j, summed over equivalent copies."""
    comps = _sector_components(state)
    return {j: float(np.linalg.norm(v)) for j, v in sorted(comps.items())}


def measurement_seed(state: TensorState) -> TensorState:
    """Full-space counterpart of sum_j sqrt(2j+1)|j,m>, aligned with the state's copies."""
    seed = np.zeros_like(state.amplitudes)
    for j, comp in _sector_components(state).items():
        norm = np.linalg.norm(comp)
        if norm > 1e-14:
            seed = seed + np.sqrt(j.twice_value + 1) * comp / norm
    # not unit norm: the seed is a POVM vector, normalisation is sum_j (2j+1)
    return seed


def oracle_overlap(state: TensorState, beta: float, alpha: float = 0.0) -> float:
    """|<B|U(beta, alpha)^dagger|A>|^2 evaluated with full 2**N vectors."""
    if state.n_spins > 3:
        raise ValueError("oracle_overlap supports N <= 3")
    b = measurement_seed(state)
    u = spin_half_rotation(beta, alpha)
    full = np.ones((1, 1), dtype=complex)
    for _ in range(state.n_spins):
        full = np.kron(full, u)
    return float(abs(np.vdot(b, full.conj().T @ state.amplitudes)) ** 2)
