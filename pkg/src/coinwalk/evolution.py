"""Walk evolution: coin toss, conditional shift, and the zero-angle closed form.

One step is coin-then-shift, ``psi' = S (1 (x) C(theta)) psi``, with the coin
matrix ``C(theta) = cos(theta) Z + sin(theta) X`` and the shift moving the
coin-0 component one site up the lattice and the coin-1 component one site
down. Density matrices are conjugated blockwise: the coin mixes the four
position blocks through a 2x2 matrix and the shift translates block row and
column indices, keeping a step at O(L^2) instead of O(L^3) dense work.

Reaching the lattice edge raises ``BoundaryViolationError``; lattices sized
with :func:`coinwalk.states.sized_lattice` never trigger it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .states import JointDensityMatrix, JointPureState, sized_lattice

UNITARITY_ATOL = 1e-14

_SQRT_HALF = 1.0 / math.sqrt(2.0)

# Site displacement per step for coin component 0 and 1.
COIN_DISPLACEMENT = (1, -1)


class BoundaryViolationError(RuntimeError):
    """The walk support touched the lattice edge; the lattice was sized too small."""


@dataclass(frozen=True, eq=False)
class CoinOperator:
    """Coin-toss unitary cos(theta) Z + sin(theta) X for theta in radians."""

    theta: float
    matrix: np.ndarray = field(init=False, repr=False)

    def __post_init__(self) -> None:
        if not math.isfinite(self.theta):
            raise ValueError(f"theta must be finite, got {self.theta!r}")
        c, s = math.cos(self.theta), math.sin(self.theta)
        matrix = np.array([[c, s], [s, -c]], dtype=np.complex128)
        err = float(np.max(np.abs(matrix @ matrix.conj().T - np.eye(2))))
        if err > UNITARITY_ATOL:
            raise ValueError(f"coin matrix is not unitary to {UNITARITY_ATOL}: deviation {err:.3e}")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)


def coin_operator(theta: float) -> CoinOperator:
    """Coin matrix [[cos t, sin t], [sin t, -cos t]]; t=0 gives Z, t=pi/4 the Hadamard coin."""
    return CoinOperator(theta)


def _edge_occupied_amps(amps: np.ndarray) -> bool:
    return bool(amps[0, :].any() or amps[-1, :].any())


def _edge_occupied_blocks(blocks: np.ndarray) -> bool:
    return bool(
        blocks[:, :, 0, :].any()
        or blocks[:, :, -1, :].any()
        or blocks[:, :, :, 0].any()
        or blocks[:, :, :, -1].any()
    )


def _step_amps(amps: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    # Coin mixes the two components site-wise; each component then translates.
    # The caller guarantees empty edge sites, so np.roll is a true shift.
    mixed = amps @ matrix.T
    out = np.empty_like(mixed)
    out[:, 0] = np.roll(mixed[:, 0], COIN_DISPLACEMENT[0])
    out[:, 1] = np.roll(mixed[:, 1], COIN_DISPLACEMENT[1])
    return out


def _step_blocks(blocks: np.ndarray, matrix: np.ndarray) -> np.ndarray:
    s = blocks.shape[-1]
    conj_map = np.kron(matrix, matrix.conj())
    mixed = np.tensordot(conj_map, blocks.reshape(4, s, s), axes=(1, 0)).reshape(2, 2, s, s)
    out = np.empty_like(mixed)
    for a in (0, 1):
        for b in (0, 1):
            out[a, b] = np.roll(
                mixed[a, b], (COIN_DISPLACEMENT[a], COIN_DISPLACEMENT[b]), axis=(0, 1)
            )
    return out


def apply_step_pure(psi: JointPureState, coin: CoinOperator) -> JointPureState:
    """One walk step on a pure state.

    Raises :class:`BoundaryViolationError` if either edge site carries any
    amplitude before the shift.
    """
    if _edge_occupied_amps(psi.amps):
        raise BoundaryViolationError("pure-state support reached the lattice edge")
    return JointPureState(psi.lattice, _step_amps(psi.amps, coin.matrix))


def apply_step_density(rho: JointDensityMatrix, coin: CoinOperator) -> JointDensityMatrix:
    """One walk step on a density matrix (blockwise conjugation by the step unitary)."""
    if _edge_occupied_blocks(rho.blocks):
        raise BoundaryViolationError("density-matrix support reached the lattice edge")
    return JointDensityMatrix(rho.lattice, _step_blocks(rho.blocks, coin.matrix))


def evolve_pure(psi0: JointPureState, theta: float, steps: int) -> JointPureState:
    """Apply ``steps`` walk steps with a fixed coin angle."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if steps == 0:
        return psi0
    coin = coin_operator(theta)
    amps = psi0.amps
    for _ in range(steps):
        if _edge_occupied_amps(amps):
            raise BoundaryViolationError("pure-state support reached the lattice edge")
        amps = _step_amps(amps, coin.matrix)
    return JointPureState(psi0.lattice, amps)


def closed_form_z_walk(
    position_amps,
    t: int,
    *,
    first_site: int = 0,
    steps: int | None = None,
) -> JointPureState:
    """Exact state of the zero-angle walk after ``t`` steps.

    The zero-angle coin is diagonal, so the walk rigidly translates the input
    profile: starting from a product state with the symmetric coin, the
    coin-0 branch ends up displaced by +t and the coin-1 branch by -t with an
    accumulated phase i(-1)^t. ``steps`` (default ``t``) sizes the lattice, so
    results at intermediate times can share the lattice of a longer run.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    total = t if steps is None else steps
    if total < t:
        raise ValueError(f"lattice sized for {total} steps cannot hold a {t}-step walk")
    pos = np.asarray(position_amps, dtype=np.complex128)
    if pos.ndim != 1 or pos.size == 0:
        raise ValueError("position_amps must be a nonempty one-dimensional sequence")
    norm = float(np.linalg.norm(pos))
    if norm == 0.0:
        raise ValueError("position amplitudes are all zero")
    pos = pos / norm
    radius = max(abs(first_site), abs(first_site + pos.size - 1))
    lattice = sized_lattice(total, radius)
    amps = np.zeros((lattice.site_count, 2), dtype=np.complex128)
    start = lattice.index(first_site)
    amps[start + t : start + t + pos.size, 0] = pos * _SQRT_HALF
    amps[start - t : start - t + pos.size, 1] = pos * (1j * (-1.0) ** t * _SQRT_HALF)
    return JointPureState(lattice, amps)
