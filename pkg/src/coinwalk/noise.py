"""Position dephasing: the per-step channel, noisy evolution, trajectory averages.

The channel keeps every density-matrix element that is diagonal in position
(including the full 2x2 coin operator at each site) and scales every position
off-diagonal element by a retention probability beta, erasing spatial
coherence as beta drops toward zero. Per step, beta is drawn uniformly from
[delta, 1] in ``trajectory`` mode, held at the interval mean (1 + delta) / 2
in ``exact-mean`` mode (the channel is linear in beta, so this reproduces the
trajectory expectation), and pinned to 1 when the mode is ``off``. The width
f = 1 - delta of the sampling interval is the noise amplitude.

Randomness comes from counter-based Philox streams keyed on
(master_seed, stream_index): realization r draws from stream r bit-exactly,
whether realizations run serially or in parallel, and Monte-Carlo averages
reduce over a fixed pairwise tree so results never depend on thread count.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .evolution import (
    BoundaryViolationError,
    _edge_occupied_blocks,
    _step_blocks,
    coin_operator,
)
from .reduction import PairwiseAccumulator
from .states import JointDensityMatrix, sized_lattice

NOISE_MODES = ("trajectory", "exact-mean", "off")


@dataclass(frozen=True)
class NoiseSpec:
    """Dephasing strength and sampling mode.

    ``delta`` is the lower edge of the per-step retention interval [delta, 1];
    the noise amplitude is ``1 - delta``. ``mode="off"`` makes the channel the
    identity regardless of delta.
    """

    delta: float
    mode: str = "trajectory"

    def __post_init__(self) -> None:
        if not 0.0 <= self.delta <= 1.0:
            raise ValueError(f"delta must lie in [0, 1], got {self.delta!r}")
        if self.mode not in NOISE_MODES:
            raise ValueError(f"mode must be one of {NOISE_MODES}, got {self.mode!r}")

    @property
    def amplitude(self) -> float:
        """Noise amplitude f = 1 - delta."""
        return 1.0 - self.delta


class RngStream:
    """Deterministic random stream keyed on (master_seed, stream_index).

    Backed by the counter-based Philox generator, so identical key pairs
    reproduce identical draw sequences bit-exactly and distinct stream
    indices are statistically independent.
    """

    def __init__(self, master_seed: int, stream_index: int = 0):
        self.master_seed = int(master_seed)
        self.stream_index = int(stream_index)
        key = np.array(
            [
                self.master_seed & 0xFFFFFFFFFFFFFFFF,
                self.stream_index & 0xFFFFFFFFFFFFFFFF,
            ],
            dtype=np.uint64,
        )
        self._generator = np.random.Generator(np.random.Philox(key=key))

    @property
    def generator(self) -> np.random.Generator:
        return self._generator

    def __repr__(self) -> str:
        return f"RngStream(master_seed={self.master_seed}, stream_index={self.stream_index})"


def sample_beta(spec: NoiseSpec, rng: RngStream) -> float:
    """Draw one per-step retention probability uniformly from [delta, 1]."""
    return float(rng.generator.uniform(spec.delta, 1.0))


def _dephase_blocks(blocks: np.ndarray, beta: float) -> np.ndarray:
    s = blocks.shape[-1]
    idx = np.arange(s)
    out = blocks * beta
    out[:, :, idx, idx] = blocks[:, :, idx, idx]
    return out


def dephasing_channel(rho: JointDensityMatrix, beta: float) -> JointDensityMatrix:
    """Scale position off-diagonals by beta; position-diagonal blocks pass through.

    Trace is preserved exactly (the diagonal is copied bit-for-bit).
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
    return JointDensityMatrix(rho.lattice, _dephase_blocks(rho.blocks, beta))


def evolve_with_betas(
    rho0: JointDensityMatrix, theta: float, betas: Sequence[float]
) -> JointDensityMatrix:
    """Step-then-channel evolution with an explicit per-step retention sequence."""
    coin = coin_operator(theta)
    blocks = rho0.blocks
    for beta in betas:
        if not 0.0 <= beta <= 1.0:
            raise ValueError(f"beta must lie in [0, 1], got {beta!r}")
        if _edge_occupied_blocks(blocks):
            raise BoundaryViolationError("density-matrix support reached the lattice edge")
        blocks = _step_blocks(blocks, coin.matrix)
        if beta != 1.0:
            blocks = _dephase_blocks(blocks, beta)
    return JointDensityMatrix(rho0.lattice, blocks)


def evolve_noisy(
    rho0: JointDensityMatrix,
    theta: float,
    steps: int,
    spec: NoiseSpec,
    rng: RngStream | None = None,
) -> JointDensityMatrix:
    """``steps`` iterations of step-then-channel, with beta resolved by ``spec.mode``."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if spec.mode == "trajectory":
        if rng is None:
            raise ValueError("trajectory mode requires an RngStream")
        betas = [sample_beta(spec, rng) for _ in range(steps)]
    elif spec.mode == "exact-mean":
        betas = [(1.0 + spec.delta) / 2.0] * steps
    else:
        betas = [1.0] * steps
    return evolve_with_betas(rho0, theta, betas)


def closed_form_full_noise(
    position_amps,
    t: int,
    *,
    first_site: int = 0,
    steps: int | None = None,
) -> JointDensityMatrix:
    """Fully dephased zero-angle walk: an incoherent pair of rigid translations.

    With the coin angle and every retention probability at zero, the
    occupation weights |<k|psi0>|^2 of the input profile are carried rigidly
    to +t on the coin-0 projector and to -t on the coin-1 projector, each with
    weight 1/2, and no off-diagonal element survives. Exact for t >= 2; at
    t = 1 a residual coin coherence survives when two occupied input sites
    are exactly two sites apart.
    """
    if t < 0:
        raise ValueError("t must be non-negative")
    total = t if steps is None else steps
    if total < t:
        raise ValueError(f"lattice sized for {total} steps cannot hold a {t}-step walk")
    pos = np.asarray(position_amps, dtype=np.complex128)
    if pos.ndim != 1 or pos.size == 0:
        raise ValueError("position_amps must be a nonempty one-dimensional sequence")
    norm_sq = float(np.sum(np.abs(pos) ** 2))
    if norm_sq == 0.0:
        raise ValueError("position amplitudes are all zero")
    weights = np.abs(pos) ** 2 / norm_sq
    radius = max(abs(first_site), abs(first_site + pos.size - 1))
    lattice = sized_lattice(total, radius)
    s = lattice.site_count
    blocks = np.zeros((2, 2, s, s), dtype=np.complex128)
    start = lattice.index(first_site)
    up = np.arange(start + t, start + t + pos.size)
    down = np.arange(start - t, start - t + pos.size)
    blocks[0, 0][up, up] = 0.5 * weights
    blocks[1, 1][down, down] = 0.5 * weights
    return JointDensityMatrix(lattice, blocks)


def _position_diagonal(blocks: np.ndarray) -> np.ndarray:
    s = blocks.shape[-1]
    idx = np.arange(s)
    return np.real(blocks[0, 0, idx, idx] + blocks[1, 1, idx, idx])


def _batched(indices: range, width: int) -> Iterable[list[int]]:
    batch: list[int] = []
    for r in indices:
        batch.append(r)
        if len(batch) == width:
            yield batch
            batch = []
    if batch:
        yield batch


def monte_carlo_average(
    rho0: JointDensityMatrix,
    theta: float,
    steps: int,
    spec: NoiseSpec,
    realizations: int,
    master_seed: int,
    *,
    threads: int = 1,
) -> tuple[JointDensityMatrix, np.ndarray]:
    """Mean of ``realizations`` independent trajectory evolutions.

    Realization r draws its betas from ``RngStream(master_seed, r)``. Returns
    the averaged state and the per-realization position distributions as a
    (realizations, site_count) array. The mean reduces over a fixed pairwise
    tree in ascending r, so the result is bit-identical for any ``threads``.
    """
    if realizations < 1:
        raise ValueError("realizations must be >= 1")

    def one(r: int) -> np.ndarray:
        out = evolve_noisy(rho0, theta, steps, spec, RngStream(master_seed, r))
        return out.blocks

    acc = PairwiseAccumulator()
    rows = np.empty((realizations, rho0.lattice.site_count), dtype=float)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            done = 0
            for batch in _batched(range(realizations), 4 * threads):
                for blocks in pool.map(one, batch):
                    acc.add(blocks)
                    rows[done] = _position_diagonal(blocks)
                    done += 1
    else:
        for r in range(realizations):
            blocks = one(r)
            acc.add(blocks)
            rows[r] = _position_diagonal(blocks)
    mean_blocks = acc.total() / realizations
    return JointDensityMatrix(rho0.lattice, mean_blocks), rows
