"""Walker-coin Hilbert space: lattice indexing, state containers, initial states.

The walker moves on a one-dimensional lattice of sites n = -L .. +L and
carries a two-level coin. A pure state is a complex amplitude table indexed
by (site, coin); a density matrix is stored as four coin-indexed position
blocks B[c, c'] of shape (2L+1, 2L+1). The block layout is what the evolution
kernels exploit: the coin toss mixes the four blocks through a 2x2 matrix and
the conditional shift is a pure index translation, so one step costs O(L^2).

Lattices are sized so the shift never reaches an edge: ``half_width = steps +
support_radius`` for the planned number of steps. Every container is
immutable after construction (backing arrays are marked read-only), so states
can be shared freely across parallel workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

NORM_ATOL = 1e-12
TRACE_ATOL = 1e-10
HERMITICITY_ATOL = 1e-12

_SQRT_HALF = 1.0 / math.sqrt(2.0)


@dataclass(frozen=True)
class LatticeSpec:
    """Symmetric lattice with sites n = -half_width .. +half_width."""

    half_width: int

    def __post_init__(self) -> None:
        if not isinstance(self.half_width, (int, np.integer)) or self.half_width < 1:
            raise ValueError(f"half_width must be an integer >= 1, got {self.half_width!r}")

    @property
    def site_count(self) -> int:
        return 2 * self.half_width + 1

    def sites(self) -> np.ndarray:
        """Site labels -L .. +L in array order."""
        return np.arange(-self.half_width, self.half_width + 1)

    def index(self, site: int) -> int:
        """Array index of lattice site ``site``."""
        if abs(site) > self.half_width:
            raise ValueError(f"site {site} outside lattice of half_width {self.half_width}")
        return site + self.half_width


def sized_lattice(steps: int, support_radius: int = 0) -> LatticeSpec:
    """Lattice large enough that ``steps`` shifts from the given support never hit an edge."""
    if steps < 0:
        raise ValueError("steps must be non-negative")
    if support_radius < 0:
        raise ValueError("support_radius must be non-negative")
    return LatticeSpec(max(1, steps + support_radius))


@dataclass(frozen=True)
class CoinState:
    """Normalized two-level coin state a0|0> + a1|1>."""

    a0: complex
    a1: complex

    def __post_init__(self) -> None:
        norm_sq = abs(self.a0) ** 2 + abs(self.a1) ** 2
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise ValueError(f"coin state is not normalized: |a0|^2 + |a1|^2 = {norm_sq!r}")

    @property
    def amplitudes(self) -> np.ndarray:
        return np.array([self.a0, self.a1], dtype=np.complex128)


#: (|0> + i|1>)/sqrt(2): the coin state that makes the walk left-right
#: symmetric; it is also the state the detection stage post-selects on.
COIN_SYMMETRIC = CoinState(_SQRT_HALF, 1j * _SQRT_HALF)

#: (i|0> + |1>)/sqrt(2), the orthogonal complement of COIN_SYMMETRIC.
COIN_SYMMETRIC_ORTH = CoinState(1j * _SQRT_HALF, _SQRT_HALF)


def _frozen_array(obj, name: str, value: np.ndarray) -> None:
    value.setflags(write=False)
    object.__setattr__(obj, name, value)


@dataclass(frozen=True, eq=False)
class JointPureState:
    """Pure walker-coin state.

    ``amps[i, c]`` is the amplitude on lattice site ``lattice.sites()[i]``
    with coin component ``c``. The table is normalized to unit total weight.
    """

    lattice: LatticeSpec
    amps: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amps, dtype=np.complex128, copy=True)
        expected = (self.lattice.site_count, 2)
        if amps.shape != expected:
            raise ValueError(f"amplitude table has shape {amps.shape}, expected {expected}")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise ValueError(f"state is not normalized: total weight {norm_sq!r}")
        _frozen_array(self, "amps", amps)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def amplitude(self, site: int, coin: int) -> complex:
        return complex(self.amps[self.lattice.index(site), coin])


@dataclass(frozen=True, eq=False)
class JointDensityMatrix:
    """Mixed walker-coin state as four coin-indexed position blocks.

    ``blocks[c, d][i, j]`` is the matrix element <site_i, c| rho |site_j, d>.
    Construction checks Hermiticity and unit trace; positive-semidefiniteness
    is not checked here (an eigenvalue check is done only in the test suite,
    at small sizes).
    """

    lattice: LatticeSpec
    blocks: np.ndarray

    def __post_init__(self) -> None:
        blocks = np.array(self.blocks, dtype=np.complex128, copy=True)
        s = self.lattice.site_count
        if blocks.shape != (2, 2, s, s):
            raise ValueError(f"blocks have shape {blocks.shape}, expected {(2, 2, s, s)}")
        herm_err = float(np.max(np.abs(blocks - blocks.transpose(1, 0, 3, 2).conj())))
        if herm_err > HERMITICITY_ATOL:
            raise ValueError(f"density matrix is not Hermitian: max deviation {herm_err:.3e}")
        tr = np.trace(blocks[0, 0]) + np.trace(blocks[1, 1])
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"density matrix trace is {tr!r}, expected 1")
        _frozen_array(self, "blocks", blocks)

    def trace(self) -> float:
        return float(np.real(np.trace(self.blocks[0, 0]) + np.trace(self.blocks[1, 1])))

    def purity(self) -> float:
        """Tr[rho^2], computed blockwise."""
        total = 0.0
        for c in (0, 1):
            for d in (0, 1):
                total += float(np.real(np.sum(self.blocks[c, d] * self.blocks[d, c].T)))
        return total


def make_localized_initial(steps: int) -> JointPureState:
    """Walker at the origin with the symmetric coin, |0>_p (x) (|0> + i|1>)_c / sqrt(2).

    The lattice is sized for a walk of ``steps`` steps.
    """
    lattice = sized_lattice(steps)
    amps = np.zeros((lattice.site_count, 2), dtype=np.complex128)
    center = lattice.index(0)
    amps[center, 0] = _SQRT_HALF
    amps[center, 1] = 1j * _SQRT_HALF
    return JointPureState(lattice, amps)


def gaussian_support_radius(sigma: float, eps_cut: float = 1e-12) -> int:
    """Largest |n| whose unnormalized amplitude exp(-n^2 / 4 sigma^2) is >= eps_cut."""
    radius = 0
    while math.exp(-((radius + 1) ** 2) / (4.0 * sigma * sigma)) >= eps_cut:
        radius += 1
    return radius


def make_gaussian_initial(sigma: float, steps: int, eps_cut: float = 1e-12) -> JointPureState:
    """Gaussian wave packet exp(-n^2 / 4 sigma^2) with the symmetric coin.

    ``sigma`` is the width parameter of the *amplitude* profile; the site
    occupation |<n|psi>|^2 therefore has standard deviation close to
    sigma / sqrt(2). Sites whose unnormalized amplitude falls below
    ``eps_cut`` are dropped before normalization, and the lattice is sized so
    the retained support can walk ``steps`` steps without touching an edge.
    """
    if not (isinstance(sigma, (int, float)) and sigma > 0 and math.isfinite(sigma)):
        raise ValueError(f"sigma must be a positive finite number, got {sigma!r}")
    if not 0.0 < eps_cut <= 1e-6:
        raise ValueError(f"eps_cut must lie in (0, 1e-6], got {eps_cut!r}")
    radius = gaussian_support_radius(sigma, eps_cut)
    lattice = sized_lattice(steps, radius)
    offsets = np.arange(-radius, radius + 1, dtype=float)
    profile = np.exp(-(offsets**2) / (4.0 * sigma * sigma))
    profile /= np.linalg.norm(profile)
    amps = np.zeros((lattice.site_count, 2), dtype=np.complex128)
    start = lattice.index(-radius)
    amps[start : start + profile.size, :] = profile[:, None] * COIN_SYMMETRIC.amplitudes[None, :]
    return JointPureState(lattice, amps)


def make_custom_initial(
    position_amps: Sequence[complex],
    coin: CoinState,
    steps: int,
    first_site: int = 0,
) -> JointPureState:
    """Product state with an arbitrary walker profile and the given coin.

    ``position_amps[i]`` sits on site ``first_site + i``. The walker profile
    is normalized internally, so unnormalized input is accepted; an all-zero
    profile is rejected.
    """
    pos = np.asarray(position_amps, dtype=np.complex128)
    if pos.ndim != 1 or pos.size == 0:
        raise ValueError("position_amps must be a nonempty one-dimensional sequence")
    if not np.all(np.isfinite(pos.real)) or not np.all(np.isfinite(pos.imag)):
        raise ValueError("position amplitudes must be finite")
    norm = float(np.linalg.norm(pos))
    if norm == 0.0:
        raise ValueError("position amplitudes are all zero")
    last_site = first_site + pos.size - 1
    radius = max(abs(first_site), abs(last_site))
    lattice = sized_lattice(steps, radius)
    amps = np.zeros((lattice.site_count, 2), dtype=np.complex128)
    start = lattice.index(first_site)
    amps[start : start + pos.size, :] = (pos / norm)[:, None] * coin.amplitudes[None, :]
    return JointPureState(lattice, amps)


def pure_to_density(psi: JointPureState) -> JointDensityMatrix:
    """Rank-one density matrix |psi><psi| in coin-block layout."""
    a = psi.amps
    blocks = np.einsum("ic,jd->cdij", a, a.conj())
    return JointDensityMatrix(psi.lattice, blocks)


def initial_state_from_descriptor(descriptor: Mapping, steps: int) -> JointPureState:
    """Build an initial state from a JSON-style descriptor.

    Supported descriptors::

        {"kind": "origin"}
        {"kind": "gaussian", "sigma": 10.0, "eps_cut": 1e-12}   # eps_cut optional
        {"kind": "custom", "amplitudes": [[re, im], ...],
         "first_site": 0, "coin": [[re, im], [re, im]]}          # last two optional

    The custom coin pair is normalized before use.
    """
    if not isinstance(descriptor, Mapping):
        raise ValueError("initial-state descriptor must be a mapping")
    kind = descriptor.get("kind")
    if kind == "origin":
        _reject_unknown(descriptor, {"kind"})
        return make_localized_initial(steps)
    if kind == "gaussian":
        _reject_unknown(descriptor, {"kind", "sigma", "eps_cut"})
        if "sigma" not in descriptor:
            raise ValueError("gaussian descriptor requires 'sigma'")
        eps_cut = descriptor.get("eps_cut", 1e-12)
        return make_gaussian_initial(float(descriptor["sigma"]), steps, float(eps_cut))
    if kind == "custom":
        _reject_unknown(descriptor, {"kind", "amplitudes", "first_site", "coin"})
        raw = descriptor.get("amplitudes")
        if not isinstance(raw, Sequence) or len(raw) == 0:
            raise ValueError("custom descriptor requires a nonempty 'amplitudes' list")
        pos = np.array([complex(re, im) for re, im in raw], dtype=np.complex128)
        coin_raw = descriptor.get("coin")
        if coin_raw is None:
            coin = COIN_SYMMETRIC
        else:
            pair = np.array([complex(re, im) for re, im in coin_raw], dtype=np.complex128)
            if pair.shape != (2,):
                raise ValueError("custom coin must be two (re, im) pairs")
            norm = float(np.linalg.norm(pair))
            if norm == 0.0:
                raise ValueError("custom coin amplitudes are all zero")
            pair = pair / norm
            coin = CoinState(complex(pair[0]), complex(pair[1]))
        first_site = int(descriptor.get("first_site", 0))
        return make_custom_initial(pos, coin, steps, first_site)
    raise ValueError(f"unknown initial-state kind {kind!r}")


def descriptor_for_state(kind: str, **params) -> dict:
    """Round-trip helper: produce the JSON descriptor for a named initial state."""
    descriptor = {"kind": kind, **params}
    # validate eagerly so bad descriptors fail at construction time, not at run time
    initial_state_from_descriptor(descriptor, steps=1)
    return descriptor


def _reject_unknown(mapping: Mapping, allowed: set) -> None:
    unknown = set(mapping) - allowed
    if unknown:
        raise ValueError(f"unknown descriptor keys: {sorted(unknown)}")
