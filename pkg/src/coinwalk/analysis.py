"""Measurement-side analysis of walk states.

Covers the read-out chain: tracing out the coin, position distributions and
their variance, the reduced-coin von Neumann entropy, coin post-selection
(conditional position states), fidelity against pure position targets
(end-site superpositions, their post-selected variants, Gaussian cats), and
the critical-coin-angle solver for end-site localization.

All fidelities here are of the form <T| rho |T> with a pure target T, which
is exact for the target families used; no mixed-mixed (Uhlmann) fidelity is
provided.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .evolution import evolve_pure
from .states import (
    COIN_SYMMETRIC,
    COIN_SYMMETRIC_ORTH,
    JointDensityMatrix,
    JointPureState,
    LatticeSpec,
    NORM_ATOL,
    TRACE_ATOL,
    make_localized_initial,
)

_SQRT_HALF = 1.0 / math.sqrt(2.0)

#: Diagonal entries of a position density matrix may dip this far below zero
#: from rounding; anything lower signals upstream corruption.
NEGATIVE_DIAGONAL_ATOL = 1e-12

#: Post-selection outcomes with success probability below this are degenerate.
DEGENERATE_PROBABILITY = 1e-12

_PROJECTION_COINS = (COIN_SYMMETRIC.amplitudes, COIN_SYMMETRIC_ORTH.amplitudes)


class DegeneratePostselectionError(RuntimeError):
    """The requested coin outcome has (numerically) zero success probability."""


class NoBracketError(RuntimeError):
    """The end-site ratio never crosses the requested value on the scanned interval."""


@dataclass(frozen=True, eq=False)
class PositionDistribution:
    """Probability vector over lattice sites; p[i] belongs to lattice.sites()[i]."""

    lattice: LatticeSpec
    p: np.ndarray

    def __post_init__(self) -> None:
        p = np.array(self.p, dtype=float, copy=True)
        if p.shape != (self.lattice.site_count,):
            raise ValueError(f"distribution has shape {p.shape}, expected ({self.lattice.site_count},)")
        if p.min() < 0.0:
            raise ValueError(f"negative probability {p.min()!r}")
        total = float(p.sum())
        if abs(total - 1.0) > TRACE_ATOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")
        p.setflags(write=False)
        object.__setattr__(self, "p", p)

    def probability(self, site: int) -> float:
        return float(self.p[self.lattice.index(site)])


def trace_out_coin(rho: JointDensityMatrix) -> np.ndarray:
    """Reduced position density matrix, coin traced out."""
    return rho.blocks[0, 0] + rho.blocks[1, 1]


def position_distribution(rho_p: np.ndarray, lattice: LatticeSpec) -> PositionDistribution:
    """Diagonal of a position density matrix as a probability vector.

    Rounding negatives above -1e-12 are clipped to zero; anything lower
    raises, since a valid state cannot produce it.
    """
    diag = np.real(np.diagonal(rho_p)).copy()
    low = float(diag.min())
    if low < -NEGATIVE_DIAGONAL_ATOL:
        raise ValueError(f"position diagonal has entry {low!r}; upstream state is corrupted")
    np.clip(diag, 0.0, None, out=diag)
    return PositionDistribution(lattice, diag)


def distribution_from_pure(psi: JointPureState) -> PositionDistribution:
    """P(n) of a pure state, without building its density matrix."""
    return PositionDistribution(psi.lattice, np.sum(np.abs(psi.amps) ** 2, axis=1))


def variance(dist: PositionDistribution) -> float:
    """Variance of the site label under the distribution."""
    sites = dist.lattice.sites().astype(float)
    mean = float(sites @ dist.p)
    return float((sites**2) @ dist.p - mean**2)


def coin_entropy(psi: JointPureState) -> float:
    """Von Neumann entropy (nats) of the reduced coin state of a pure state.

    Zero for product states, ln 2 when walker and coin are maximally
    entangled.
    """
    reduced = psi.amps.T @ psi.amps.conj()
    evals = np.clip(np.linalg.eigvalsh(reduced).real, 0.0, 1.0)
    nonzero = evals[evals > 0.0]
    return float(-(nonzero * np.log(nonzero)).sum())


def project_coin(rho: JointDensityMatrix, j: int) -> tuple[np.ndarray, float]:
    """Post-select the coin on the symmetric state (j=0) or its complement (j=1).

    Returns the normalized conditional position density matrix and the
    success probability; the two outcome probabilities sum to one.
    """
    if j not in (0, 1):
        raise ValueError(f"outcome j must be 0 or 1, got {j!r}")
    v = _PROJECTION_COINS[j]
    conditional = np.einsum("c,cdij,d->ij", v.conj(), rho.blocks, v)
    prob = float(np.real(np.trace(conditional)))
    if prob < DEGENERATE_PROBABILITY:
        raise DegeneratePostselectionError(f"outcome j={j} has probability {prob!r}")
    return conditional / prob, prob


def project_coin_pure(psi: JointPureState, j: int) -> tuple[np.ndarray, float]:
    """Conditional position amplitudes and success probability for a pure state."""
    if j not in (0, 1):
        raise ValueError(f"outcome j must be 0 or 1, got {j!r}")
    v = _PROJECTION_COINS[j]
    amp = psi.amps @ v.conj()
    prob = float(np.sum(np.abs(amp) ** 2))
    if prob < DEGENERATE_PROBABILITY:
        raise DegeneratePostselectionError(f"outcome j={j} has probability {prob!r}")
    return amp / math.sqrt(prob), prob


@dataclass(frozen=True, eq=False)
class TargetState:
    """Normalized pure position state used as a fidelity target."""

    kind: str
    lattice: LatticeSpec
    amps: np.ndarray

    def __post_init__(self) -> None:
        amps = np.array(self.amps, dtype=np.complex128, copy=True)
        if amps.shape != (self.lattice.site_count,):
            raise ValueError(f"target has shape {amps.shape}, expected ({self.lattice.site_count},)")
        norm_sq = float(np.sum(np.abs(amps) ** 2))
        if abs(norm_sq - 1.0) > NORM_ATOL:
            raise ValueError(f"target state is not normalized: total weight {norm_sq!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amps", amps)


def end_superposition_target(lattice: LatticeSpec, l: int, sign: int) -> TargetState:
    """(|+l> + sign |-l>) / sqrt(2) with sign in {+1, -1} and l >= 1."""
    if sign not in (1, -1):
        raise ValueError(f"sign must be +1 or -1, got {sign!r}")
    if l < 1:
        raise ValueError(f"site separation l must be >= 1, got {l!r}")
    amps = np.zeros(lattice.site_count, dtype=np.complex128)
    amps[lattice.index(l)] = _SQRT_HALF
    amps[lattice.index(-l)] = sign * _SQRT_HALF
    return TargetState("end-superposition", lattice, amps)


def tau_target(lattice: LatticeSpec, steps: int, j: int) -> TargetState:
    """Post-selected end superposition of the zero-angle walk.

    Projecting the zero-angle walk's output on coin outcome j leaves
    (|+steps> + (-1)^(steps+j) |-steps>) / sqrt(2); the relative sign is fixed
    by the projection algebra, not a free parameter.
    """
    if j not in (0, 1):
        raise ValueError(f"outcome j must be 0 or 1, got {j!r}")
    sign = 1 if (steps + j) % 2 == 0 else -1
    base = end_superposition_target(lattice, steps, sign)
    return TargetState("tau", lattice, base.amps)


def gaussian_cat_target(lattice: LatticeSpec, size: int, sigma: float) -> TargetState:
    """Even superposition of two Gaussian packets centred at +-size/2.

    ``sigma`` is the amplitude width parameter of each packet (the same
    convention as the Gaussian initial state); the two packets enter with
    equal weight, so the amplitudes are reflection symmetric.
    """
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    sites = lattice.sites().astype(float)
    half = size / 2.0
    profile = np.exp(-((sites - half) ** 2) / (4.0 * sigma * sigma)) + np.exp(
        -((sites + half) ** 2) / (4.0 * sigma * sigma)
    )
    amps = (profile / np.linalg.norm(profile)).astype(np.complex128)
    return TargetState("gaussian-cat", lattice, amps)


def fidelity(rho_p: np.ndarray, target: TargetState) -> float:
    """<T| rho |T> for a pure target; real, in [0, 1] up to rounding."""
    return float(np.real(target.amps.conj() @ rho_p @ target.amps))


def fidelity_pure(position_amps: np.ndarray, target: TargetState) -> float:
    """|<T|psi>|^2 between a pure position state and a pure target."""
    return float(abs(target.amps.conj() @ position_amps) ** 2)


def best_end_fidelity(
    rho_p: np.ndarray, lattice: LatticeSpec, steps: int, k_max: int = 3
) -> tuple[float, int, int]:
    """Best fidelity against (|-steps+k> + s|steps-k>)/sqrt(2) over s and k.

    Maximizes over s in {+1, -1} and k in 0..k_max; returns
    (value, best_k, best_s). Ties resolve to the smallest k, then s=+1.
    """
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    best_value, best_k, best_s = -1.0, 0, 1
    for k in range(k_max + 1):
        separation = steps - k
        if separation < 1:
            break
        for s in (1, -1):
            value = fidelity(rho_p, end_superposition_target(lattice, separation, s))
            if value > best_value:
                best_value, best_k, best_s = value, k, s
    return best_value, best_k, best_s


def best_end_fidelity_pure(
    position_amps: np.ndarray, lattice: LatticeSpec, steps: int, k_max: int = 3
) -> tuple[float, int, int]:
    """Pure-state variant of :func:`best_end_fidelity`."""
    if k_max < 0:
        raise ValueError("k_max must be non-negative")
    best_value, best_k, best_s = -1.0, 0, 1
    for k in range(k_max + 1):
        separation = steps - k
        if separation < 1:
            break
        for s in (1, -1):
            value = fidelity_pure(position_amps, end_superposition_target(lattice, separation, s))
            if value > best_value:
                best_value, best_k, best_s = value, k, s
    return best_value, best_k, best_s


def end_site_gap(theta: float, steps: int, ratio: float) -> float:
    """P(steps) - ratio * P(steps - 2) for a walk of ``steps`` from the origin.

    The comparison site is steps - 2, not steps - 1: parity empties every
    other site, so the neighbour of the end site always has zero probability.
    """
    psi = evolve_pure(make_localized_initial(steps), theta, steps)
    p = np.sum(np.abs(psi.amps) ** 2, axis=1)
    return float(p[psi.lattice.index(steps)] - ratio * p[psi.lattice.index(steps - 2)])


def critical_theta(
    steps: int,
    ratio: float,
    *,
    theta_lo: float = 1e-4,
    theta_hi: float = math.pi / 4,
    scan_points: int = 160,
    tol: float = 1e-5,
) -> float:
    """Coin angle where the end-site probability is ``ratio`` times its inner neighbour.

    Scans ``scan_points`` angles on [theta_lo, theta_hi] for the first sign
    change of the gap P(steps) - ratio * P(steps - 2) and bisects that bracket
    down to ``tol`` radians. Raises :class:`NoBracketError` when the gap never
    changes sign on the grid.
    """
    if ratio <= 1.0:
        raise ValueError(f"ratio must exceed 1, got {ratio!r}")
    if steps < 2:
        raise ValueError("steps must be >= 2")
    if scan_points < 2:
        raise ValueError("scan_points must be >= 2")
    grid = np.linspace(theta_lo, theta_hi, scan_points)
    lo = float(grid[0])
    g_lo = end_site_gap(lo, steps, ratio)
    hi = None
    for candidate in grid[1:]:
        g = end_site_gap(float(candidate), steps, ratio)
        if g_lo == 0.0:
            return lo
        if (g_lo > 0.0) != (g > 0.0):
            hi = float(candidate)
            g_hi = g
            break
        lo, g_lo = float(candidate), g
    if hi is None:
        raise NoBracketError(
            f"gap P({steps}) - {ratio} * P({steps - 2}) has no sign change on "
            f"[{theta_lo}, {theta_hi}] with {scan_points} scan points"
        )
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        g_mid = end_site_gap(mid, steps, ratio)
        if g_mid == 0.0:
            return mid
        if (g_mid > 0.0) == (g_lo > 0.0):
            lo, g_lo = mid, g_mid
        else:
            hi, g_hi = mid, g_mid
    return 0.5 * (lo + hi)
