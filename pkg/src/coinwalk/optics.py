"""Beam-splitter mesh realizing the walk in spatial optical modes.

Beam location encodes the walker site and beam direction the coin. A mesh of
depth N consists of a preparation stage (a balanced splitter plus a
quarter-wave phase producing the symmetric coin at site 0), N rows of
splitters whose 2x2 transfer matrix equals the coin matrix at the chosen
angle, optional per-arm phases between rows, and a detection row of balanced
splitters that interferes each site's two arms so that one output arm carries
exactly the overlap with the symmetric coin state.

The splitter convention is pinned by equivalence with the abstract walk: a
real cos/sin transfer matrix for the walk rows, and a diag(1, -i) phase ahead
of each detection splitter so the collected arm implements post-selection on
the symmetric coin. Random per-arm phases emulate spatial dephasing
qualitatively (they suppress position coherences in the mask ensemble); they
are not claimed to reproduce the per-step dephasing channel exactly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .analysis import DegeneratePostselectionError
from .evolution import coin_operator
from .noise import RngStream
from .states import LatticeSpec, sized_lattice

_SQRT_HALF = 1.0 / math.sqrt(2.0)

POWER_ATOL = 1e-12


@dataclass(frozen=True)
class BeamSplitterNode:
    """One two-mode coupler: mixing angle, row index, and lattice site."""

    theta: float
    layer: int
    site: int

    @property
    def transfer_matrix(self) -> np.ndarray:
        return coin_operator(self.theta).matrix


@dataclass(frozen=True, eq=False)
class PhaseMask:
    """Per-arm phases applied after each splitter row.

    ``phases[layer, site_index, direction]`` is the phase (radians) on the arm
    leaving row ``layer`` at that site and direction; zero means the arm was
    left untouched. ``rate`` records the draw probability used to build the
    mask.
    """

    phases: np.ndarray
    rate: float

    def __post_init__(self) -> None:
        phases = np.array(self.phases, dtype=float, copy=True)
        if phases.ndim != 3 or phases.shape[2] != 2:
            raise ValueError(f"phases must have shape (depth, sites, 2), got {phases.shape}")
        if not 0.0 <= self.rate <= 1.0:
            raise ValueError(f"rate must lie in [0, 1], got {self.rate!r}")
        phases.setflags(write=False)
        object.__setattr__(self, "phases", phases)


@dataclass(frozen=True)
class OpticalMesh:
    """Layered splitter grid equivalent to an N-step walk from the origin."""

    depth: int
    theta: float
    lattice: LatticeSpec
    explicit_preparation: bool = False
    layer_loss: float = 1.0

    def nodes(self) -> list[BeamSplitterNode]:
        """Illuminated splitter nodes, row by row (sites follow walk parity)."""
        out = []
        for layer in range(1, self.depth + 1):
            reach = layer - 1
            out.extend(
                BeamSplitterNode(self.theta, layer, site)
                for site in range(-reach, reach + 1, 2)
            )
        return out


def build_mesh(
    steps: int,
    theta: float,
    *,
    explicit_preparation: bool = False,
    layer_loss: float = 1.0,
) -> OpticalMesh:
    """Mesh of ``steps`` splitter rows plus preparation and detection stages.

    ``layer_loss`` is an optional uniform per-row amplitude attenuation
    (1.0 = lossless); post-selected statistics are renormalized downstream.
    """
    if steps < 1:
        raise ValueError(f"mesh depth must be at least 1, got {steps!r}")
    if not 0.0 < layer_loss <= 1.0:
        raise ValueError(f"layer_loss must lie in (0, 1], got {layer_loss!r}")
    return OpticalMesh(steps, theta, sized_lattice(steps), explicit_preparation, layer_loss)


def zero_phase_mask(mesh: OpticalMesh) -> PhaseMask:
    """All-zero mask for the given mesh (identity between rows)."""
    return PhaseMask(np.zeros((mesh.depth, mesh.lattice.site_count, 2)), 0.0)


def sample_phase_mask(mesh: OpticalMesh, rate: float, rng: RngStream) -> PhaseMask:
    """Independent per-arm phases: 0 with probability 1 - rate, else uniform on (0, 2pi]."""
    if not 0.0 <= rate <= 1.0:
        raise ValueError(f"rate must lie in [0, 1], got {rate!r}")
    g = rng.generator
    shape = (mesh.depth, mesh.lattice.site_count, 2)
    active = g.random(shape) < rate
    draws = (1.0 - g.random(shape)) * (2.0 * math.pi)
    return PhaseMask(np.where(active, draws, 0.0), rate)


def _prepared_input(mesh: OpticalMesh) -> np.ndarray:
    amps = np.zeros((mesh.lattice.site_count, 2), dtype=np.complex128)
    center = mesh.lattice.index(0)
    if mesh.explicit_preparation:
        # Single beam into a balanced splitter, then a quarter-wave phase on
        # the down arm; both arms sit at site 0 ready for the first walk row.
        beam = np.array([1.0, 0.0], dtype=np.complex128)
        mixed = coin_operator(math.pi / 4).matrix @ beam
        mixed[1] *= 1j
        amps[center] = mixed
    else:
        amps[center, 0] = _SQRT_HALF
        amps[center, 1] = 1j * _SQRT_HALF
    return amps


def _shift_arms(amps: np.ndarray) -> np.ndarray:
    out = np.empty_like(amps)
    out[:, 0] = np.roll(amps[:, 0], 1)
    out[:, 1] = np.roll(amps[:, 1], -1)
    return out


def propagate(
    mesh: OpticalMesh, mask: PhaseMask | None = None
) -> tuple[np.ndarray, np.ndarray]:
    """Push the prepared input through all splitter rows.

    Returns ``(amplitudes, powers)`` over (site, direction) after the last
    row, before detection. Power is conserved row by row in the lossless
    model; site powers (summed over direction) reproduce the walk's P(n).
    """
    if mask is not None and mask.phases.shape != (mesh.depth, mesh.lattice.site_count, 2):
        raise ValueError(
            f"mask shape {mask.phases.shape} does not match mesh "
            f"{(mesh.depth, mesh.lattice.site_count, 2)}"
        )
    coin = coin_operator(mesh.theta).matrix
    amps = _prepared_input(mesh)
    for layer in range(mesh.depth):
        amps = amps @ coin.T
        if mask is not None:
            amps = amps * np.exp(1j * mask.phases[layer])
        if mesh.layer_loss != 1.0:
            amps = amps * mesh.layer_loss
        amps = _shift_arms(amps)
    return amps, np.abs(amps) ** 2


def layer_power_trace(mesh: OpticalMesh, mask: PhaseMask | None = None) -> np.ndarray:
    """Total power after each row (diagnostic for the conservation contract)."""
    coin = coin_operator(mesh.theta).matrix
    amps = _prepared_input(mesh)
    powers = np.empty(mesh.depth)
    for layer in range(mesh.depth):
        amps = amps @ coin.T
        if mask is not None:
            amps = amps * np.exp(1j * mask.phases[layer])
        if mesh.layer_loss != 1.0:
            amps = amps * mesh.layer_loss
        amps = _shift_arms(amps)
        powers[layer] = float(np.sum(np.abs(amps) ** 2))
    return powers


def project_detection(mesh: OpticalMesh, amplitudes: np.ndarray) -> tuple[np.ndarray, float]:
    """Detection row: conditional site amplitudes and success probability.

    Each site's arms pass diag(1, -i) and a balanced splitter; the collected
    arm then carries <symmetric coin | state at site>, matching coin
    post-selection (outcome j=0) on the abstract walk, success probability
    included.
    """
    if amplitudes.shape != (mesh.lattice.site_count, 2):
        raise ValueError(
            f"amplitudes have shape {amplitudes.shape}, expected {(mesh.lattice.site_count, 2)}"
        )
    collected = (amplitudes[:, 0] - 1j * amplitudes[:, 1]) * _SQRT_HALF
    prob = float(np.sum(np.abs(collected) ** 2))
    if prob < 1e-12:
        raise DegeneratePostselectionError(f"detection arm carries probability {prob!r}")
    return collected / math.sqrt(prob), prob


def mesh_to_json(mesh: OpticalMesh, mask: PhaseMask | None = None) -> dict:
    """JSON-serializable mesh description: stages, node angles, optional phases."""
    layers = []
    for layer in range(1, mesh.depth + 1):
        reach = layer - 1
        layers.append(
            {
                "layer": layer,
                "nodes": [
                    {"site": site, "theta": mesh.theta}
                    for site in range(-reach, reach + 1, 2)
                ],
            }
        )
    doc = {
        "depth": mesh.depth,
        "coin_angle": mesh.theta,
        "half_width": mesh.lattice.half_width,
        "layer_loss": mesh.layer_loss,
        "preparation": {
            "kind": "explicit-splitter" if mesh.explicit_preparation else "ideal",
            "theta": math.pi / 4,
        },
        "detection": {"theta": math.pi / 4, "collected_arm": "symmetric-coin"},
        "layers": layers,
    }
    if mask is not None:
        doc["phase_mask"] = {"rate": mask.rate, "phases": mask.phases.tolist()}
    return doc
