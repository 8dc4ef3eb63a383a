"""Toy spontaneous-localization process on a periodic grid.

A "hit" multiplies one particle's wavefunction by a Gaussian column of a
`HitKernel` and renormalizes; the hit's (time, site, particle) triple is the
flash. Hit centers are Born-weighted, hit times are a Poisson stream, and
every draw comes from a lambda stream, so whole histories replay exactly.

The same distribution/realization split as in the measurement modules shows
up here: for two particles the exact joint distribution of (first hit on
particle 1, first hit on particle 2) does not depend on which particle is
hit first, but the realized pair of hit locations drawn from one shared
lambda substream does.

Deliberate discretization choices, none of them physical claims: periodic
boundary with per-column renormalization (makes hit-center probabilities sum
to 1 exactly on a finite grid), and no wave evolution between hits - the
point is hit-order covariance, not dynamics. Defaults (16 sites, width 2,
rate 1, duration 4) keep exact oracles cheap while still localizing visibly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ImpossibleFlashError, InvalidStateError
from .lambdafile import LambdaStream

ATOL = 1e-12
_ZERO_CENTER = 1e-24
_PHASE_CUTOFF = 1e-12

DEFAULT_SITES = 16
DEFAULT_WIDTH = 2.0
DEFAULT_RATE = 1.0
DEFAULT_DURATION = 4.0


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = arr.copy()
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True, eq=False)
class HitKernel:
    """Localization weights G[center, site] on a periodic grid.

    Columns are rescaled so sum_center G[center, site]**2 == 1 at every site,
    which makes hit-center probabilities of any normalized state sum to 1.
    """

    weights: np.ndarray
    width: float
    spacing: float

    def __post_init__(self) -> None:
        w = np.asarray(self.weights, dtype=float)
        if w.ndim != 2 or w.shape[0] != w.shape[1]:
            raise ValueError(f"kernel must be square, got shape {w.shape}")
        completeness = (w**2).sum(axis=0)
        if np.any(np.abs(completeness - 1.0) > ATOL):
            raise ValueError("kernel columns must satisfy sum of squares == 1")
        object.__setattr__(self, "weights", _readonly(w))

    @property
    def n_sites(self) -> int:
        return self.weights.shape[0]

    def squared(self) -> np.ndarray:
        """G**2, the per-site hit-center probabilities; columns sum to 1."""
        return self.weights**2


def make_hit_kernel(n_sites: int, width: float, spacing: float = 1.0) -> HitKernel:
    """Gaussian hit kernel with periodic wraparound, columns renormalized."""
    if n_sites < 2:
        raise ValueError(f"need at least 2 sites, got {n_sites}")
    if width <= 0.0:
        raise ValueError(f"localization width must be positive, got {width!r}")
    if spacing <= 0.0:
        raise ValueError(f"grid spacing must be positive, got {spacing!r}")
    idx = np.arange(n_sites)
    dist = np.abs(idx[:, None] - idx[None, :])
    dist = np.minimum(dist, n_sites - dist)
    raw = np.exp(-((dist * spacing) ** 2) / (4.0 * width**2))
    column_norms = np.sqrt((raw**2).sum(axis=0))
    return HitKernel(raw / column_norms[None, :], width, spacing)


@dataclass(frozen=True, eq=False)
class GridWavefunction:
    """Complex amplitudes over N sites (one particle) or N x N (two particles)."""

    amplitudes: np.ndarray
    spacing: float = 1.0

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim not in (1, 2):
            raise InvalidStateError("wavefunction must be 1-D or 2-D")
        if amps.ndim == 2 and amps.shape[0] != amps.shape[1]:
            raise InvalidStateError("two-particle grid must be square")
        if not np.all(np.isfinite(amps)):
            raise InvalidStateError("amplitudes must be finite")
        norm = float(np.linalg.norm(amps))
        if abs(norm - 1.0) > ATOL:
            raise InvalidStateError(f"wavefunction must be normalized, got norm {norm!r}")
        object.__setattr__(self, "amplitudes", _readonly(amps))

    @property
    def n_particles(self) -> int:
        return self.amplitudes.ndim

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[0]

    def site_probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2


def make_localized(n_sites: int, site: int) -> GridWavefunction:
    amps = np.zeros(n_sites, dtype=complex)
    amps[site] = 1.0
    return GridWavefunction(amps)


def make_uniform(n_sites: int) -> GridWavefunction:
    return GridWavefunction(np.full(n_sites, 1.0 / math.sqrt(n_sites), dtype=complex))


def make_entangled_pair(n_sites: int, site_j: int, site_k: int) -> GridWavefunction:
    """(|j,k> - |k,j>)/sqrt(2): the grid analog of the two-qubit singlet."""
    if site_j == site_k:
        raise ValueError("the two sites must differ")
    amps = np.zeros((n_sites, n_sites), dtype=complex)
    amps[site_j, site_k] = 1.0 / math.sqrt(2.0)
    amps[site_k, site_j] = -1.0 / math.sqrt(2.0)
    return GridWavefunction(amps)


def _check_particle(psi: GridWavefunction, particle: int) -> None:
    if not 0 <= particle < psi.n_particles:
        raise ValueError(
            f"particle must be in 0..{psi.n_particles - 1}, got {particle}"
        )


def flash_distribution(
    psi: GridWavefunction, kernel: HitKernel, particle: int = 0
) -> np.ndarray:
    """P(center) = squared norm of the hit-damped state, summing to 1."""
    _check_particle(psi, particle)
    if kernel.n_sites != psi.n_sites:
        raise ValueError("kernel and wavefunction grids differ")
    site_probs = psi.site_probabilities()
    if psi.n_particles == 2:
        site_probs = site_probs.sum(axis=1 - particle)
    return kernel.squared() @ site_probs


def _fix_global_phase(amps: np.ndarray) -> np.ndarray:
    for value in amps.ravel():
        if abs(value) > _PHASE_CUTOFF:
            return amps * (value.conjugate() / abs(value))
    return amps


def apply_hit(
    psi: GridWavefunction, kernel: HitKernel, particle: int, center: int
) -> GridWavefunction:
    """Damp the chosen particle by the kernel column at `center`, renormalize."""
    _check_particle(psi, particle)
    column = kernel.weights[center]
    if psi.n_particles == 1:
        damped = column * psi.amplitudes
    elif particle == 0:
        damped = column[:, None] * psi.amplitudes
    else:
        damped = column[None, :] * psi.amplitudes
    weight = float(np.linalg.norm(damped)) ** 2
    if weight <= _ZERO_CENTER:
        raise ImpossibleFlashError(
            f"hit at site {center} on particle {particle} has zero probability"
        )
    return GridWavefunction(_fix_global_phase(damped / math.sqrt(weight)), psi.spacing)


def sample_hit_center(
    psi: GridWavefunction, kernel: HitKernel, particle: int, lam: float
) -> int:
    """Inverse-CDF draw from the flash distribution: smallest x with CDF(x) > lam."""
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"lambda value must lie in [0, 1), got {lam!r}")
    cdf = np.cumsum(flash_distribution(psi, kernel, particle))
    index = int(np.searchsorted(cdf, lam, side="right"))
    return min(index, kernel.n_sites - 1)


@dataclass(frozen=True)
class FlashRecord:
    """One flash: when, where, and which particle."""

    time: float
    site: int
    particle: int


@dataclass(eq=False)
class FlashHistory:
    """Replayable run: the flashes in time order plus the final state."""

    records: list[FlashRecord] = field(default_factory=list)
    final_state: GridWavefunction | None = None
    stream_label: str = ""

    def __len__(self) -> int:
        return len(self.records)

    def to_lines(self) -> list[str]:
        """Line-oriented serialization: time, particle, site (tab-separated)."""
        return [f"{r.time!r}\t{r.particle}\t{r.site}" for r in self.records]


def run_flash_process(
    psi0: GridWavefunction,
    kernel: HitKernel,
    rate: float,
    duration: float,
    stream: LambdaStream,
) -> FlashHistory:
    """Poisson-timed hit process, fully determined by the lambda stream.

    Per hit the stream supplies three words: the exponential waiting time of
    the total-rate process, the uniform particle choice, and the inverse-CDF
    hit center. The final waiting-time draw that overshoots `duration` is
    still consumed.
    """
    if rate <= 0.0:
        raise ValueError(f"hit rate must be positive, got {rate!r}")
    if duration <= 0.0:
        raise ValueError(f"duration must be positive, got {duration!r}")
    if kernel.n_sites != psi0.n_sites:
        raise ValueError("kernel and wavefunction grids differ")

    n_particles = psi0.n_particles
    total_rate = rate * n_particles
    kernel_sq = kernel.squared()

    amps = psi0.amplitudes.copy()
    records: list[FlashRecord] = []
    now = 0.0
    while True:
        u_time = stream.next_real()
        now += -math.log1p(-u_time) / total_rate
        if now > duration:
            break
        u_particle = stream.next_real()
        particle = min(int(u_particle * n_particles), n_particles - 1)

        site_probs = np.abs(amps) ** 2
        if n_particles == 2:
            site_probs = site_probs.sum(axis=1 - particle)
        cdf = np.cumsum(kernel_sq @ site_probs)
        u_center = stream.next_real()
        center = min(int(np.searchsorted(cdf, u_center, side="right")), kernel.n_sites - 1)

        column = kernel.weights[center]
        if n_particles == 1:
            amps = column * amps
        elif particle == 0:
            amps = column[:, None] * amps
        else:
            amps = column[None, :] * amps
        amps = amps / np.linalg.norm(amps)
        records.append(FlashRecord(now, center, particle))

    final = GridWavefunction(_fix_global_phase(amps), psi0.spacing)
    return FlashHistory(records, final, stream.label)


@dataclass(frozen=True, eq=False)
class OrderingReport:
    """Exact joint first-hit distributions under both hit orders, compared."""

    max_diff: float
    tolerance: float
    joint_first_then_second: np.ndarray
    joint_second_then_first: np.ndarray

    @property
    def passed(self) -> bool:
        return self.max_diff <= self.tolerance


def ordering_invariance_exact(
    psi: GridWavefunction, kernel: HitKernel, tol: float = 1e-12
) -> OrderingReport:
    """Joint law of one hit per particle, computed sequentially in both orders.

    Order "1 then 2" builds P(x1) * P(x2 | hit at x1 applied); the reversed
    order mirrors it. The hit operators act diagonally on distinct tensor
    factors, so the two joints agree - this routine checks that fact through
    the actual sequential machinery rather than assuming it.
    """
    if psi.n_particles != 2:
        raise ValueError("ordering check needs a two-particle wavefunction")
    if psi.n_sites > 32:
        raise ValueError("exact check is limited to grids of at most 32 sites")

    def sequential_joint(first_particle: int) -> np.ndarray:
        second_particle = 1 - first_particle
        n = psi.n_sites
        joint = np.zeros((n, n))
        first_dist = flash_distribution(psi, kernel, first_particle)
        for x_first in range(n):
            p_first = float(first_dist[x_first])
            # skip centers apply_hit would reject as numerically impossible
            if p_first <= 1e-20:
                continue
            post = apply_hit(psi, kernel, first_particle, x_first)
            joint[x_first] = p_first * flash_distribution(post, kernel, second_particle)
        return joint

    joint_12 = sequential_joint(0)
    joint_21 = sequential_joint(1)  # indexed [x2, x1]
    max_diff = float(np.max(np.abs(joint_12 - joint_21.T)))
    return OrderingReport(max_diff, tol, joint_12, joint_21)


def sample_flash_pair(
    psi: GridWavefunction,
    kernel: HitKernel,
    first_particle: int,
    lam1: float,
    lam2: float,
) -> tuple[int, int]:
    """Realized (site on particle 0, site on particle 1) for one hit order.

    Uses the same two-draw inverse-CDF rule as the measurement trials: the
    first word picks the first particle's hit center, the second word picks
    the other particle's center from the post-hit state.
    """
    if psi.n_particles != 2:
        raise ValueError("flash pairs need a two-particle wavefunction")
    _check_particle(psi, first_particle)
    x_first = sample_hit_center(psi, kernel, first_particle, lam1)
    post = apply_hit(psi, kernel, first_particle, x_first)
    x_second = sample_hit_center(post, kernel, 1 - first_particle, lam2)
    if first_particle == 0:
        return (x_first, x_second)
    return (x_second, x_first)
