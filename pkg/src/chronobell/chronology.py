"""Frame-ordered sampling of spacelike-separated two-qubit measurements.

A `Chronology` says which party's measurement is treated as first. For each
time order the outcome pair is produced by the same two-step rule: the first
party's result is an inverse-CDF function of its marginal and one stored
lambda value, the second party's result is an inverse-CDF function of the
collapsed conditional and a second lambda value. Outcomes map as
``+1 if lambda < P(+) else -1``, with the chronologically first party always
consuming the first word of the trial's substream, so both orders run on
identical lambda budgets.

Two facts fall out and are quantified here: the exact outcome distributions
do not depend on the chronology, while the realized outcome pairs produced
from one shared lambda file generally do.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ImpossibleOutcomeError
from .lambdafile import DEFAULT_BLOCK, LambdaStream
from .quantum import (
    OUTCOMES,
    BlochSetting,
    CorrelationTable,
    TwoQubitState,
    born_marginal,
    collapse,
    joint_distribution,
)


class Chronology(Enum):
    """Which party's measurement counts as first."""

    AB = "AB"  # party A first
    BA = "BA"  # party B first


@dataclass(frozen=True)
class TrialResult:
    """One simulated run: the settings, the outcome pair, and the lambdas used."""

    chronology: Chronology
    setting_a: BlochSetting
    setting_b: BlochSetting
    alpha: int
    beta: int
    lambdas: tuple[float, float]
    index: int = 0

    def __post_init__(self) -> None:
        if self.alpha not in OUTCOMES or self.beta not in OUTCOMES:
            raise ValueError("outcomes must be +1 or -1")
        if len(self.lambdas) != 2:
            raise ValueError("a trial consumes exactly two lambda values")

    @property
    def pair(self) -> tuple[int, int]:
        return (self.alpha, self.beta)


def _check_lambda(lam: float) -> None:
    if not 0.0 <= lam < 1.0:
        raise ValueError(f"lambda value must lie in [0, 1), got {lam!r}")


def sample_first(state: TwoQubitState, setting: BlochSetting, lam: float) -> int:
    """Outcome of the chronologically first measurement: +1 iff lam < P(+)."""
    _check_lambda(lam)
    return 1 if lam < born_marginal(state, setting, 1) else -1


def sample_second(
    state: TwoQubitState,
    first_setting: BlochSetting,
    first_outcome: int,
    second_setting: BlochSetting,
    lam: float,
) -> int:
    """Outcome of the second measurement, conditioned on the first by collapse."""
    _check_lambda(lam)
    post = collapse(state, first_setting, first_outcome)
    return 1 if lam < born_marginal(post, second_setting, 1) else -1


def run_trial(
    state: TwoQubitState,
    a: BlochSetting,
    b: BlochSetting,
    chronology: Chronology | str,
    stream: LambdaStream,
    index: int = 0,
) -> TrialResult:
    """One trial under the given chronology, consuming two stream words."""
    chronology = Chronology(chronology)
    lam1 = stream.next_real()
    if chronology is Chronology.AB:
        alpha = sample_first(state, a, lam1)
        lam2 = stream.next_real()
        beta = sample_second(state, a, alpha, b, lam2)
    else:
        beta = sample_first(state, b, lam1)
        lam2 = stream.next_real()
        alpha = sample_second(state, b, beta, a, lam2)
    return TrialResult(chronology, a, b, alpha, beta, (lam1, lam2), index)


def _conditional_thresholds(
    state: TwoQubitState, first: BlochSetting, second: BlochSetting
) -> tuple[float, dict[int, float]]:
    """P(first=+) and P(second=+ | first outcome), nan on impossible branches."""
    p_first = born_marginal(state, first, 1)
    q: dict[int, float] = {}
    for outcome in OUTCOMES:
        try:
            q[outcome] = born_marginal(collapse(state, first, outcome), second, 1)
        except ImpossibleOutcomeError:
            q[outcome] = math.nan
    return p_first, q


def _threshold_pairs(
    state: TwoQubitState,
    a: BlochSetting,
    b: BlochSetting,
    chronology: Chronology,
    lams: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """(alpha, beta) arrays for rows of (lam1, lam2).

    Vectorized form of the run_trial sampling rule; the tests pin the two
    paths to each other trial by trial.
    """
    first, second = (a, b) if chronology is Chronology.AB else (b, a)
    p_first, q = _conditional_thresholds(state, first, second)
    first_out = np.where(lams[:, 0] < p_first, 1, -1)
    cutoffs = np.where(first_out == 1, q[1], q[-1])
    second_out = np.where(lams[:, 1] < cutoffs, 1, -1)
    if chronology is Chronology.AB:
        return first_out, second_out
    return second_out, first_out


def _gather_trial_lambdas(
    stream: LambdaStream, pair_index: int, trials: int, block: int
) -> np.ndarray:
    """The (trials, 2) lambda values for one setting pair's trial substreams."""
    lams = np.empty((trials, 2))
    for t in range(trials):
        sub = stream.split(pair_index * trials + t, block)
        lams[t] = sub.take(2)
    return lams


def estimate_table(
    state: TwoQubitState,
    settings_a,
    settings_b,
    chronology: Chronology | str,
    trials: int,
    stream: LambdaStream,
    block: int = DEFAULT_BLOCK,
) -> CorrelationTable:
    """Empirical outcome tables from `trials` runs per setting pair.

    Trial t of setting pair k draws from substream ``k * trials + t``, so the
    estimate is a pure function of the file and is independent of execution
    order.
    """
    chronology = Chronology(chronology)
    if trials < 1:
        raise ValueError("trials must be at least 1")
    settings_a = tuple(settings_a)
    settings_b = tuple(settings_b)
    cells = np.zeros((len(settings_a), len(settings_b), 2, 2))
    stderr = np.zeros_like(cells)
    for k, (i, j) in enumerate(
        (i, j) for i in range(len(settings_a)) for j in range(len(settings_b))
    ):
        lams = _gather_trial_lambdas(stream, k, trials, block)
        alpha, beta = _threshold_pairs(state, settings_a[i], settings_b[j], chronology, lams)
        flat = (alpha == -1) * 2 + (beta == -1)
        freqs = np.bincount(flat, minlength=4).reshape(2, 2) / trials
        cells[i, j] = freqs
        stderr[i, j] = np.sqrt(freqs * (1.0 - freqs) / trials)
    return CorrelationTable(settings_a, settings_b, cells, stderr, trials)


@dataclass(frozen=True, eq=False)
class CovarianceReport:
    """Chronology comparison: exact distribution agreement, realized divergence.

    `distribution_max_diff[i, j]` is the largest entrywise gap between the
    exact AB and BA joint distributions for setting pair (i, j); None if the
    exact check was not run. `divergence_fraction[i, j]` is the share of
    trials whose realized (alpha, beta) pairs differed between chronologies
    run on the same substream; None if no trials were run.
    """

    settings_a: tuple[BlochSetting, ...]
    settings_b: tuple[BlochSetting, ...]
    distribution_max_diff: np.ndarray | None
    divergence_fraction: np.ndarray | None
    trials: int
    tolerance: float

    @property
    def max_distribution_diff(self) -> float | None:
        if self.distribution_max_diff is None:
            return None
        return float(self.distribution_max_diff.max())

    @property
    def distribution_pass(self) -> bool | None:
        worst = self.max_distribution_diff
        if worst is None:
            return None
        return worst <= self.tolerance

    @property
    def max_divergence(self) -> float | None:
        if self.divergence_fraction is None:
            return None
        return float(self.divergence_fraction.max())

    def to_dict(self) -> dict:
        out: dict = {
            "settings_a": [s.vector.tolist() for s in self.settings_a],
            "settings_b": [s.vector.tolist() for s in self.settings_b],
            "trials": self.trials,
        }
        if self.distribution_max_diff is not None:
            out["distribution"] = {
                "max_diff_per_pair": self.distribution_max_diff.tolist(),
                "max_diff": self.max_distribution_diff,
                "tolerance": self.tolerance,
                "pass": self.distribution_pass,
            }
        if self.divergence_fraction is not None:
            out["realization"] = {
                "divergence_per_pair": self.divergence_fraction.tolist(),
                "max_divergence": self.max_divergence,
            }
        return out

    def merged_with(self, other: "CovarianceReport") -> "CovarianceReport":
        """Combine an exact-part report with a realization-part report."""
        return CovarianceReport(
            self.settings_a,
            self.settings_b,
            self.distribution_max_diff
            if self.distribution_max_diff is not None
            else other.distribution_max_diff,
            self.divergence_fraction
            if self.divergence_fraction is not None
            else other.divergence_fraction,
            max(self.trials, other.trials),
            self.tolerance,
        )


def distribution_covariance_check(
    state: TwoQubitState, settings_a, settings_b, tol: float = 1e-12
) -> CovarianceReport:
    """Exact joint distributions under both chronologies, compared entrywise."""
    settings_a = tuple(settings_a)
    settings_b = tuple(settings_b)
    diffs = np.zeros((len(settings_a), len(settings_b)))
    for i, a in enumerate(settings_a):
        for j, b in enumerate(settings_b):
            ab = joint_distribution(state, a, b, Chronology.AB.value).probs
            ba = joint_distribution(state, a, b, Chronology.BA.value).probs
            diffs[i, j] = np.max(np.abs(ab - ba))
    return CovarianceReport(settings_a, settings_b, diffs, None, 0, tol)


def realization_divergence(
    state: TwoQubitState,
    settings_a,
    settings_b,
    trials: int,
    stream: LambdaStream,
    block: int = DEFAULT_BLOCK,
    tol: float = 1e-12,
) -> CovarianceReport:
    """Share of trials whose realized outcome pairs differ between chronologies.

    Both chronologies replay the same substream per trial, so any difference
    is purely the time order, never the randomness.
    """
    if trials < 1:
        raise ValueError("trials must be at least 1")
    settings_a = tuple(settings_a)
    settings_b = tuple(settings_b)
    fractions = np.zeros((len(settings_a), len(settings_b)))
    for k, (i, j) in enumerate(
        (i, j) for i in range(len(settings_a)) for j in range(len(settings_b))
    ):
        lams = _gather_trial_lambdas(stream, k, trials, block)
        a, b = settings_a[i], settings_b[j]
        alpha_ab, beta_ab = _threshold_pairs(state, a, b, Chronology.AB, lams)
        alpha_ba, beta_ba = _threshold_pairs(state, a, b, Chronology.BA, lams)
        differs = (alpha_ab != alpha_ba) | (beta_ab != beta_ba)
        fractions[i, j] = float(np.mean(differs))
    return CovarianceReport(settings_a, settings_b, None, fractions, trials, tol)
