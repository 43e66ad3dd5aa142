"""Trial outcome aggregation and confidence reporting."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from ..errors import DegenerateSample, InternalError, ParameterError

EXCLUDED = -1  # trial outcome for privacy runs voided by the permutation check


def wilson_interval(successes: int, n: int, z: float = 1.96) -> tuple[float, float]:
    """Wilson score interval for a binomial proportion (95% by default)."""
    if n <= 0:
        raise ParameterError("interval needs at least one observation")
    if not 0 <= successes <= n:
        raise ParameterError(f"successes {successes} outside [0, {n}]")
    phat = successes / n
    z2 = z * z
    denom = 1.0 + z2 / n
    center = (phat + z2 / (2.0 * n)) / denom
    half = z * math.sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


@dataclass
class TrialReport:
    """Outcomes of a batch of independent experiment trials.

    outcomes holds one entry per trial: 1 (adversary wins), 0 (loses),
    or -1 (privacy trial excluded before the guess).  details carries
    one small dict per trial for protocol-specific diagnostics.
    """

    experiment: str
    protocol: str
    strategy: str
    seed: int
    outcomes: list[int] = field(default_factory=list)
    details: list[dict[str, Any]] = field(default_factory=list)

    def __post_init__(self) -> None:
        bad = [o for o in self.outcomes if o not in (-1, 0, 1)]
        if bad:
            raise InternalError(f"illegal trial outcomes {bad[:5]}")
        if self.details and len(self.details) != len(self.outcomes):
            raise InternalError("details and outcomes length mismatch")

    @property
    def trials(self) -> int:
        return len(self.outcomes)

    @property
    def wins(self) -> int:
        return sum(1 for o in self.outcomes if o == 1)

    @property
    def losses(self) -> int:
        return sum(1 for o in self.outcomes if o == 0)

    @property
    def excluded(self) -> int:
        return sum(1 for o in self.outcomes if o == EXCLUDED)

    @property
    def scored(self) -> int:
        return self.wins + self.losses

    def win_rate(self) -> float:
        if self.scored == 0:
            raise DegenerateSample("every trial was excluded; no win rate exists")
        return self.wins / self.scored

    def wilson(self, z: float = 1.96) -> tuple[float, float]:
        if self.scored == 0:
            raise DegenerateSample("every trial was excluded; no interval exists")
        return wilson_interval(self.wins, self.scored, z)

    def trial_seed(self, index: int) -> str:
        """Identifier sufficient to replay one trial: master seed + spawn index."""
        return f"{self.seed}:{index}"

    def to_dict(self) -> dict[str, Any]:
        lo, hi = (None, None)
        rate = None
        if self.scored:
            rate = self.win_rate()
            lo, hi = self.wilson()
        return {
            "experiment": self.experiment,
            "protocol": self.protocol,
            "strategy": self.strategy,
            "seed": self.seed,
            "trials": self.trials,
            "wins": self.wins,
            "losses": self.losses,
            "excluded": self.excluded,
            "win_rate": rate,
            "wilson_95": [lo, hi],
        }


@dataclass(frozen=True)
class AdvantageEstimate:
    """Win-rate estimate over the scored (non-excluded) trials."""

    rate: float
    low: float
    high: float
    scored: int
    excluded: int

    @property
    def advantage(self) -> float:
        """Distance above a fair coin; meaningful for privacy experiments."""
        return self.rate - 0.5


def estimate_advantage(report: TrialReport) -> AdvantageEstimate:
    """Point estimate and Wilson 95% interval of the adversary's win rate.

    Excluded trials (outcome -1) are conditioned away, matching the
    definition of distinguishing advantage; raises DegenerateSample if
    nothing remains.
    """
    rate = report.win_rate()
    lo, hi = report.wilson()
    return AdvantageEstimate(rate=rate, low=lo, high=hi, scored=report.scored, excluded=report.excluded)
