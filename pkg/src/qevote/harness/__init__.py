"""Game-based security experiment harness."""

from .config import ExperimentConfig, build_vote_permutation
from .experiments import (
    run_integrity_experiment,
    run_privacy_experiment,
    run_verifiability_experiment,
)
from .registers import BallotRegister, Transcript
from .report import (
    EXCLUDED,
    AdvantageEstimate,
    TrialReport,
    estimate_advantage,
    wilson_interval,
)
from .session import ProtocolBinding, ProtocolSession
from .strategy import AdversaryStrategy, BlindGuessStrategy, HonestStrategy

__all__ = [
    "EXCLUDED",
    "AdvantageEstimate",
    "AdversaryStrategy",
    "BallotRegister",
    "BlindGuessStrategy",
    "ExperimentConfig",
    "HonestStrategy",
    "ProtocolBinding",
    "ProtocolSession",
    "Transcript",
    "TrialReport",
    "build_vote_permutation",
    "estimate_advantage",
    "run_integrity_experiment",
    "run_privacy_experiment",
    "run_verifiability_experiment",
    "wilson_interval",
]
