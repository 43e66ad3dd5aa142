"""Adversary interface for the security experiments.

A strategy object must be stateless across trials: anything it wants to
remember during a trial goes in transcript.scratch, which the engine
recreates per trial.  Concrete attack strategies live next to their
protocol; this module holds the interface and the two neutral
baselines.
"""

from __future__ import annotations

from typing import Any

from ..errors import ConfigError, InternalError
from ..rng import Rng
from .config import ExperimentConfig, build_vote_permutation
from .registers import Transcript


class AdversaryStrategy:
    """Default behaviour: a fully honest participant who guesses blindly."""

    name = "honest"
    corrupts_tallier = False

    # -- setup ----------------------------------------------------------

    def choose_votes(self, cfg: ExperimentConfig, rng: Rng) -> list[Any]:
        if cfg.votes is None:
            raise ConfigError(f"strategy {self.name!r} needs cfg.votes")
        return list(cfg.votes)

    def choose_vote_permutation(self, cfg: ExperimentConfig, rng: Rng, domain: list) -> dict:
        return build_vote_permutation(cfg.vote_permutation, cfg.n_voters, domain)

    def tamper_setup(self, session, transcript: Transcript, rng: Rng) -> None:
        """Hook invoked by sessions at the point setup could be subverted."""

    # -- casting --------------------------------------------------------

    def wants_corrupt(self, voter: int, transcript: Transcript, rng: Rng) -> bool:
        return False

    def cast_corrupted(self, session, voter: int, transcript: Transcript, rng: Rng):
        raise InternalError(f"strategy {self.name!r} corrupted a voter but cannot cast")

    def on_honest_ballot(self, session, voter: int | None, handle, transcript: Transcript, rng: Rng) -> None:
        """Called with each honest in-transit ballot on tappable channels."""

    # -- tally ----------------------------------------------------------

    def output_tally(self, session, transcript: Transcript, rng: Rng):
        raise InternalError(f"strategy {self.name!r} does not corrupt the tallier")

    def guess_beta(self, transcript: Transcript, rng: Rng) -> int:
        return rng.bit()


class HonestStrategy(AdversaryStrategy):
    """Non-deviating baseline; wins integrity experiments never."""

    name = "honest"


class BlindGuessStrategy(AdversaryStrategy):
    """Privacy baseline that ignores the transcript and flips a coin."""

    name = "blind-guess"
