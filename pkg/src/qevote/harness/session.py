"""Base class and binding record tying a protocol into the experiments."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable

from ..errors import ProtocolOrderError
from ..rng import Rng
from .config import ExperimentConfig
from .registers import Transcript


class ProtocolSession:
    """One trial's protocol execution.

    Subclasses implement:
      do_setup(strategy)                  -- create election parameters
      cast_honest(voter, vote) -> handle  -- challenger casts for an honest voter
      cast_corrupted(voter, strategy, rng) -> handle
      do_tally() -> X or None             -- None meaning the protocol aborted
      honest_counted(honest_votes, x) -> bool
      ballot_count(declared_votes, x) -> int
    and may override detail() for per-trial diagnostics.

    The phase guard enforces setup -> casting -> tally ordering.
    """

    def __init__(self, cfg: ExperimentConfig, rng: Rng, transcript: Transcript):
        self.cfg = cfg
        self.rng = rng
        self.transcript = transcript
        self._phase = "setup"

    # -- phase guard ------------------------------------------------------

    def _require(self, phase: str) -> None:
        if self._phase != phase:
            raise ProtocolOrderError(f"step requires phase {phase!r}, currently {self._phase!r}")

    def setup(self, strategy) -> None:
        self._require("setup")
        self.do_setup(strategy)
        self._phase = "casting"

    def cast(self, voter: int, vote) -> Any:
        self._require("casting")
        return self.cast_honest(voter, vote)

    def cast_for_adversary(self, voter: int, strategy, rng: Rng) -> Any:
        self._require("casting")
        return self.cast_corrupted(voter, strategy, rng)

    def tally(self):
        self._require("casting")
        self._phase = "tally"
        x = self.do_tally()
        self._phase = "done"
        return x

    # -- subclass API -------------------------------------------------------

    def do_setup(self, strategy) -> None:
        raise NotImplementedError

    def cast_honest(self, voter: int, vote) -> Any:
        raise NotImplementedError

    def cast_corrupted(self, voter: int, strategy, rng: Rng) -> Any:
        raise NotImplementedError

    def do_tally(self):
        raise NotImplementedError

    def honest_counted(self, honest_votes: dict[int, Any], x) -> bool:
        raise NotImplementedError

    def ballot_count(self, declared_votes: list, x) -> int:
        """Ballots counted in outcome x, judged with the referee's full knowledge."""
        raise NotImplementedError

    def detail(self) -> dict[str, Any]:
        return {}


@dataclass(frozen=True)
class ProtocolBinding:
    """How the engine instantiates and talks to one protocol.

    tappable protocols hand each honest in-transit ballot to the
    adversary; identities_in_transit says whether the sender's identity
    travels with it (anonymous channels strip it).
    """

    name: str
    session_factory: Callable[[ExperimentConfig, Rng, Transcript], ProtocolSession]
    vote_domain: Callable[[ExperimentConfig], list]
    tappable: bool = False
    identities_in_transit: bool = True
    default_verifier: Callable | None = None
