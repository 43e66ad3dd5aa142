"""Traveling-ballot referendum over a shared two-qudit register.

The tallier prepares two maximally correlated qudits of dimension M,
keeps one, and sends the other from voter to voter.  A yes vote applies
the cyclic shift once; a no vote leaves the qudit alone.  The tallier
measures both qudits at the end and the outcome difference equals the
yes count.

The shift arithmetic runs mod M, so an election with M equal to the
voter count aliases an all-yes result to zero.  The default dimension
is therefore one more than the voter count; M equal to N stays
selectable for fidelity with the original scheme.

Two attacks ship with the protocol: measuring the ballot qudit before
and after a victim casts reveals the victim's vote with certainty, and
applying the shift more than once inflates the tally undetectably.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParameterError, ProtocolOrderError
from .harness import AdversaryStrategy, ProtocolBinding, ProtocolSession
from .qcore import (
    PureState,
    apply_unitary,
    ghz_phase_state,
    measure_computational,
    shift_matrix,
)
from .rng import Rng


@dataclass(frozen=True)
class TravelState:
    """The shared register between casts: ballot qudit first, tallier's second."""

    state: PureState
    n_voters: int
    position: int  # next voter to cast, 1-based

    @property
    def dim(self) -> int:
        return self.state.dims[0]

    @property
    def all_cast(self) -> bool:
        return self.position > self.n_voters


def setup(n_voters: int, dim: int | None = None, rng: Rng | None = None) -> TravelState:
    """Prepare (1/sqrt(M)) sum_j |j>|j> and open casting at position 1.

    rng is accepted for interface uniformity; preparation is deterministic.
    """
    if n_voters < 1:
        raise ParameterError("n_voters must be >= 1")
    if dim is None:
        dim = n_voters + 1
    if dim < n_voters:
        raise ParameterError(f"qudit dimension {dim} cannot be below the voter count {n_voters}")
    return TravelState(state=ghz_phase_state(2, dim), n_voters=n_voters, position=1)


def _applied_shift(ts: TravelState, times: int) -> TravelState:
    amount = times % ts.dim
    state = ts.state
    if amount:
        state = apply_unitary(state, shift_matrix(ts.dim, amount), [0])
    return TravelState(state=state, n_voters=ts.n_voters, position=ts.position + 1)


def cast(ts: TravelState, vote: int) -> TravelState:
    """One voter's turn: apply the shift vote times and pass the qudit on."""
    if ts.all_cast:
        raise ProtocolOrderError(f"all {ts.n_voters} positions have already cast")
    if vote not in (0, 1):
        raise ParameterError(f"vote must be 0 or 1, got {vote!r}")
    return _applied_shift(ts, vote)


def tally(ts: TravelState, rng: Rng) -> int:
    """Measure both qudits computationally; their difference mod M is the yes count."""
    if not ts.all_cast:
        raise ProtocolOrderError(
            f"tally requires all {ts.n_voters} casts, next position is {ts.position}"
        )
    first = measure_computational(ts.state, 0, rng)
    second = measure_computational(first.state, 1, rng)
    return (first.outcome - second.outcome) % ts.dim


def measure_ballot(ts: TravelState, rng: Rng) -> tuple[int, TravelState]:
    """A colluder's turn: measure the ballot qudit instead of voting.

    Collapses the register to a product of two basis states whose labels
    differ by the yes count so far, then forwards the qudit unchanged.
    """
    if ts.all_cast:
        raise ProtocolOrderError(f"all {ts.n_voters} positions have already cast")
    rec = measure_computational(ts.state, 0, rng)
    return rec.outcome, TravelState(state=rec.state, n_voters=ts.n_voters, position=ts.position + 1)


def attack_double_vote(ts: TravelState, d: int) -> TravelState:
    """One corrupted position applying the shift d times in total."""
    if ts.all_cast:
        raise ProtocolOrderError(f"all {ts.n_voters} positions have already cast")
    if d < 0:
        raise ParameterError("shift count must be >= 0")
    return _applied_shift(ts, d)


@dataclass(frozen=True)
class SandwichResult:
    recovered: int
    first_outcome: int
    second_outcome: int
    tally: int


def attack_collude_sandwich(
    ts: TravelState, votes: list[int], k: int, rng: Rng, span: int = 1
) -> SandwichResult:
    """Run a full election where positions k-1 and k+span measure instead of voting.

    The difference of the two measurement outcomes equals the total vote
    of the span positions in between (the single victim's vote when
    span is 1).  votes lists every position's vote, 1-based order;
    entries at the two colluder positions are ignored.  The election is
    tallied to completion so callers can confirm the outcome still
    matches the honest yes count.
    """
    if ts.position != 1:
        raise ProtocolOrderError("the sandwich attack replays a full election from setup")
    if len(votes) != ts.n_voters:
        raise ParameterError(f"need {ts.n_voters} votes, got {len(votes)}")
    if span < 1:
        raise ParameterError("span must be >= 1")
    if not 2 <= k <= ts.n_voters - span:
        raise ParameterError(
            f"victim position {k} needs colluders at {k - 1} and {k + span} within 1..{ts.n_voters}"
        )
    first = second = None
    for pos in range(1, ts.n_voters + 1):
        if pos == k - 1:
            first, ts = measure_ballot(ts, rng)
        elif pos == k + span:
            second, ts = measure_ballot(ts, rng)
        else:
            ts = cast(ts, votes[pos - 1])
    return SandwichResult(
        recovered=(second - first) % ts.dim,
        first_outcome=first,
        second_outcome=second,
        tally=tally(ts, rng),
    )


# -- harness wiring ---------------------------------------------------------


class TravelSession(ProtocolSession):
    """Glue between the experiment engine and the protocol operations."""

    def do_setup(self, strategy) -> None:
        dim = self.cfg.protocol_params.get("dim")
        self.ts = setup(self.cfg.n_voters, dim)
        strategy.tamper_setup(self, self.transcript, self.rng)

    def cast_honest(self, voter: int, vote: int):
        self.ts = cast(self.ts, vote)
        return None  # the ballot is the one traveling qudit; no per-voter handle exists

    def cast_corrupted(self, voter: int, strategy, rng: Rng):
        return strategy.cast_corrupted(self, voter, self.transcript, rng)

    def do_tally(self):
        return tally(self.ts, self.rng)

    def honest_counted(self, honest_votes: dict[int, int], x: int) -> bool:
        h = sum(honest_votes.values())
        t = self.cfg.n_voters - len(honest_votes)
        return h <= x <= h + t

    def ballot_count(self, declared_votes: list[int], x: int) -> int:
        return self.cfg.n_voters + max(0, x - sum(declared_votes))

    def detail(self) -> dict:
        return {"dim": self.ts.dim}


class DoubleVoteStrategy(AdversaryStrategy):
    """Corrupt one position and apply the shift extra times on top of the vote."""

    name = "double-vote"

    def __init__(self, extra: int = 1, position: int = 1):
        if extra < 0:
            raise ParameterError("extra shift count must be >= 0")
        if position < 1:
            raise ParameterError("position is 1-based")
        self.extra = extra
        self.position = position

    def wants_corrupt(self, voter, transcript, rng):
        consulted = transcript.scratch.setdefault("consulted", [])
        consulted.append(voter)
        return len(consulted) == self.position

    def cast_corrupted(self, session, voter, transcript, rng):
        declared = session.cfg.votes[voter]
        session.ts = attack_double_vote(session.ts, declared + self.extra)
        return None


class SandwichStrategy(AdversaryStrategy):
    """Corrupt the positions around one victim and difference the outcomes.

    victim is a casting position, 1-based; the colluders sit immediately
    before and after it.  The vote recovered from the two measurements
    is compared with the victim's declared vote to decide the challenge
    bit, so the vote permutation should move every vote of every voter
    for a certain guess.
    """

    name = "collude-sandwich"

    def __init__(self, victim: int = 2):
        if victim < 2:
            raise ParameterError("the victim needs a colluder before it; position must be >= 2")
        self.victim = victim

    def wants_corrupt(self, voter, transcript, rng):
        consulted = transcript.scratch.setdefault("consulted", [])
        consulted.append(voter)
        return len(consulted) in (self.victim - 1, self.victim + 1)

    def cast_corrupted(self, session, voter, transcript, rng):
        outcome, session.ts = measure_ballot(session.ts, rng)
        transcript.scratch.setdefault("outcomes", []).append(outcome)
        transcript.scratch["cfg"] = session.cfg
        transcript.scratch["dim"] = session.ts.dim
        return None

    def guess_beta(self, transcript, rng):
        cfg = transcript.scratch["cfg"]
        first, second = transcript.scratch["outcomes"]
        victim_voter = transcript.scratch["consulted"][self.victim - 1]
        recovered = (second - first) % transcript.scratch["dim"]
        return 0 if recovered == cfg.votes[victim_voter] else 1


def _vote_domain(cfg) -> list[int]:
    return [0, 1]


BINDING = ProtocolBinding(
    name="travelball",
    session_factory=TravelSession,
    vote_domain=_vote_domain,
    tappable=False,
)
