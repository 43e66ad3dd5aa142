"""Distributed-ballot referendum with phase-encoded option qudits.

The tallier shares one blank-ballot qudit of dimension D with each of N
voters, all entangled in a uniform superposition, and hands every voter
two single-qudit option states whose phase ramps encode "yes" and "no"
at secret angles theta_v = 2*pi*l_v/D + delta.  A voter casts by
measuring the cyclic difference between their ballot qudit and the
chosen option qudit, announcing the result r_k, and returning both
qudits.  The announced results let the tallier unwind the measurement
offsets; the surviving global phase ramp encodes the yes count m at
Fourier mode m*(l_y - l_n), which a final collective measurement reads
out exactly.

The bundled attack transfers d extra yes votes through one corrupted
voter: a phase ramp at d times the yes/no angle difference, applied to
the voter's own option qudit before casting, is indistinguishable from
d additional honest yes casts.  The angle difference is itself
extractable: corrupted voters measure their unused option qudits with
the covariant phase POVM, histogram the angles into the D grid
intervals, and difference the two histogram verdicts.  A wrong estimate
garbles the tally, so running several rounds with fresh secrets and
accepting only unanimous outcomes bounds the attack's success by a
per-round power law.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import (
    CapacityError,
    EstimatorEmpty,
    EstimatorOverflow,
    InternalError,
    ParameterError,
    ProtocolOrderError,
)
from .harness import AdversaryStrategy, ProtocolBinding, ProtocolSession
from .qcore import (
    AMPLITUDE_BUDGET,
    PureState,
    apply_unitary,
    ghz_phase_state,
    measure_difference,
    phase_matrix,
    product_state,
    sample_phase_povm,
    shift_matrix,
)
from .rng import Rng

_TWO_PI = 2.0 * math.pi


# -- parameters --------------------------------------------------------------


@dataclass(frozen=True)
class DistBallotParams:
    """One round's secret angles and dimensions, known only to the tallier.

    The decoding map q = m * difference is injective on m in {0..N}
    exactly when N * difference < D, so the constructor rejects anything
    else; difference 0 is rejected too because it collapses every tally
    to q = 0.
    """

    dim: int
    n_voters: int
    l_yes: int
    l_no: int
    delta: float

    def __post_init__(self) -> None:
        if self.n_voters < 1:
            raise ParameterError("n_voters must be >= 1")
        if self.dim <= self.n_voters:
            raise ParameterError(
                f"qudit dimension {self.dim} must exceed the voter count "
                f"{self.n_voters} for the tally to decode"
            )
        for name, level in (("l_yes", self.l_yes), ("l_no", self.l_no)):
            if not 0 <= level < self.dim:
                raise ParameterError(f"{name} must lie in 0..{self.dim - 1}, got {level}")
        diff = (self.l_yes - self.l_no) % self.dim
        if diff == 0:
            raise ParameterError("l_yes and l_no must differ for votes to be distinguishable")
        if self.n_voters * diff >= self.dim:
            raise ParameterError(
                f"need n_voters * ((l_yes - l_no) mod dim) < dim, "
                f"got {self.n_voters} * {diff} >= {self.dim}"
            )
        if not 0.0 <= self.delta < _TWO_PI / self.dim:
            raise ParameterError(f"delta must lie in [0, 2*pi/dim), got {self.delta!r}")

    @property
    def difference(self) -> int:
        """(l_yes - l_no) mod dim; the per-yes-vote stride of the tally mode."""
        return (self.l_yes - self.l_no) % self.dim

    @property
    def bin_width(self) -> float:
        return _TWO_PI / self.dim

    @property
    def theta_yes(self) -> float:
        return _TWO_PI * self.l_yes / self.dim + self.delta

    @property
    def theta_no(self) -> float:
        return _TWO_PI * self.l_no / self.dim + self.delta

    def theta(self, vote: int) -> float:
        if vote not in (0, 1):
            raise ParameterError(f"vote must be 0 or 1, got {vote!r}")
        return self.theta_yes if vote == 1 else self.theta_no


def draw_params(dim: int, n_voters: int, rng: Rng) -> DistBallotParams:
    """Draw fresh secrets: l_yes and delta uniform, the level difference
    uniform over the strides that keep every tally decodable."""
    if n_voters < 1:
        raise ParameterError("n_voters must be >= 1")
    if dim <= n_voters:
        raise ParameterError(
            f"qudit dimension {dim} must exceed the voter count {n_voters} for the tally to decode"
        )
    l_yes = rng.integer(dim)
    diff = rng.integer(1, (dim - 1) // n_voters + 1)
    delta = rng.random() * (_TWO_PI / dim)
    return DistBallotParams(
        dim=dim,
        n_voters=n_voters,
        l_yes=l_yes,
        l_no=(l_yes - diff) % dim,
        delta=delta,
    )


# -- election state -----------------------------------------------------------
#
# The global state is always (1/sqrt(D)) sum_j c_j |j>^{tensor M} for unit
# magnitude coefficients c_j, so the default path tracks just the length-D
# coefficient vector.  The state-vector path keeps the full register (one
# option qudit appended per cast) and is the oracle the tests compare against.


@dataclass(frozen=True, eq=False)
class Election:
    params: DistBallotParams
    n_cast: int
    r_values: tuple[int, ...]
    coeffs: np.ndarray | None
    sv: PureState | None

    @property
    def all_cast(self) -> bool:
        return self.n_cast >= self.params.n_voters


def new_election(params: DistBallotParams, use_sv: bool = False) -> Election:
    """Prepare the shared blank ballot (1/sqrt(D)) sum_j |j>^{tensor N}."""
    if use_sv:
        # the register doubles as option qudits are returned with the ballots
        if params.dim ** (2 * params.n_voters) > AMPLITUDE_BUDGET:
            raise CapacityError(
                f"{2 * params.n_voters} qudits of dimension {params.dim} "
                "exceed the amplitude budget"
            )
        return Election(
            params=params,
            n_cast=0,
            r_values=(),
            coeffs=None,
            sv=ghz_phase_state(params.n_voters, params.dim),
        )
    coeffs = np.ones(params.dim, dtype=np.complex128)
    coeffs.setflags(write=False)
    return Election(params=params, n_cast=0, r_values=(), coeffs=coeffs, sv=None)


def setup(dim: int, n_voters: int, rng: Rng, use_sv: bool = False) -> Election:
    """Draw fresh secrets and open an election on them."""
    return new_election(draw_params(dim, n_voters, rng), use_sv=use_sv)


@dataclass(frozen=True)
class CastOutcome:
    """One cast's announced difference result and the advanced election."""

    r: int
    election: Election


def _advance(election: Election, vote: int, d: int, phi_hat: float, rng: Rng) -> CastOutcome:
    """Shared casting step; d > 0 adds the transfer ramp at angle phi_hat.

    The difference measurement collapses the appended option qudit onto
    the value (j - r) mod D, transferring its phase ramp onto the global
    coefficients; the shift correction realigns the option qudit with
    the ballots.  The transfer ramp rides along at angle theta + d*phi_hat,
    and the closing block phase removes the ramp's wraparound term, which
    is exactly 1 whenever phi_hat is a grid angle.
    """
    if election.all_cast:
        raise ProtocolOrderError(f"all {election.params.n_voters} voters have already cast")
    params = election.params
    dim = params.dim
    theta = params.theta(vote)

    if election.sv is None:
        r = rng.integer(dim)
        j = np.arange(dim)
        coeffs = election.coeffs * np.exp(1j * (theta + d * phi_hat) * ((j - r) % dim))
        if d and r:
            coeffs[:r] *= np.exp(-1j * dim * d * phi_hat)
        coeffs.setflags(write=False)
        sv = None
    else:
        option = ghz_phase_state(1, dim, lambda b: b * theta)
        if d:
            option = apply_unitary(option, phase_matrix(dim, d * phi_hat), 0)
        joint = product_state([election.sv, option])
        last = joint.n_qudits - 1
        rec = measure_difference(joint, 0, last, rng)
        r = rec.outcome
        sv = rec.state
        if r:
            sv = apply_unitary(sv, shift_matrix(dim, r), last)
        if d and r:
            block = np.where(
                np.arange(dim) < r, np.exp(-1j * dim * d * phi_hat), 1.0
            ).astype(np.complex128)
            sv = apply_unitary(sv, np.diag(block), last)
        coeffs = None

    advanced = Election(
        params=params,
        n_cast=election.n_cast + 1,
        r_values=election.r_values + (r,),
        coeffs=coeffs,
        sv=sv,
    )
    return CastOutcome(r=r, election=advanced)


def cast(election: Election, vote: int, rng: Rng) -> CastOutcome:
    """One voter's turn: difference-measure against the chosen option qudit."""
    if vote not in (0, 1):
        raise ParameterError(f"vote must be 0 or 1, got {vote!r}")
    return _advance(election, vote, 0, 0.0, rng)


def attack_d_transfer(
    election: Election, d: int, l_hat: int, rng: Rng, vote: int = 1
) -> CastOutcome:
    """Cast while smuggling d extra yes-equivalents through the option qudit.

    l_hat is the attacker's estimate of (l_yes - l_no) mod D; the ramp
    angle 2*pi*l_hat/D equals the true angle difference exactly when the
    estimate is right, making the tally read m + d.  A wrong estimate
    leaves a ramp that decodes elsewhere, detectable only by comparing
    rounds.  Kept in decoding range by the caller; d = 0 is an honest cast.
    """
    if vote not in (0, 1):
        raise ParameterError(f"vote must be 0 or 1, got {vote!r}")
    if not isinstance(d, (int, np.integer)) or d < 0:
        raise ParameterError(f"transfer count must be a non-negative integer, got {d!r}")
    if not isinstance(l_hat, (int, np.integer)) or not 0 <= l_hat < election.params.dim:
        raise ParameterError(
            f"difference estimate must lie in 0..{election.params.dim - 1}, got {l_hat!r}"
        )
    phi_hat = _TWO_PI * l_hat / election.params.dim
    return _advance(election, vote, d, phi_hat, rng)


# -- tally ---------------------------------------------------------------------


def logical_coeffs(election: Election) -> np.ndarray:
    """The length-D unit-magnitude coefficient vector of the global state.

    On the state-vector path the register must hold all its weight on
    the all-equal basis states; anything else is a simulator bug.
    """
    if election.sv is None:
        return np.array(election.coeffs)
    dim = election.params.dim
    size = election.sv.amps.size
    stride = (size - 1) // (dim - 1)
    picks = election.sv.amps[np.arange(dim) * stride]
    residual = 1.0 - float(np.sum(np.abs(picks) ** 2))
    if abs(residual) > 1e-9:
        raise InternalError(
            f"global state leaked {residual!r} probability off the all-equal subspace"
        )
    return picks * math.sqrt(dim)


def _tally_vector(coeffs: np.ndarray, params: DistBallotParams, r_values: tuple[int, ...]) -> np.ndarray:
    out = np.array(coeffs)
    wrap = np.exp(-1j * params.dim * params.delta)
    for r in r_values:
        if r:
            out[:r] *= wrap
    out *= np.exp(-1j * np.arange(params.dim) * params.n_voters * params.theta_no)
    return out


def tallied_coeffs(election: Election) -> np.ndarray:
    """Coefficients after the announced-result corrections and the no-angle
    strip, just before the collective Fourier-mode readout."""
    if not election.all_cast:
        raise ProtocolOrderError(
            f"tally requires all {election.params.n_voters} casts, have {election.n_cast}"
        )
    params = election.params
    if election.sv is None:
        return _tally_vector(election.coeffs, params, election.r_values)
    dim = params.dim
    state = election.sv
    wrap = np.exp(-1j * dim * params.delta)
    for r in election.r_values:
        if r:
            block = np.where(np.arange(dim) < r, wrap, 1.0).astype(np.complex128)
            state = apply_unitary(state, np.diag(block), 0)
    state = apply_unitary(state, phase_matrix(dim, -params.n_voters * params.theta_no), 0)
    corrected = Election(
        params=params,
        n_cast=election.n_cast,
        r_values=election.r_values,
        coeffs=None,
        sv=state,
    )
    return logical_coeffs(corrected)


@dataclass(frozen=True)
class TallyOutcome:
    """Measured Fourier mode q and the decoded yes count, None when q does
    not correspond to any count in 0..N."""

    q: int
    m: int | None


def tally(election: Election, rng: Rng) -> TallyOutcome:
    """Collective readout: measure the Fourier mode q of the corrected state
    and decode the yes count m = q / difference."""
    coeffs = tallied_coeffs(election)
    params = election.params
    probs = np.abs(np.fft.fft(coeffs)) ** 2 / params.dim**2
    if abs(float(probs.sum()) - 1.0) > 1e-9:
        raise InternalError(f"tally distribution sums to {float(probs.sum())!r}")
    q = rng.choice_index(probs)
    stride = params.difference
    m = q // stride if q % stride == 0 and q // stride <= params.n_voters else None
    return TallyOutcome(q=q, m=m)


# -- angle estimation ----------------------------------------------------------


def sample_option_angles(params: DistBallotParams, vote: int, count: int, rng: Rng) -> np.ndarray:
    """Covariant phase POVM outcomes from measuring option qudits of one type."""
    if count < 1:
        raise ParameterError("count must be >= 1")
    return np.atleast_1d(sample_phase_povm(params.dim, params.theta(vote), rng, size=count))


@dataclass(frozen=True)
class EstimatorState:
    """Histogram verdict of the angle estimator.

    record counts samples per grid interval, solution holds the at most
    two intervals that reached the threshold (None filling the second
    slot), and output is the estimate the attack consumes.  boundary_hits
    counts samples landing exactly on a grid point; they go to the bin on
    their right (closed-left intervals) and the count records that the
    measure-zero convention fired.
    """

    record: tuple[int, ...]
    threshold: float
    solution: tuple[int | None, int | None]
    boundary_hits: int

    @property
    def output(self) -> int:
        return self.solution[0]


def algorithm1(angles, dim: int) -> EstimatorState:
    """Histogram angle samples into the D grid intervals and keep the
    intervals holding at least 40% of the samples.

    The two-slot solution fills in ascending scan order; the pair
    {0, D-1} is really the wrap pair {D-1, 0}, so it swaps.  Three or
    more intervals over threshold cannot be represented and raise
    EstimatorOverflow; none over threshold raises EstimatorEmpty.
    """
    if dim < 2:
        raise ParameterError("dim must be >= 2")
    samples = np.asarray(list(angles), dtype=float)
    if samples.ndim != 1 or samples.size < 1:
        raise ParameterError("estimator needs a flat list of at least one angle")
    width = _TWO_PI / dim
    wrapped = np.mod(samples, _TWO_PI)
    bins = np.minimum((wrapped // width).astype(int), dim - 1)
    boundary_hits = int(np.count_nonzero(np.mod(wrapped, width) == 0.0))
    record = np.bincount(bins, minlength=dim)
    threshold = 0.4 * samples.size

    over = [level for level in range(dim) if record[level] >= threshold]
    if not over:
        raise EstimatorEmpty(
            f"no interval reached {threshold:g} of {samples.size} samples"
        )
    if len(over) > 2:
        raise EstimatorOverflow(
            f"{len(over)} intervals reached the threshold; the two-slot solution holds at most 2"
        )
    solution: tuple[int | None, int | None] = (over[0], over[1] if len(over) == 2 else None)
    if solution == (0, dim - 1):
        solution = (dim - 1, 0)
    return EstimatorState(
        record=tuple(int(n) for n in record),
        threshold=threshold,
        solution=solution,
        boundary_hits=boundary_hits,
    )


def attack_estimate_difference(yes_angles, no_angles, dim: int) -> int:
    """Estimate (l_yes - l_no) mod D from retained-qudit measurements.

    Both estimator runs are biased the same way by the shared offset
    delta, so the difference of their outputs cancels it.  Estimator
    failures propagate.
    """
    yes_verdict = algorithm1(yes_angles, dim)
    no_verdict = algorithm1(no_angles, dim)
    return (yes_verdict.output - no_verdict.output) % dim


# -- rounds ---------------------------------------------------------------------


@dataclass(frozen=True)
class TransferPlan:
    """One corrupted voter's transfer intent for a round.

    voter casts `vote` (their declared vote when None) with d extra
    yes-equivalents on top.  l_hat None means estimate the angle
    difference fresh each round from the coalition's retained option
    qudits; suppliers lists the other corrupted voters, who cast their
    declared votes and contribute one retained-qudit sample each (the
    transfer voter's own retained qudit is sampled too).
    """

    voter: int
    d: int
    l_hat: int | None = None
    vote: int | None = None
    suppliers: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.voter < 0:
            raise ParameterError("voter index must be >= 0")
        if self.d < 0:
            raise ParameterError("transfer count must be >= 0")
        if self.vote is not None and self.vote not in (0, 1):
            raise ParameterError(f"vote must be 0, 1, or None, got {self.vote!r}")
        if len(set(self.suppliers)) != len(self.suppliers):
            raise ParameterError("suppliers must be distinct")
        if self.voter in self.suppliers:
            raise ParameterError("the transfer voter cannot also be a supplier")


@dataclass(frozen=True)
class RoundOutcome:
    """One round's params, readout, and attack bookkeeping.

    d_applied records the clamp the attack driver imposed to keep the
    shifted tally decodable; estimator_failed means the round fell back
    to an honest cast for lack of a usable estimate.
    """

    params: DistBallotParams
    q: int
    tally: int | None
    r_values: tuple[int, ...]
    l_hat: int | None
    estimator_failed: bool
    d_requested: int
    d_applied: int
    samples_yes: int
    samples_no: int


def run_round(
    dim: int,
    n_voters: int,
    votes: list[int],
    rng: Rng,
    transfer: TransferPlan | None = None,
    use_sv: bool = False,
) -> RoundOutcome:
    """One full election round on fresh secrets, optionally under attack."""
    if len(votes) != n_voters:
        raise ParameterError(f"need {n_voters} votes, got {len(votes)}")
    if any(v not in (0, 1) for v in votes):
        raise ParameterError("votes must be 0 or 1")
    params = draw_params(dim, n_voters, rng)

    if transfer is None:
        election = new_election(params, use_sv=use_sv)
        for vote in votes:
            election = cast(election, vote, rng).election
        result = tally(election, rng)
        return RoundOutcome(
            params=params,
            q=result.q,
            tally=result.m,
            r_values=election.r_values,
            l_hat=None,
            estimator_failed=False,
            d_requested=0,
            d_applied=0,
            samples_yes=0,
            samples_no=0,
        )

    if not 0 <= transfer.voter < n_voters:
        raise ParameterError(f"transfer voter {transfer.voter} out of range")
    if any(not 0 <= s < n_voters for s in transfer.suppliers):
        raise ParameterError("supplier indices out of range")
    cast_vote = transfer.vote if transfer.vote is not None else votes[transfer.voter]

    l_hat = transfer.l_hat
    estimator_failed = False
    samples_yes = samples_no = 0
    if l_hat is None:
        # a voter casting v retains the unused option qudit of the other type
        pools: dict[int, list[float]] = {0: [], 1: []}
        for member in sorted(set(transfer.suppliers) | {transfer.voter}):
            member_vote = cast_vote if member == transfer.voter else votes[member]
            retained = 1 - member_vote
            pools[retained].append(float(sample_option_angles(params, retained, 1, rng)[0]))
        samples_yes, samples_no = len(pools[1]), len(pools[0])
        if samples_yes and samples_no:
            try:
                l_hat = attack_estimate_difference(pools[1], pools[0], dim)
            except (EstimatorEmpty, EstimatorOverflow):
                estimator_failed = True
        else:
            estimator_failed = True

    d_applied = 0
    if not estimator_failed:
        cast_total = sum(votes[k] for k in range(n_voters) if k != transfer.voter) + cast_vote
        d_applied = min(transfer.d, n_voters - cast_total)

    election = new_election(params, use_sv=use_sv)
    for voter in range(n_voters):
        if voter == transfer.voter:
            if estimator_failed:
                election = cast(election, cast_vote, rng).election
            else:
                election = attack_d_transfer(election, d_applied, l_hat, rng, vote=cast_vote).election
        else:
            election = cast(election, votes[voter], rng).election
    result = tally(election, rng)
    return RoundOutcome(
        params=params,
        q=result.q,
        tally=result.m,
        r_values=election.r_values,
        l_hat=None if estimator_failed else l_hat,
        estimator_failed=estimator_failed,
        d_requested=transfer.d,
        d_applied=d_applied,
        samples_yes=samples_yes,
        samples_no=samples_no,
    )


@dataclass(frozen=True)
class MultiRoundOutcome:
    """All rounds' outcomes and the unanimity verdict: the common tally
    when every round decoded to the same count, else None."""

    rounds: tuple[RoundOutcome, ...]
    final: int | None

    @property
    def agreed(self) -> bool:
        return self.final is not None


def run_multi_round(
    dim: int,
    n_voters: int,
    votes: list[int],
    rounds: int,
    rng: Rng,
    transfer: TransferPlan | None = None,
    use_sv: bool = False,
) -> MultiRoundOutcome:
    """Repeat the election on independent secrets and demand unanimity."""
    if rounds < 1:
        raise ParameterError("rounds must be >= 1")
    outcomes = tuple(
        run_round(dim, n_voters, votes, rng, transfer=transfer, use_sv=use_sv)
        for _ in range(rounds)
    )
    tallies = {outcome.tally for outcome in outcomes}
    final = outcomes[0].tally if len(tallies) == 1 else None
    return MultiRoundOutcome(rounds=outcomes, final=final)


# -- harness wiring --------------------------------------------------------------


class DistBallSession(ProtocolSession):
    """Glue between the experiment engine and the protocol operations.

    Casting records each voter's action; the tally phase executes every
    round from those records, so all rounds see the same electorate
    behaving the same way on fresh secrets.
    """

    def do_setup(self, strategy) -> None:
        pp = self.cfg.protocol_params
        dim = pp.get("dim", self.cfg.n_voters + 1)
        rounds = pp.get("rounds", 1)
        use_sv = pp.get("use_sv", False)
        if not isinstance(dim, int) or isinstance(dim, bool):
            raise ParameterError(f"dim must be an integer, got {dim!r}")
        if dim <= self.cfg.n_voters:
            raise ParameterError(
                f"qudit dimension {dim} must exceed the voter count "
                f"{self.cfg.n_voters} for the tally to decode"
            )
        if not isinstance(rounds, int) or isinstance(rounds, bool) or rounds < 1:
            raise ParameterError(f"rounds must be a positive integer, got {rounds!r}")
        if not isinstance(use_sv, bool):
            raise ParameterError(f"use_sv must be a boolean, got {use_sv!r}")
        if use_sv and dim ** (2 * self.cfg.n_voters) > AMPLITUDE_BUDGET:
            raise CapacityError(
                f"{2 * self.cfg.n_voters} qudits of dimension {dim} exceed the amplitude budget"
            )
        self.dim = dim
        self.rounds = rounds
        self.use_sv = use_sv
        self.actions: dict[int, tuple] = {}
        strategy.tamper_setup(self, self.transcript, self.rng)

    def cast_honest(self, voter: int, vote: int):
        if vote not in (0, 1):
            raise ParameterError(f"vote must be 0 or 1, got {vote!r}")
        self.actions[voter] = ("honest", int(vote))
        return None

    def cast_corrupted(self, voter: int, strategy, rng: Rng):
        return strategy.cast_corrupted(self, voter, self.transcript, rng)

    # corrupted voters register their round behaviour through these two

    def record_supplier(self, voter: int, vote: int) -> None:
        if vote not in (0, 1):
            raise ParameterError(f"vote must be 0 or 1, got {vote!r}")
        self.actions[voter] = ("supplier", int(vote))

    def record_transfer(self, voter: int, d: int, l_hat: int | None, vote: int) -> None:
        if vote not in (0, 1):
            raise ParameterError(f"vote must be 0 or 1, got {vote!r}")
        if any(action[0] == "transfer" for action in self.actions.values()):
            raise ParameterError("only one transfer per election is supported")
        self.actions[voter] = ("transfer", int(d), l_hat, int(vote))

    def do_tally(self):
        n = self.cfg.n_voters
        if len(self.actions) != n:
            raise InternalError(f"tally with {len(self.actions)} of {n} casts recorded")
        votes: list[int] = [0] * n
        suppliers: list[int] = []
        plan: TransferPlan | None = None
        transfer_voter = None
        for voter in range(n):
            action = self.actions[voter]
            if action[0] == "transfer":
                transfer_voter = voter
                votes[voter] = action[3]
            else:
                votes[voter] = action[1]
                if action[0] == "supplier":
                    suppliers.append(voter)
        if transfer_voter is not None:
            action = self.actions[transfer_voter]
            plan = TransferPlan(
                voter=transfer_voter,
                d=action[1],
                l_hat=action[2],
                vote=action[3],
                suppliers=tuple(suppliers),
            )
        outcome = run_multi_round(
            self.dim, n, votes, self.rounds, self.rng, transfer=plan, use_sv=self.use_sv
        )
        for k, rnd in enumerate(outcome.rounds):
            self.transcript.note(
                "round",
                index=k,
                tally=rnd.tally,
                q=rnd.q,
                l_hat=rnd.l_hat,
                estimator_failed=rnd.estimator_failed,
                d_requested=rnd.d_requested,
                d_applied=rnd.d_applied,
            )
            if plan is not None and not rnd.estimator_failed and rnd.d_applied != rnd.d_requested:
                self.transcript.note(
                    "d-clamped", index=k, requested=rnd.d_requested, applied=rnd.d_applied
                )
        return outcome.final

    def honest_counted(self, honest_votes: dict[int, int], x: int) -> bool:
        h = sum(honest_votes.values())
        t = self.cfg.n_voters - len(honest_votes)
        return h <= x <= h + t

    def ballot_count(self, declared_votes: list[int], x: int) -> int:
        return self.cfg.n_voters + max(0, x - sum(declared_votes))

    def detail(self) -> dict[str, Any]:
        return {"dim": self.dim, "rounds": self.rounds}


class DTransferStrategy(AdversaryStrategy):
    """Corrupt the first `coalition` voters consulted; the last of them
    runs the transfer, the earlier ones supply retained-qudit samples.

    l_hat None estimates the angle difference per round from those
    samples; an explicit l_hat skips estimation.  vote forces the
    transfer voter's cast; None casts their declared vote.
    """

    name = "d-transfer"

    def __init__(self, coalition: int = 1, d: int = 1, l_hat: int | None = None, vote: int | None = None):
        if coalition < 1:
            raise ParameterError("coalition must be >= 1")
        if d < 0:
            raise ParameterError("transfer count must be >= 0")
        if l_hat is not None and l_hat < 0:
            raise ParameterError("difference estimate must be >= 0")
        if vote is not None and vote not in (0, 1):
            raise ParameterError(f"vote must be 0, 1, or None, got {vote!r}")
        self.coalition = coalition
        self.d = d
        self.l_hat = l_hat
        self.vote = vote

    def wants_corrupt(self, voter, transcript, rng):
        consulted = transcript.scratch.setdefault("consulted", [])
        consulted.append(voter)
        return len(consulted) <= self.coalition

    def cast_corrupted(self, session, voter, transcript, rng):
        count = transcript.scratch.get("corrupt_casts", 0) + 1
        transcript.scratch["corrupt_casts"] = count
        declared = session.cfg.votes[voter]
        if count < self.coalition:
            session.record_supplier(voter, declared)
        else:
            cast_vote = self.vote if self.vote is not None else declared
            session.record_transfer(voter, self.d, self.l_hat, cast_vote)
        return None


def _vote_domain(cfg) -> list[int]:
    return [0, 1]


BINDING = ProtocolBinding(
    name="distball",
    session_factory=DistBallSession,
    vote_domain=_vote_domain,
    tappable=False,
)
