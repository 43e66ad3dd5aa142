"""Self-tallying referendum with dual-basis state verification.

One voter distributes many copies of two entangled states over c-level
qudits: |D1>, whose computational outcomes sum to zero mod c and whose
Fourier outcomes all agree, and |D2>, whose computational outcomes form
a permutation of the voter indices.  A cut-and-choose round burns most
copies to verify the distribution, the survivors are measured into
per-voter blank-ballot columns plus one secret row index each, votes
are added to the secret rows, and the broadcast matrix tallies itself
through its row sums.

Three attacks ship with the module: a distributing voter can replace
the surviving |D1> copies with known product states and read every vote
off the broadcast matrix, the same trick on |D2> reveals each voter's
secret row, and even under a trusted setup a corrupted voter can tamper
with one broadcast entry so that the victim's abort deanonymizes them.

Measurement outcomes are produced two ways.  The fast path samples the
known outcome laws directly (uniform over the sum-zero set, a uniform
all-equal tuple, a uniform permutation).  The state-vector path builds
the actual entangled state and samples its amplitude distribution; it
is the oracle the fast path is tested against.  Fourier statistics of
|D2> have no simple constructive form, so both paths share the
amplitude route there; note the outcomes are not all equal for three or
more voters, they sum to zero mod N, and the verification test checks
exactly that invariant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import permutations

import numpy as np

from .errors import (
    CapacityError,
    DomainError,
    InternalError,
    ParameterError,
    ProtocolAbort,
)
from .harness import AdversaryStrategy, ProtocolBinding, ProtocolSession, build_vote_permutation
from .qcore import AMPLITUDE_BUDGET, PureState, apply_unitary, fourier_matrix
from .rng import Rng


@dataclass(frozen=True)
class DualBasisParams:
    """Election-wide constants; the qudit dimension equals the candidate count."""

    n_voters: int
    candidates: int = 2
    delta0: int = 1

    def __post_init__(self) -> None:
        if self.n_voters < 2:
            raise ParameterError("need at least two voters")
        if self.candidates < 2:
            raise ParameterError("need at least two candidates")
        if self.delta0 < 0:
            raise ParameterError("security parameter must be >= 0")
        for dim in (self.candidates, self.n_voters):
            if dim**self.n_voters > AMPLITUDE_BUDGET:
                raise CapacityError(
                    f"{self.n_voters} qudits of dimension {dim} exceed the amplitude budget"
                )

    @property
    def d1_count(self) -> int:
        return self.n_voters + self.n_voters * 2**self.delta0

    @property
    def d2_count(self) -> int:
        return 1 + self.n_voters * 2**self.delta0


# -- the two shared states ----------------------------------------------------


@lru_cache(maxsize=16)
def make_d1_state(n_voters: int, candidates: int) -> PureState:
    """|D1>: equal weight on computational tuples summing to 0 mod c."""
    dims = (candidates,) * n_voters
    amps = np.zeros(candidates**n_voters, dtype=complex)
    grid = np.indices(dims).reshape(n_voters, -1).sum(axis=0) % candidates
    amps[grid == 0] = 1.0
    return PureState(list(dims), amps / np.sqrt(candidates ** (n_voters - 1)))


@lru_cache(maxsize=16)
def make_d2_state(n_voters: int) -> PureState:
    """|D2>: equal weight on the N! permutations of |0...N-1>."""
    dims = (n_voters,) * n_voters
    amps = np.zeros(n_voters**n_voters, dtype=complex)
    for perm in permutations(range(n_voters)):
        amps[int(np.ravel_multi_index(perm, dims))] = 1.0
    import math

    return PureState(list(dims), amps / np.sqrt(math.factorial(n_voters)))


@lru_cache(maxsize=64)
def _outcome_probs(kind: str, n_voters: int, candidates: int, basis: str) -> np.ndarray:
    """Joint outcome law of one honest copy, straight from the amplitudes."""
    state = make_d1_state(n_voters, candidates) if kind == "d1" else make_d2_state(n_voters)
    if basis == "fourier":
        f_dag = fourier_matrix(state.dims[0]).conj().T
        for q in range(n_voters):
            state = apply_unitary(state, f_dag, [q])
    probs = np.abs(state.amps) ** 2
    probs.flags.writeable = False
    return probs


def sample_copy_sv(kind: str, n_voters: int, candidates: int, basis: str, rng: Rng) -> tuple[int, ...]:
    """Measure every qudit of one honest copy through the state-vector oracle."""
    probs = _outcome_probs(kind, n_voters, candidates, basis)
    dim = candidates if kind == "d1" else n_voters
    flat = rng.choice_index(probs)
    return tuple(int(d) for d in np.unravel_index(flat, (dim,) * n_voters))


def sample_copy_fast(kind: str, n_voters: int, candidates: int, basis: str, rng: Rng) -> tuple[int, ...]:
    """Sample one honest copy's outcomes from the constructive laws."""
    if kind == "d1":
        if basis == "computational":
            digits = [int(rng.integer(candidates)) for _ in range(n_voters - 1)]
            digits.append(-sum(digits) % candidates)
            return tuple(digits)
        return (int(rng.integer(candidates)),) * n_voters
    if basis == "computational":
        return tuple(rng.permutation(n_voters))
    # Fourier statistics of |D2> have no simple product form; use the oracle.
    return sample_copy_sv(kind, n_voters, candidates, basis, rng)


# -- state sets and their verification ---------------------------------------


@dataclass(frozen=True)
class StateCopy:
    kind: str  # "d1" or "d2"
    corrupt_digits: tuple[int, ...] | None = None

    @property
    def corrupt(self) -> bool:
        return self.corrupt_digits is not None


@dataclass
class StateSet:
    params: DualBasisParams
    d1: list[StateCopy]
    d2: list[StateCopy]

    def sample(self, copy: StateCopy, basis: str, rng: Rng, use_sv: bool = False) -> tuple[int, ...]:
        n, c = self.params.n_voters, self.params.candidates
        if copy.corrupt:
            if basis == "computational":
                return copy.corrupt_digits  # product states measure deterministically
            dim = c if copy.kind == "d1" else n
            return tuple(int(rng.integer(dim)) for _ in range(n))
        sampler = sample_copy_sv if use_sv else sample_copy_fast
        return sampler(copy.kind, n, c, basis, rng)


def setup_honest(params: DualBasisParams, rng: Rng | None = None) -> StateSet:
    """The distributing voter plays fair: every copy is the genuine state."""
    return StateSet(
        params=params,
        d1=[StateCopy("d1") for _ in range(params.d1_count)],
        d2=[StateCopy("d2") for _ in range(params.d2_count)],
    )


@dataclass(frozen=True)
class CorruptSetup:
    stateset: StateSet
    corrupt_d1: dict[int, tuple[int, ...]]  # copy id -> planted digits
    corrupt_d2: dict[int, tuple[int, ...]]


def attack_corrupt_setup(params: DualBasisParams, rng: Rng, target: str = "d1") -> CorruptSetup:
    """Replace states with known product copies, keeping their planted digits.

    target "d1" plants N sum-zero product copies among the |D1> states,
    aiming to control the whole pre-vote matrix.  target "d2" plants a
    single known permutation among the |D2> states, revealing every
    voter's secret row if it survives.
    """
    if target not in ("d1", "d2"):
        raise ParameterError(f"target must be 'd1' or 'd2', got {target!r}")
    n, c = params.n_voters, params.candidates
    stateset = setup_honest(params)
    corrupt_d1: dict[int, tuple[int, ...]] = {}
    corrupt_d2: dict[int, tuple[int, ...]] = {}
    if target == "d1":
        slots = rng.permutation(params.d1_count)[:n]
        for slot in slots:
            digits = [int(rng.integer(c)) for _ in range(n - 1)]
            digits.append(-sum(digits) % c)
            corrupt_d1[int(slot)] = tuple(digits)
            stateset.d1[int(slot)] = StateCopy("d1", tuple(digits))
    else:
        slot = int(rng.integer(params.d2_count))
        digits = tuple(rng.permutation(n))
        corrupt_d2[slot] = digits
        stateset.d2[slot] = StateCopy("d2", digits)
    return CorruptSetup(stateset=stateset, corrupt_d1=corrupt_d1, corrupt_d2=corrupt_d2)


def _copy_passes(kind: str, basis: str, outcomes: tuple[int, ...], n_voters: int, candidates: int) -> bool:
    if kind == "d1":
        if basis == "computational":
            return sum(outcomes) % candidates == 0
        return len(set(outcomes)) == 1
    if basis == "computational":
        return sorted(outcomes) == list(range(n_voters))
    return sum(outcomes) % n_voters == 0


@dataclass(frozen=True)
class CutChooseReport:
    accepted: bool
    failure: dict | None
    tested_d1: tuple[int, ...]
    tested_d2: tuple[int, ...]
    surviving_d1: tuple[int, ...]
    surviving_d2: tuple[int, ...]
    corrupt_tested: int


def cut_and_choose(
    stateset: StateSet,
    order: list[int],
    rng: Rng,
    avoid_for: set[int] | frozenset[int] = frozenset(),
    picks: list[dict[str, list[int]]] | None = None,
    use_sv: bool = False,
) -> CutChooseReport:
    """Every voter in order burns 2^delta0 copies of each family as tests.

    Each verifier's picked copies are measured by all voters at once,
    the first half in the computational basis and the rest in the
    Fourier basis; any inconsistent outcome rejects the whole setup.
    Voters in avoid_for dodge corrupted copies when they can (the
    distributing adversary never tests its own plants).  An explicit
    picks list, one {"d1": [...], "d2": [...]} entry per verifier in
    order, overrides the random choices entirely.
    """
    params = stateset.params
    per_voter = 2**params.delta0
    unchecked = {"d1": list(range(len(stateset.d1))), "d2": list(range(len(stateset.d2)))}
    families = {"d1": stateset.d1, "d2": stateset.d2}
    tested: dict[str, list[int]] = {"d1": [], "d2": []}
    corrupt_tested = 0

    for turn, voter in enumerate(order):
        for kind in ("d1", "d2"):
            pool = unchecked[kind]
            if len(pool) < per_voter:
                raise ProtocolAbort(f"unchecked {kind} copies exhausted", voter=voter)
            if picks is not None:
                chosen = list(picks[turn][kind])
                if (
                    len(chosen) != per_voter
                    or len(set(chosen)) != per_voter
                    or any(cid not in pool for cid in chosen)
                ):
                    raise ParameterError(f"invalid explicit picks for voter {voter}, {kind}")
            elif voter in avoid_for:
                clean = [cid for cid in pool if not families[kind][cid].corrupt]
                dirty = [cid for cid in pool if families[kind][cid].corrupt]
                perm = rng.permutation(len(clean))
                chosen = [clean[i] for i in perm[:per_voter]]
                if len(chosen) < per_voter:
                    extra = rng.permutation(len(dirty))
                    chosen += [dirty[i] for i in extra[: per_voter - len(chosen)]]
            else:
                perm = rng.permutation(len(pool))
                chosen = [pool[i] for i in perm[:per_voter]]

            half = (len(chosen) + 1) // 2
            for at, cid in enumerate(chosen):
                pool.remove(cid)
                tested[kind].append(cid)
                copy = families[kind][cid]
                corrupt_tested += copy.corrupt
                basis = "computational" if at < half else "fourier"
                outcomes = stateset.sample(copy, basis, rng, use_sv=use_sv)
                if not _copy_passes(kind, basis, outcomes, params.n_voters, params.candidates):
                    return CutChooseReport(
                        accepted=False,
                        failure={"kind": kind, "copy": cid, "basis": basis, "outcomes": outcomes},
                        tested_d1=tuple(tested["d1"]),
                        tested_d2=tuple(tested["d2"]),
                        surviving_d1=tuple(unchecked["d1"]),
                        surviving_d2=tuple(unchecked["d2"]),
                        corrupt_tested=corrupt_tested,
                    )

    return CutChooseReport(
        accepted=True,
        failure=None,
        tested_d1=tuple(tested["d1"]),
        tested_d2=tuple(tested["d2"]),
        surviving_d1=tuple(unchecked["d1"]),
        surviving_d2=tuple(unchecked["d2"]),
        corrupt_tested=corrupt_tested,
    )


def untested_event(n_voters: int, corrupt_voters: int, delta0: int, rng: Rng) -> bool:
    """One Monte Carlo draw of the corrupted-copies-survive event.

    Replays the sampling mechanism only: honest verifiers draw their
    2^delta0 picks uniformly from the shrinking unchecked pool, with the
    corrupted verifiers forced to the end of the order where they dodge
    the n_voters planted copies.  True iff no honest pick hits a plant.
    """
    if not 0 <= corrupt_voters <= n_voters:
        raise ParameterError("corrupt_voters must lie in [0, n_voters]")
    per_voter = 2**delta0
    pool = list(range(n_voters + n_voters * per_voter))
    corrupt = set(range(n_voters))  # plants; honest picks are uniform so labels are free
    for _ in range(n_voters - corrupt_voters):
        perm = rng.permutation(len(pool))
        chosen = [pool[i] for i in perm[:per_voter]]
        if any(cid in corrupt for cid in chosen):
            return False
        for cid in chosen:
            pool.remove(cid)
    return True


# -- blank ballots, casting, tally -------------------------------------------


@dataclass(frozen=True)
class BlankBallot:
    column: tuple[int, ...]  # one digit per surviving |D1> copy, in row order
    sk: int  # secret row index, 1-based


@dataclass(frozen=True)
class BallotSet:
    ballots: list[BlankBallot]
    pre_columns: list[tuple[int, ...]]  # pre-vote matrix, one column per voter


def measure_blank_ballots(
    stateset: StateSet,
    surviving_d1: tuple[int, ...],
    surviving_d2: tuple[int, ...],
    rng: Rng,
    use_sv: bool = False,
) -> BallotSet:
    """Measure the survivors computationally into columns and secret rows."""
    params = stateset.params
    n = params.n_voters
    if len(surviving_d1) != n or len(surviving_d2) != 1:
        raise InternalError(
            f"expected {n} surviving d1 copies and 1 d2 copy, "
            f"got {len(surviving_d1)} and {len(surviving_d2)}"
        )
    rows = [stateset.sample(stateset.d1[cid], "computational", rng, use_sv) for cid in surviving_d1]
    perm = stateset.sample(stateset.d2[surviving_d2[0]], "computational", rng, use_sv)
    columns = [tuple(row[k] for row in rows) for k in range(n)]
    ballots = [BlankBallot(column=columns[k], sk=perm[k] + 1) for k in range(n)]
    return BallotSet(ballots=ballots, pre_columns=columns)


def cast(ballot: BlankBallot, vote: int, candidates: int) -> tuple[int, ...]:
    """Add the vote to the secret row of the ballot column."""
    if not 0 <= vote < candidates:
        raise DomainError(f"vote must lie in [0, {candidates}), got {vote!r}")
    column = list(ballot.column)
    column[ballot.sk - 1] = (column[ballot.sk - 1] + vote) % candidates
    return tuple(column)


def row_sum(columns: list[tuple[int, ...]], row: int, candidates: int) -> int:
    return sum(col[row] for col in columns) % candidates


def tally_rows(columns: list[tuple[int, ...]], candidates: int) -> list[int]:
    """The self-tally: row sums of the broadcast matrix are the cast votes."""
    n_rows = len(columns[0])
    return [row_sum(columns, j, candidates) for j in range(n_rows)]


@dataclass(frozen=True)
class ElectionRun:
    accepted: bool
    aborted_by: int | None
    tallies: list[int] | None
    ballots: list[BlankBallot]
    columns: list[tuple[int, ...]]


def run_honest_election(
    params: DualBasisParams, votes: list[int], rng: Rng, use_sv: bool = False
) -> ElectionRun:
    """Full protocol with everyone honest, for tests and the CLI."""
    if len(votes) != params.n_voters:
        raise ParameterError(f"need {params.n_voters} votes")
    stateset = setup_honest(params)
    order = rng.shuffled(range(params.n_voters))
    report = cut_and_choose(stateset, order, rng, use_sv=use_sv)
    if not report.accepted:
        return ElectionRun(False, None, None, [], [])
    bs = measure_blank_ballots(stateset, report.surviving_d1, report.surviving_d2, rng, use_sv)
    columns = [cast(bs.ballots[k], votes[k], params.candidates) for k in range(params.n_voters)]
    for k in range(params.n_voters):
        if row_sum(columns, bs.ballots[k].sk - 1, params.candidates) != votes[k]:
            return ElectionRun(True, k, None, bs.ballots, columns)
    return ElectionRun(True, None, tally_rows(columns, params.candidates), bs.ballots, columns)


# -- vote extraction and deanonymization attacks ------------------------------


def attack_extract_votes(
    pre_columns: list[tuple[int, ...]],
    post_columns: list[tuple[int, ...]],
    candidates: int,
) -> list[int]:
    """Each voter's vote is their column's total drift between the matrices."""
    if len(pre_columns) != len(post_columns):
        raise ParameterError("matrices must cover the same voters")
    return [
        sum((post - pre) % candidates for pre, post in zip(pcol, qcol)) % candidates
        for pcol, qcol in zip(pre_columns, post_columns)
    ]


def attack_extract_votes_via_sk(
    sk_digits: tuple[int, ...], post_columns: list[tuple[int, ...]], candidates: int
) -> list[int]:
    """With every secret row known, the public row sums name each vote."""
    return [row_sum(post_columns, sk_digits[k], candidates) for k in range(len(sk_digits))]


@dataclass(frozen=True)
class AbortAttackResult:
    fired: bool
    aborting_voter: int | None
    recovered_vote: int | None
    victim_vote: int | None
    tampered_row: int


def attack_abort_deanonymize(
    params: DualBasisParams,
    votes: list[int],
    corrupt_voter: int,
    rng: Rng,
    tamper_value: int | None = None,
    target_row: int | None = None,
) -> AbortAttackResult:
    """Tamper one entry of the corrupted voter's column under a trusted setup.

    The honest voter whose secret row was hit fails their tally check
    and aborts, naming themselves; the adversary reads their vote off
    the untampered row sum it already knows.  A tamper_value drawn at
    random collides with the original entry with probability 1/c, in
    which case nothing fires and the attack reports itself inconclusive.
    """
    n, c = params.n_voters, params.candidates
    if not 0 <= corrupt_voter < n:
        raise ParameterError("corrupt_voter out of range")
    stateset = setup_honest(params)
    order = rng.shuffled(range(n))
    report = cut_and_choose(stateset, order, rng)
    if not report.accepted:  # cannot happen with honest states; guard anyway
        raise InternalError("honest setup failed verification")
    bs = measure_blank_ballots(stateset, report.surviving_d1, report.surviving_d2, rng)
    true_columns = [cast(bs.ballots[k], votes[k], c) for k in range(n)]

    own_row = bs.ballots[corrupt_voter].sk - 1
    if target_row is None:
        others = [j for j in range(n) if j != own_row]
        target_row = others[int(rng.integer(len(others)))]
    elif not 0 <= target_row < n:
        raise ParameterError("target_row out of range")
    original = true_columns[corrupt_voter][target_row]
    value = int(rng.integer(c)) if tamper_value is None else tamper_value % c

    victim = next(k for k in range(n) if bs.ballots[k].sk - 1 == target_row)
    victim_vote = votes[victim] if victim != corrupt_voter else None
    if value == original or victim == corrupt_voter:
        return AbortAttackResult(False, None, None, victim_vote, target_row)

    recovered = row_sum(true_columns, target_row, c)  # the matrix before the tamper
    return AbortAttackResult(True, victim, recovered, victim_vote, target_row)


# -- harness wiring -----------------------------------------------------------


class DualBasisSession(ProtocolSession):
    """Setup runs distribution, verification, and blank-ballot measurement."""

    def do_setup(self, strategy) -> None:
        self.params = DualBasisParams(
            n_voters=self.cfg.n_voters,
            candidates=self.cfg.protocol_params.get("candidates", 2),
            delta0=self.cfg.security_param,
        )
        self.stateset = setup_honest(self.params)
        self.setup_corrupt: set[int] = set()
        strategy.tamper_setup(self, self.transcript, self.rng)
        honest = [v for v in range(self.params.n_voters) if v not in self.setup_corrupt]
        order = self.rng.shuffled(honest) + self.rng.shuffled(sorted(self.setup_corrupt))
        report = cut_and_choose(self.stateset, order, self.rng, avoid_for=self.setup_corrupt)
        self.transcript.note(
            "cut-and-choose",
            accepted=report.accepted,
            surviving_d1=report.surviving_d1,
            surviving_d2=report.surviving_d2,
            corrupt_tested=report.corrupt_tested,
        )
        if not report.accepted:
            raise ProtocolAbort("state verification rejected the distributed copies")
        bs = measure_blank_ballots(
            self.stateset, report.surviving_d1, report.surviving_d2, self.rng
        )
        self.ballots = bs.ballots
        self.columns: dict[int, tuple[int, ...]] = {}
        self.honest_cast: dict[int, int] = {}

    def cast_honest(self, voter: int, vote: int):
        column = cast(self.ballots[voter], vote, self.params.candidates)
        self.columns[voter] = column
        self.honest_cast[voter] = vote
        return column

    def cast_corrupted(self, voter: int, strategy, rng: Rng):
        return strategy.cast_corrupted(self, voter, self.transcript, rng)

    def do_tally(self):
        cols = [self.columns[k] for k in range(self.cfg.n_voters)]
        self.transcript.note("broadcast", matrix=[list(col) for col in cols])
        for k in sorted(self.honest_cast):
            want = self.honest_cast[k]
            if row_sum(cols, self.ballots[k].sk - 1, self.params.candidates) != want:
                raise ProtocolAbort("row check failed", voter=k)
        return tally_rows(cols, self.params.candidates)

    def honest_counted(self, honest_votes: dict[int, int], x: list[int]) -> bool:
        from collections import Counter

        return not Counter(honest_votes.values()) - Counter(x)

    def ballot_count(self, declared_votes: list[int], x: list[int]) -> int:
        return len(x)  # the tally is structurally one row per voter

    def detail(self) -> dict:
        return {"candidates": self.params.candidates}


class CorruptSetupStrategy(AdversaryStrategy):
    """Distributing voter plants known product copies and reads the matrix.

    With target "d1" the plants are the would-be pre-vote matrix rows;
    if every plant survives verification the post-vote broadcast hands
    the adversary each voter's column drift, hence their vote.  With
    target "d2" one planted permutation reveals every secret row, and
    the public row sums name the votes directly.  Either way the guess
    falls back to a coin flip whenever a plant was burned by a test.
    """

    name = "corrupt-setup"

    def __init__(self, corrupt_voters, target: str = "d1"):
        if target not in ("d1", "d2"):
            raise ParameterError(f"target must be 'd1' or 'd2', got {target!r}")
        self.corrupt_voters = frozenset(corrupt_voters)
        if not self.corrupt_voters:
            raise ParameterError("the distributing voter must be corrupted")
        self.target = target

    def tamper_setup(self, session, transcript, rng):
        setup = attack_corrupt_setup(session.params, rng, target=self.target)
        session.stateset = setup.stateset
        session.setup_corrupt = set(self.corrupt_voters)
        transcript.scratch["plants"] = setup.corrupt_d1 if self.target == "d1" else setup.corrupt_d2
        transcript.scratch["cfg"] = session.cfg
        transcript.scratch["candidates"] = session.params.candidates

    def wants_corrupt(self, voter, transcript, rng):
        return voter in self.corrupt_voters

    def cast_corrupted(self, session, voter, transcript, rng):
        column = cast(
            session.ballots[voter], session.cfg.votes[voter], session.params.candidates
        )
        session.columns[voter] = column
        return column

    def guess_beta(self, transcript, rng):
        check = transcript.find_last("cut-and-choose")
        broadcast = transcript.find_last("broadcast")
        if not check or not check["accepted"] or broadcast is None:
            return rng.bit()
        plants = transcript.scratch["plants"]
        surviving = check["surviving_d1"] if self.target == "d1" else check["surviving_d2"]
        if any(cid not in plants for cid in surviving):
            return rng.bit()  # a plant was burned; the matrix is not fully known
        c = transcript.scratch["candidates"]
        post = [tuple(col) for col in broadcast["matrix"]]
        if self.target == "d1":
            pre = [tuple(plants[cid][k] for cid in surviving) for k in range(len(post))]
            extracted = attack_extract_votes(pre, post, c)
        else:
            perm = plants[surviving[0]]
            extracted = attack_extract_votes_via_sk(perm, post, c)
        cfg = transcript.scratch["cfg"]
        mapping = build_vote_permutation(cfg.vote_permutation, cfg.n_voters, list(range(c)))
        honest = [k for k in range(cfg.n_voters) if k not in self.corrupt_voters]
        if all(extracted[k] == cfg.votes[k] for k in honest):
            return 0
        if all(extracted[k] == mapping[(k, cfg.votes[k])] for k in honest):
            return 1
        return rng.bit()


class AbortProbeStrategy(AdversaryStrategy):
    """Under a trusted setup, tamper one broadcast entry and watch who aborts."""

    name = "abort-probe"

    def __init__(self, corrupt_voter: int = 0):
        self.corrupt_voter = corrupt_voter

    def wants_corrupt(self, voter, transcript, rng):
        return voter == self.corrupt_voter

    def cast_corrupted(self, session, voter, transcript, rng):
        c = session.params.candidates
        column = list(cast(session.ballots[voter], session.cfg.votes[voter], c))
        own_row = session.ballots[voter].sk - 1
        rows = [j for j in range(session.cfg.n_voters) if j != own_row]
        row = rows[int(rng.integer(len(rows)))]
        delta = 1 + int(rng.integer(c - 1))  # never collides with the original
        column[row] = (column[row] + delta) % c
        tampered = tuple(column)
        session.columns[voter] = tampered
        transcript.scratch.update(row=row, delta=delta, cfg=session.cfg, candidates=c)
        return tampered

    def guess_beta(self, transcript, rng):
        abort = transcript.find_last("abort")
        broadcast = transcript.find_last("broadcast")
        if not abort or abort.get("voter") is None or broadcast is None:
            return rng.bit()
        row = transcript.scratch["row"]
        c = transcript.scratch["candidates"]
        cols = broadcast["matrix"]
        recovered = (sum(col[row] for col in cols) - transcript.scratch["delta"]) % c
        cfg = transcript.scratch["cfg"]
        return 0 if recovered == cfg.votes[abort["voter"]] else 1


def _vote_domain(cfg) -> list[int]:
    return list(range(cfg.protocol_params.get("candidates", 2)))


BINDING = ProtocolBinding(
    name="dualbasis",
    session_factory=DualBasisSession,
    vote_domain=_vote_domain,
    tappable=False,
)
