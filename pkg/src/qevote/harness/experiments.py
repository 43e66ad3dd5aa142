"""Game-based security experiments.

Three games share one trial engine.  Per trial the adversary declares
every voter's vote, then is consulted voter by voter in casting order
and may corrupt up to floor(budget * N) of them; honest ballots are
cast by the challenger.  The games differ in how the trial is scored:

  integrity     -- adversary wins iff the election completes (X != bot)
                   yet some honest vote went uncounted or more ballots
                   than voters were counted.  The tallier is honest.
  verifiability -- integrity plus an explicit verification predicate
                   that must accept; the adversary may corrupt the
                   tallier and publish its own X.
  privacy       -- the challenger flips a hidden bit beta and casts
                   either the declared votes (beta=0) or their images
                   under the adversary's vote permutation (beta=1);
                   the adversary wins by guessing beta.  Trials where
                   the permutation fails to permute the honest votes
                   are excluded with outcome -1 before any guess.
                   Corruption choices are settled even when a trial
                   aborts early, so the exclusion rule conditions on
                   the same honest set either way.

Every trial draws from an independent child stream of the master seed,
so reports are reproducible bit for bit and insensitive to thread
count.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Any

from ..errors import ConfigError, InternalError, ProtocolAbort
from ..rng import Rng
from .config import ExperimentConfig
from .registers import BallotRegister, Transcript
from .report import EXCLUDED, TrialReport
from .session import ProtocolBinding
from .strategy import AdversaryStrategy


def _jsonable(x: Any) -> Any:
    if x is None or isinstance(x, (bool, int, float, str)):
        return x
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    return str(x)


def _run_one_trial(
    cfg: ExperimentConfig,
    binding: ProtocolBinding,
    strategy: AdversaryStrategy,
    kind: str,
    trial_rng: Rng,
    verifier,
) -> tuple[int, dict[str, Any]]:
    transcript = Transcript()
    domain = binding.vote_domain(cfg)
    votes = strategy.choose_votes(cfg, trial_rng)
    if len(votes) != cfg.n_voters or any(v not in domain for v in votes):
        raise ConfigError(f"declared votes must be {cfg.n_voters} entries from {domain}")

    beta = None
    mapping = None
    if kind == "qpriv":
        mapping = strategy.choose_vote_permutation(cfg, trial_rng, domain)
        beta = trial_rng.bit()  # challenger-private; never enters the transcript

    session = binding.session_factory(cfg, trial_rng, transcript)
    order = list(cfg.casting_order) if cfg.casting_order else trial_rng.permutation(cfg.n_voters)
    register = BallotRegister(cfg.n_voters)
    corrupted: list[int] = []
    consulted: set[int] = set()
    aborted = False

    def mark_corrupt(voter: int) -> None:
        if len(corrupted) >= cfg.max_corrupt:
            raise ConfigError(
                f"strategy {strategy.name!r} exceeded its corruption budget "
                f"of {cfg.max_corrupt}"
            )
        corrupted.append(voter)
        transcript.note("corrupted", voter=voter)

    try:
        session.setup(strategy)
        for voter in order:
            # consulted exactly once per voter, in casting order
            consulted.add(voter)
            if strategy.wants_corrupt(voter, transcript, trial_rng):
                mark_corrupt(voter)
                handle = session.cast_for_adversary(voter, strategy, trial_rng)
            else:
                v = votes[voter]
                if beta == 1:
                    v = mapping[(voter, v)]
                handle = session.cast(voter, v)
                if binding.tappable:
                    token = voter if binding.identities_in_transit else None
                    strategy.on_honest_ballot(session, token, handle, transcript, trial_rng)
            register.store(voter, handle)
        register.seal()
    except ProtocolAbort as abort:
        aborted = True
        transcript.note("abort", reason=abort.reason, voter=abort.voter)
        # The corruption set is the adversary's static choice, so settle it
        # even though the abort cut the casting loop short; scoring and the
        # privacy exclusion rule condition on who stayed honest.
        for voter in order:
            if voter not in consulted:
                consulted.add(voter)
                if strategy.wants_corrupt(voter, transcript, trial_rng):
                    mark_corrupt(voter)

    honest_votes = {k: votes[k] for k in range(cfg.n_voters) if k not in corrupted}
    detail: dict[str, Any] = {"corrupted": len(corrupted)}

    if kind == "qpriv":
        cast_multiset = sorted(repr(mapping[(k, v)]) for k, v in honest_votes.items())
        if cast_multiset != sorted(repr(v) for v in honest_votes.values()):
            detail["tally"] = None
            return EXCLUDED, detail
        x = None
        if not aborted:
            try:
                x = session.tally()
            except ProtocolAbort as abort:
                transcript.note("abort", reason=abort.reason, voter=abort.voter)
        transcript.note("tally", outcome=_jsonable(x))
        guess = strategy.guess_beta(transcript, trial_rng)
        if guess not in (0, 1):
            raise InternalError(f"beta guess must be a bit, got {guess!r}")
        detail["tally"] = _jsonable(x)
        return (1 if guess == beta else 0), detail

    # integrity / verifiability scoring
    x = None
    if not aborted:
        if kind == "qver" and strategy.corrupts_tallier:
            x = strategy.output_tally(session, transcript, trial_rng)
        else:
            try:
                x = session.tally()
            except ProtocolAbort as abort:
                transcript.note("abort", reason=abort.reason, voter=abort.voter)
    transcript.note("tally", outcome=_jsonable(x))
    detail["tally"] = _jsonable(x)
    detail.update(session.detail())
    if x is None:
        return 0, detail
    if kind == "qver" and not verifier(x, session, cfg):
        return 0, detail
    win = (not session.honest_counted(honest_votes, x)) or (
        session.ballot_count(list(votes), x) > cfg.n_voters
    )
    return (1 if win else 0), detail


def _run_batch(
    cfg: ExperimentConfig,
    binding: ProtocolBinding,
    strategy: AdversaryStrategy,
    kind: str,
    trials: int,
    seed: int,
    verifier=None,
    threads: int = 1,
) -> TrialReport:
    if trials < 1:
        raise ConfigError("trials must be >= 1")
    if cfg.protocol != binding.name:
        raise ConfigError(f"config names protocol {cfg.protocol!r} but binding is {binding.name!r}")
    master = Rng(seed)

    def one(i: int) -> tuple[int, dict[str, Any]]:
        return _run_one_trial(cfg, binding, strategy, kind, master.child(i), verifier)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(i) for i in range(trials)]

    return TrialReport(
        experiment=kind,
        protocol=binding.name,
        strategy=strategy.name,
        seed=seed,
        outcomes=[r[0] for r in results],
        details=[r[1] for r in results],
    )


def run_integrity_experiment(
    cfg: ExperimentConfig,
    binding: ProtocolBinding,
    strategy: AdversaryStrategy,
    trials: int,
    seed: int,
    threads: int = 1,
) -> TrialReport:
    """Integrity game: honest tallier, no verification predicate."""
    if strategy.corrupts_tallier:
        raise ConfigError("the tallier is not corruptible in the integrity experiment")
    return _run_batch(cfg, binding, strategy, "qint", trials, seed, threads=threads)


def run_verifiability_experiment(
    cfg: ExperimentConfig,
    binding: ProtocolBinding,
    strategy: AdversaryStrategy,
    trials: int,
    seed: int,
    verifier=None,
    threads: int = 1,
) -> TrialReport:
    """Verifiability game; needs a verification predicate.

    verifier(x, session, cfg) -> bool, taken from the argument or the
    binding; none of the bundled protocols ships one, so without an
    explicit verifier this raises and points at the integrity game.
    """
    verifier = verifier or binding.default_verifier
    if verifier is None:
        raise ConfigError(
            f"protocol {binding.name!r} exposes no verification predicate; "
            "run the integrity experiment instead or bind an explicit verifier"
        )
    return _run_batch(cfg, binding, strategy, "qver", trials, seed, verifier=verifier, threads=threads)


def run_privacy_experiment(
    cfg: ExperimentConfig,
    binding: ProtocolBinding,
    strategy: AdversaryStrategy,
    trials: int,
    seed: int,
    threads: int = 1,
) -> TrialReport:
    """Privacy game with hidden challenge bit and exclusion rule."""
    return _run_batch(cfg, binding, strategy, "qpriv", trials, seed, threads=threads)
