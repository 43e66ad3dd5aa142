"""Conjugate-coding ballots: BB84-state fragments with a parity vote bit.

The election authority picks a secret basis vector over n+1 qubit
slots and prepares each voter a blank ballot of w fragments.  Every
fragment encodes n random bits plus their XOR in the four conjugate
states |0>, |1>, |+>, |->, so a fragment decoded in the right basis
always XORs to zero.  A voter re-randomizes each fragment with an
even-parity flip mask (Y gates leave the XOR alone), writes the
candidate into the last qubit of the trailing fragments, and sends the
ballot to the tallier over an anonymous channel.  Once casting ends
the authority reveals the basis and the tallier decodes fragment by
fragment; a ballot counts only if every non-candidate fragment still
decodes to zero.

Both bundled attacks exploit the same fact: a Y flip moves every
conjugate state to its partner, so anyone can flip a decoded bit
without knowing the basis.  A channel adversary flips candidate bits
of ballots in transit and changes votes undetectably.  A corrupt
authority flips the parity of chosen head fragments instead, planting
a per-voter serial number that survives the voter's re-randomization
and links every anonymous ballot back to its sender.
"""

from __future__ import annotations

import warnings
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, ParameterError
from .harness import (
    AdversaryStrategy,
    ProtocolBinding,
    ProtocolSession,
    build_vote_permutation,
)
from .qcore import PureState, apply_unitary, fourier_matrix, measure_computational, y_flip_matrix
from .rng import Rng

_SQRT_HALF = 1.0 / np.sqrt(2.0)
_BB84 = {
    (0, 0): np.array([1.0, 0.0]),
    (1, 0): np.array([0.0, 1.0]),
    (0, 1): np.array([_SQRT_HALF, _SQRT_HALF]),
    (1, 1): np.array([_SQRT_HALF, -_SQRT_HALF]),
}
_HADAMARD = fourier_matrix(2)
_Y = y_flip_matrix()


def _check_bits(bits, length: int | None, name: str) -> tuple[int, ...]:
    out = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in out):
        raise ParameterError(f"{name} must be a bit vector, got {bits!r}")
    if length is not None and len(out) != length:
        raise ParameterError(f"{name} must have length {length}, got {len(out)}")
    return out


# -- ballots -----------------------------------------------------------------


@dataclass(frozen=True)
class BallotFragment:
    """One n+1 qubit block of a ballot.

    bits is the challenger-side record of what each qubit decodes to in
    the ballot's own basis; the state is the ground truth and the tests
    hold the two together.
    """

    state: PureState
    bits: tuple[int, ...]

    @property
    def parity(self) -> int:
        bit = 0
        for b in self.bits:
            bit ^= b
        return bit


@dataclass(frozen=True)
class Ballot:
    """w fragments plus challenger-side bookkeeping; voters never see n or b."""

    fragments: tuple[BallotFragment, ...]
    n: int
    voter: int | None = None

    @property
    def w(self) -> int:
        return len(self.fragments)


def draw_basis(n: int, rng: Rng) -> tuple[int, ...]:
    """The authority's secret basis choice, one bit per qubit slot."""
    if n < 1:
        raise ParameterError(f"security parameter must be >= 1, got {n}")
    return tuple(rng.bit() for _ in range(n + 1))


def _fragment_state(bits: tuple[int, ...], basis: tuple[int, ...]) -> PureState:
    amps = np.array([1.0])
    for a, b in zip(bits, basis):
        amps = np.kron(amps, _BB84[a, b])
    return PureState([2] * len(bits), amps)


def _fresh_fragment(basis: tuple[int, ...], rng: Rng, parity: int = 0) -> BallotFragment:
    head = [rng.bit() for _ in range(len(basis) - 1)]
    last = parity
    for b in head:
        last ^= b
    bits = tuple(head + [last])
    return BallotFragment(state=_fragment_state(bits, basis), bits=bits)


def make_blank_ballot(
    n: int, w: int, basis, rng: Rng, voter: int | None = None
) -> Ballot:
    """Prepare w even-parity fragments in the authority's secret basis."""
    if n < 1:
        raise ParameterError(f"security parameter must be >= 1, got {n}")
    if w < 1:
        raise ParameterError(f"fragment count must be >= 1, got {w}")
    basis = _check_bits(basis, n + 1, "basis")
    fragments = tuple(_fresh_fragment(basis, rng) for _ in range(w))
    return Ballot(fragments=fragments, n=n, voter=voter)


def _flip_qubits(fragment: BallotFragment, mask: tuple[int, ...]) -> BallotFragment:
    state = fragment.state
    for i, flip in enumerate(mask):
        if flip:
            state = apply_unitary(state, _Y, i)
    bits = tuple(a ^ d for a, d in zip(fragment.bits, mask))
    return BallotFragment(state=state, bits=bits)


def rerandomize(ballot: Ballot, rng: Rng) -> Ballot:
    """Apply a fresh even-parity Y mask to every fragment.

    The last mask bit is the XOR of the rest, so each fragment's decoded
    parity is untouched; the individual qubits come out rebiased to
    uniform, erasing everything the authority fixed except the parity.
    """
    fragments = []
    for fragment in ballot.fragments:
        head = [rng.bit() for _ in range(ballot.n)]
        last = 0
        for d in head:
            last ^= d
        fragments.append(_flip_qubits(fragment, tuple(head + [last])))
    return Ballot(fragments=tuple(fragments), n=ballot.n, voter=ballot.voter)


def encode_vote(ballot: Ballot, candidate_bits) -> Ballot:
    """Write the candidate bits into the trailing fragments' parity slots."""
    bits = _check_bits(candidate_bits, None, "candidate bits")
    if len(bits) > ballot.w:
        raise DomainError(f"{len(bits)} candidate bits exceed the {ballot.w}-fragment ballot")
    fragments = list(ballot.fragments)
    start = ballot.w - len(bits)
    for r, c in enumerate(bits):
        if c:
            mask = (0,) * ballot.n + (1,)
            fragments[start + r] = _flip_qubits(fragments[start + r], mask)
    return Ballot(fragments=tuple(fragments), n=ballot.n, voter=ballot.voter)


# -- decoding ----------------------------------------------------------------


def decode_fragment(fragment: BallotFragment, basis, rng: Rng) -> int:
    """Measure every qubit in its basis slot and XOR the outcomes."""
    basis = _check_bits(basis, fragment.state.n_qudits, "basis")
    state = fragment.state
    for i, b in enumerate(basis):
        if b:
            state = apply_unitary(state, _HADAMARD, i)
    bit = 0
    for i in range(len(basis)):
        record = measure_computational(state, i, rng)
        state = record.state
        bit ^= record.outcome
    return bit


def tally_decode(ballot: Ballot, basis, rng: Rng) -> tuple[int, ...]:
    """The tallier's view after the basis reveal: one decoded bit per fragment."""
    return tuple(decode_fragment(fragment, basis, rng) for fragment in ballot.fragments)


def accepted_candidate(decoded, m: int) -> tuple[int, ...] | None:
    """Validity rule: count a ballot only if every leading bit decodes to 0.

    Returns the trailing m candidate bits of an accepted ballot, None
    for a rejected one.
    """
    decoded = tuple(int(b) for b in decoded)
    if not 1 <= m <= len(decoded):
        raise ParameterError(f"candidate width {m} does not fit a {len(decoded)}-bit decode")
    if any(decoded[: len(decoded) - m]):
        return None
    return decoded[len(decoded) - m :]


def _bits_of(value: int, width: int) -> tuple[int, ...]:
    return tuple((value >> (width - 1 - i)) & 1 for i in range(width))


def _value_of(bits: tuple[int, ...]) -> int:
    value = 0
    for b in bits:
        value = (value << 1) | b
    return value


# -- attacks -----------------------------------------------------------------


def attack_malleate(ballot: Ballot, mask) -> Ballot:
    """Flip chosen candidate bits of a ballot in transit.

    The mask covers the trailing fragments; a set bit applies Y to that
    fragment's parity qubit, flipping its decoded bit in either basis.
    Nothing else about the ballot changes, so the tampering is invisible
    to the validity rule.
    """
    mask = _check_bits(mask, None, "mask")
    if len(mask) > ballot.w:
        raise DomainError(f"{len(mask)}-bit mask exceeds the {ballot.w}-fragment ballot")
    fragments = list(ballot.fragments)
    start = ballot.w - len(mask)
    flip = (0,) * ballot.n + (1,)
    for r, c in enumerate(mask):
        if c:
            fragments[start + r] = _flip_qubits(fragments[start + r], flip)
    return Ballot(fragments=tuple(fragments), n=ballot.n, voter=ballot.voter)


def attack_serial_number(
    n: int, w: int, basis, tag, rng: Rng, voter: int | None = None
) -> Ballot:
    """A corrupt authority's tagged blank: head fragments decode to the tag.

    A tag bit of 1 prepares that head fragment with odd parity.  Voter
    re-randomization only ever applies even-parity masks, so the tag
    reaches the tallier intact and the authority, holding the tag-to-
    voter map, reads the sender of every anonymous ballot.
    """
    if w < 1:
        raise ParameterError(f"fragment count must be >= 1, got {w}")
    basis = _check_bits(basis, n + 1, "basis")
    tag = _check_bits(tag, None, "tag")
    if len(tag) > w:
        raise DomainError(f"{len(tag)}-bit tag exceeds the {w}-fragment ballot")
    fragments = tuple(
        _fresh_fragment(basis, rng, parity=tag[j] if j < len(tag) else 0) for j in range(w)
    )
    return Ballot(fragments=fragments, n=n, voter=voter)


def one_more_unforgeability() -> str:
    """Forgery resistance of blank fragments is assumed, not simulated.

    The underlying game hands an adversary w fragments encoded in a
    secret basis and asks for w+1 valid ones in that same basis; the
    protocol's integrity argument takes the adversary's advantage over
    1/2 to be negligible.  No forger is modeled here, so callers get the
    literal status of the claim.
    """
    return "assumption"


# -- harness wiring -----------------------------------------------------------


class ConjCodeSession(ProtocolSession):
    """Authority-side state plus the anonymous ballot box for one trial."""

    def do_setup(self, strategy) -> None:
        pp = self.cfg.protocol_params
        n = pp.get("n", max(1, self.cfg.security_param))
        if not isinstance(n, int) or isinstance(n, bool) or n < 1:
            raise ParameterError("protocol parameter 'n' must be a positive int")
        w = pp.get("w", 4 * (n + 1))
        m = pp.get("m", 1)
        for name, value in (("w", w), ("m", m)):
            if not isinstance(value, int) or isinstance(value, bool) or value < 1:
                raise ParameterError(f"protocol parameter {name!r} must be a positive int")
        if m > w:
            raise ParameterError(f"candidate width {m} does not fit {w} fragments")
        if self.cfg.n_voters * m >= w:
            warnings.warn(
                f"{self.cfg.n_voters} voters x {m} candidate fragments needs far fewer "
                f"than the {w} fragments per ballot; spare-fragment forgery becomes viable",
                stacklevel=2,
            )
        self.n, self.w, self.m = n, w, m
        self.basis = draw_basis(n, self.rng)
        self.blanks = {
            voter: make_blank_ballot(n, w, self.basis, self.rng, voter=voter)
            for voter in range(self.cfg.n_voters)
        }
        self.box: list[Ballot] = []
        self.transcript.note("ballot-shape", n=n, w=w, m=m)
        strategy.tamper_setup(self, self.transcript, self.rng)

    def cast_honest(self, voter: int, vote: int) -> int:
        if vote not in range(1 << self.m):
            raise ParameterError(f"vote {vote!r} outside the {self.m}-bit candidate space")
        ballot = rerandomize(self.blanks[voter], self.rng)
        ballot = encode_vote(ballot, _bits_of(vote, self.m))
        self.box.append(ballot)
        return len(self.box) - 1

    def cast_corrupted(self, voter: int, strategy, rng: Rng):
        return strategy.cast_corrupted(self, voter, self.transcript, rng)

    def malleate_in_transit(self, handle: int, mask) -> None:
        self.box[handle] = attack_malleate(self.box[handle], mask)

    def do_tally(self) -> list[int]:
        accepted = []
        rejected = 0
        for ballot in self.box:
            candidate = accepted_candidate(tally_decode(ballot, self.basis, self.rng), self.m)
            if candidate is None:
                rejected += 1
            else:
                accepted.append(_value_of(candidate))
        self.transcript.note("decode", accepted=len(accepted), rejected=rejected)
        return sorted(accepted)

    def honest_counted(self, honest_votes: dict[int, int], x: list[int]) -> bool:
        return not Counter(honest_votes.values()) - Counter(x)

    def ballot_count(self, declared_votes: list[int], x: list[int]) -> int:
        return len(x)

    def detail(self) -> dict:
        return {"n": self.n, "w": self.w, "m": self.m}


class MalleateStrategy(AdversaryStrategy):
    """Channel adversary: flip candidate bits of tapped ballots in transit.

    Corrupts nobody; targets the k-th honest ballot it sees (every one
    when target is None) and applies the configured flip mask.  Any odd
    flip changes that voter's decoded candidate, so the announced tally
    can no longer cover the honest votes.
    """

    name = "malleate"

    def __init__(self, mask=(1,), target: int | None = 0):
        self.mask = _check_bits(mask, None, "mask")
        if not any(self.mask):
            raise ParameterError("an all-zero mask never changes a ballot")
        if target is not None and target < 0:
            raise ParameterError(f"target index must be >= 0, got {target}")
        self.target = target

    def on_honest_ballot(self, session, voter, handle, transcript, rng) -> None:
        seen = transcript.scratch.get("tapped", 0)
        transcript.scratch["tapped"] = seen + 1
        if self.target is None or seen == self.target:
            session.malleate_in_transit(handle, self.mask)
            transcript.note("malleated", handle=handle)


class SerialNumberStrategy(AdversaryStrategy):
    """Corrupt authority: tag each blank ballot, then read taps by tag.

    Setup swaps every voter's blank for one whose head fragments carry a
    one-hot serial number.  Tapped ballots are decoded in the known
    basis (conjugate eigenstates, so peeking disturbs nothing), the tag
    names the sender, and comparing recovered votes with the declared
    ones reads off the challenger's secret bit.
    """

    name = "serial-number"

    def tamper_setup(self, session, transcript, rng) -> None:
        if session.cfg.n_voters + session.m > session.w:
            raise ParameterError(
                f"one-hot tags for {session.cfg.n_voters} voters do not fit "
                f"{session.w} fragments with {session.m} candidate slots"
            )
        for voter in range(session.cfg.n_voters):
            tag = tuple(1 if j == voter else 0 for j in range(session.cfg.n_voters))
            session.blanks[voter] = attack_serial_number(
                session.n, session.w, session.basis, tag, rng, voter=voter
            )
        transcript.scratch.update(cfg=session.cfg, basis=session.basis, m=session.m, seen={})

    def on_honest_ballot(self, session, voter, handle, transcript, rng) -> None:
        decoded = tally_decode(session.box[handle], transcript.scratch["basis"], rng)
        m = transcript.scratch["m"]
        head = decoded[: len(decoded) - m]
        if sum(head) == 1:
            sender = head.index(1)
            transcript.scratch["seen"][sender] = _value_of(decoded[len(decoded) - m :])

    def guess_beta(self, transcript, rng) -> int:
        cfg = transcript.scratch["cfg"]
        seen: dict[int, int] = transcript.scratch["seen"]
        mapping = build_vote_permutation(
            cfg.vote_permutation, cfg.n_voters, list(range(1 << transcript.scratch["m"]))
        )
        moved = [k for k in seen if mapping[(k, cfg.votes[k])] != cfg.votes[k]]
        if moved and all(seen[k] == cfg.votes[k] for k in moved):
            return 0
        if moved and all(seen[k] == mapping[(k, cfg.votes[k])] for k in moved):
            return 1
        return rng.bit()


def _vote_domain(cfg) -> list[int]:
    return list(range(1 << cfg.protocol_params.get("m", 1)))


BINDING = ProtocolBinding(
    name="conjcode",
    session_factory=ConjCodeSession,
    vote_domain=_vote_domain,
    tappable=True,
    identities_in_transit=False,
)
