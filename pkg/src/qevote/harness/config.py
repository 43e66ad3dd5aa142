"""Experiment configuration shared by the harness, protocols, and CLI."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any

from ..errors import ConfigError


@dataclass
class ExperimentConfig:
    """Everything a trial needs besides the adversary and the seed.

    votes is the declared vote vector the default strategies use; a
    strategy may override it.  casting_order fixes the voter order for
    every trial; None draws a fresh uniform order per trial.
    vote_permutation feeds privacy experiments: either the name "flip"
    (cyclic shift of each vote within the domain, same for every voter)
    or an explicit {(voter, vote): vote} table.
    """

    protocol: str
    n_voters: int
    corruption_budget: float = 0.0
    security_param: int = 1
    votes: list[Any] | None = None
    casting_order: list[int] | None = None
    vote_permutation: str | dict | None = None
    protocol_params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.n_voters < 1:
            raise ConfigError("n_voters must be >= 1")
        if not 0.0 <= self.corruption_budget <= 1.0:
            raise ConfigError("corruption_budget must lie in [0, 1]")
        if self.security_param < 0:
            raise ConfigError("security_param must be >= 0")
        if self.votes is not None and len(self.votes) != self.n_voters:
            raise ConfigError(f"votes has length {len(self.votes)}, expected {self.n_voters}")
        if self.casting_order is not None:
            if sorted(self.casting_order) != list(range(self.n_voters)):
                raise ConfigError("casting_order must be a permutation of all voters")

    @property
    def max_corrupt(self) -> int:
        return math.floor(self.corruption_budget * self.n_voters)


def build_vote_permutation(spec: str | dict | None, n_voters: int, domain: list) -> dict:
    """Materialize a vote-permutation table {(voter, vote): vote}.

    "flip" maps every vote to the next one cyclically within the domain,
    identically for all voters.  A dict spec is validated to be a
    per-voter bijection of the domain.
    """
    if spec is None:
        raise ConfigError("privacy experiment needs a vote permutation")
    if spec == "flip":
        nxt = {v: domain[(i + 1) % len(domain)] for i, v in enumerate(domain)}
        return {(k, v): nxt[v] for k in range(n_voters) for v in domain}
    if spec == "identity":
        raise ConfigError("vote permutation must act non-trivially on some vote")
    if isinstance(spec, dict):
        table = dict(spec)
        for k in range(n_voters):
            images = []
            for v in domain:
                if (k, v) not in table:
                    raise ConfigError(f"vote permutation misses voter {k}, vote {v!r}")
                images.append(table[(k, v)])
            if sorted(map(repr, images)) != sorted(map(repr, domain)):
                raise ConfigError(f"vote permutation is not a bijection for voter {k}")
        if all(table[(k, v)] == v for k in range(n_voters) for v in domain):
            raise ConfigError("vote permutation must act non-trivially on some vote")
        return table
    raise ConfigError(f"unsupported vote permutation spec {spec!r}")
