"""Name-indexed lookup of protocol bindings and adversary strategies.

The harness stays protocol-agnostic and the protocol modules never see
the CLI; this is the one place that knows every concrete binding and
which strategies make sense against which protocol.
"""

from __future__ import annotations

from typing import Any

from . import conjcode, distball, dualbasis, travelball
from .errors import ConfigError
from .harness import AdversaryStrategy, BlindGuessStrategy, HonestStrategy, ProtocolBinding

BINDINGS: dict[str, ProtocolBinding] = {
    b.name: b
    for b in (
        dualbasis.BINDING,
        travelball.BINDING,
        distball.BINDING,
        conjcode.BINDING,
    )
}

# strategy name -> (class, protocols it targets; None = protocol-agnostic)
_STRATEGIES: dict[str, tuple[type, frozenset[str] | None]] = {
    "honest": (HonestStrategy, None),
    "blind-guess": (BlindGuessStrategy, None),
    "corrupt-setup": (dualbasis.CorruptSetupStrategy, frozenset({"dualbasis"})),
    "abort-probe": (dualbasis.AbortProbeStrategy, frozenset({"dualbasis"})),
    "double-vote": (travelball.DoubleVoteStrategy, frozenset({"travelball"})),
    "collude-sandwich": (travelball.SandwichStrategy, frozenset({"travelball"})),
    "d-transfer": (distball.DTransferStrategy, frozenset({"distball"})),
    "malleate": (conjcode.MalleateStrategy, frozenset({"conjcode"})),
    "serial-number": (conjcode.SerialNumberStrategy, frozenset({"conjcode"})),
}


def list_protocols() -> list[str]:
    return sorted(BINDINGS)


def get_binding(name: str) -> ProtocolBinding:
    try:
        return BINDINGS[name]
    except KeyError:
        raise ConfigError(
            f"unknown protocol {name!r}; known protocols: {', '.join(list_protocols())}"
        ) from None


def list_strategies(protocol: str | None = None) -> list[str]:
    """All strategy names, or just the ones applicable to one protocol."""
    if protocol is None:
        return sorted(_STRATEGIES)
    get_binding(protocol)
    return sorted(
        name
        for name, (_, targets) in _STRATEGIES.items()
        if targets is None or protocol in targets
    )


def build_strategy(
    name: str, protocol: str, params: dict[str, Any] | None = None
) -> AdversaryStrategy:
    """Instantiate a named strategy, checking it fits the protocol.

    params feeds the constructor as keyword arguments; unknown names or
    mismatched protocols surface as ConfigError so callers can map them
    to a usage error.
    """
    try:
        cls, targets = _STRATEGIES[name]
    except KeyError:
        raise ConfigError(
            f"unknown strategy {name!r}; known strategies: {', '.join(sorted(_STRATEGIES))}"
        ) from None
    if targets is not None and protocol not in targets:
        raise ConfigError(
            f"strategy {name!r} targets {', '.join(sorted(targets))}, not {protocol!r}"
        )
    try:
        return cls(**(params or {}))
    except TypeError as exc:
        raise ConfigError(f"bad parameters for strategy {name!r}: {exc}") from None
