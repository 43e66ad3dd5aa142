"""Bookkeeping shared by every experiment trial.

Transcript is the public record both the challenger and the adversary
can read: an append-only event list plus a scratch area for adversary
working notes.  The challenger's secret bit in privacy experiments is
deliberately never written here; a test pins that.

BallotRegister models the per-voter ballot slots: one write per voter,
writes allowed only while casting is open.
"""

from __future__ import annotations

from typing import Any

from ..errors import ProtocolOrderError


class Transcript:
    """Append-only public event log plus adversary scratch space."""

    def __init__(self) -> None:
        self.events: list[tuple[str, dict[str, Any]]] = []
        self.scratch: dict[str, Any] = {}

    def note(self, tag: str, **payload: Any) -> None:
        self.events.append((tag, payload))

    def find_all(self, tag: str) -> list[dict[str, Any]]:
        return [p for t, p in self.events if t == tag]

    def find_last(self, tag: str) -> dict[str, Any] | None:
        found = self.find_all(tag)
        return found[-1] if found else None


class BallotRegister:
    """Write-once ballot slots, one per voter, guarded by a casting window."""

    def __init__(self, n_voters: int) -> None:
        self._slots: list[Any] = [None] * n_voters
        self._written = [False] * n_voters
        self._open = True

    def store(self, voter: int, handle: Any) -> None:
        if not self._open:
            raise ProtocolOrderError("ballot register is sealed")
        if not 0 <= voter < len(self._slots):
            raise IndexError(f"voter {voter} out of range")
        if self._written[voter]:
            raise ProtocolOrderError(f"voter {voter} already holds a ballot slot")
        self._slots[voter] = handle
        self._written[voter] = True

    def get(self, voter: int) -> Any:
        if not 0 <= voter < len(self._slots):
            raise IndexError(f"voter {voter} out of range")
        return self._slots[voter]

    def seal(self) -> None:
        if not self._open:
            raise ProtocolOrderError("ballot register sealed twice")
        self._open = False

    @property
    def sealed(self) -> bool:
        return not self._open

    def __len__(self) -> int:
        return len(self._slots)
