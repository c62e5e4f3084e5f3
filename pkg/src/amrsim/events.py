"""Deterministic discrete-event queue: events dequeue in (time, sequence) order."""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Any

FLOW_START = "flow-start"
MESSAGE_DELIVERY = "message-delivery"
WINDOW_CLOSE = "window-close"
DATA_START = "data-start"
CACHE_EXPIRY = "cache-expiry"


@dataclass(frozen=True, order=True)
class Event:
    time: float
    sequence: int
    kind: str = field(compare=False)
    payload: Any = field(compare=False)


class EventQueue:
    """Min-heap of events; the sequence counter breaks simultaneous-time ties."""

    def __init__(self) -> None:
        self._heap: list[Event] = []
        self._next_seq = 0

    def push(self, time: float, kind: str, payload: Any) -> Event:
        event = Event(time, self._next_seq, kind, payload)
        self._next_seq += 1
        heapq.heappush(self._heap, event)
        return event

    def pop(self) -> Event:
        return heapq.heappop(self._heap)

    def peek_time(self) -> float:
        return self._heap[0].time

    def __len__(self) -> int:
        return len(self._heap)

    def __bool__(self) -> bool:
        return bool(self._heap)
