"""Counting reads of private graphs per phase of a run."""

import logging
import threading
from collections import Counter
from contextlib import contextmanager
from contextvars import ContextVar
from typing import Dict, FrozenSet, Iterator, Optional, Tuple

logger = logging.getLogger(__name__)

ANY_GRAPH = "*"

_current_phase: ContextVar[Tuple[str, FrozenSet[str]]] = ContextVar(
    "graph_access_phase", default=("unscoped", frozenset())
)


class PrivacyAccessError(RuntimeError):
    """A phase read a graph it is not allowed to see."""

    def __init__(self, phase: str, graph_name: str, kind: str):
        super().__init__(f"phase '{phase}' read '{kind}' of private graph '{graph_name}'")
        self.phase = phase
        self.graph_name = graph_name
        self.kind = kind


class AccessTracker:
    """Thread-safe counter of (phase, graph, kind) reads.

    Phases are per thread, so concurrent query jobs each see their own phase.
    A phase may forbid graph names; ``ANY_GRAPH`` forbids every tracked graph.
    """

    def __init__(self):
        self._counts: Counter = Counter()
        self._lock = threading.Lock()

    @contextmanager
    def phase(self, name: str, forbid: Optional[FrozenSet[str]] = None) -> Iterator[None]:
        token = _current_phase.set((name, frozenset(forbid or ())))
        try:
            yield
        finally:
            _current_phase.reset(token)

    @property
    def current_phase(self) -> str:
        return _current_phase.get()[0]

    def record(self, graph_name: str, kind: str) -> None:
        phase, forbidden = _current_phase.get()
        if ANY_GRAPH in forbidden or graph_name in forbidden:
            logger.error(f"Blocked read of '{kind}' on '{graph_name}' during phase '{phase}'")
            raise PrivacyAccessError(phase, graph_name, kind)
        with self._lock:
            self._counts[(phase, graph_name, kind)] += 1

    def reads(self, phase: Optional[str] = None, graph_name: Optional[str] = None) -> int:
        """Total reads, optionally filtered by phase and/or graph name."""
        with self._lock:
            return sum(
                n for (p, g, _), n in self._counts.items()
                if (phase is None or p == phase) and (graph_name is None or g == graph_name)
            )

    def summary(self) -> Dict[str, int]:
        """Reads per phase."""
        totals: Counter = Counter()
        with self._lock:
            for (p, _, _), n in self._counts.items():
                totals[p] += n
        return dict(totals)
