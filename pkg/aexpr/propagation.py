"""Batch-wise change propagation with signal-aware ordering."""
import logging
from collections import deque
from contextlib import contextmanager
from typing import TYPE_CHECKING, Deque, Dict, Iterable, List

from aexpr.exceptions import PropagationLoop
from aexpr.handle import AExprHandle, HandleRole

if TYPE_CHECKING:
    from aexpr.engine import Engine

logger = logging.getLogger(__name__)


class Propagator:
    """
    Delivers write notifications to dependent handles.

    Each notification is a batch. Batches raised while another batch runs are
    queued and processed afterwards, up to ``round_limit`` batches per external
    mutation. Within a batch handles are checked in aexpr-id order, signal
    monitors first. When monitors fire, the signal graph is resolved before
    ordinary handles run; notifications arriving during resolution are
    collected and checked in the same batch.
    """

    def __init__(self, engine: "Engine", round_limit: int):
        self._engine = engine
        self.round_limit = round_limit
        self._queue: Deque[List[AExprHandle]] = deque()
        self._running = False
        self._deferring = False
        self._deferred: Dict[int, AExprHandle] = {}

    @property
    def running(self) -> bool:
        return self._running

    def notify(self, handles: Iterable[AExprHandle]) -> None:
        if self._deferring:
            for handle in handles:
                if handle.role is not HandleRole.SIGNAL_MONITOR:
                    handle.deferred = True
                    self._deferred[handle.aexpr_id] = handle
            return
        self._queue.append(list(handles))
        if not self._running:
            self._drain()

    @contextmanager
    def deferring(self):
        previous = self._deferring
        self._deferring = True
        try:
            yield
        finally:
            self._deferring = previous

    def _drain(self) -> None:
        self._running = True
        errors: List[Exception] = []
        rounds = 0
        try:
            while self._queue:
                rounds += 1
                if rounds > self.round_limit:
                    pending = self._queue[0]
                    self._queue.clear()
                    last = pending[0].aexpr_id if pending else None
                    logger.error(f"Propagation aborted after {self.round_limit} rounds (aexpr #{last})")
                    raise PropagationLoop(self.round_limit, last)
                self._run_batch(self._queue.popleft(), errors)
        finally:
            self._running = False
        if errors:
            raise errors[0]

    def _run_batch(self, batch: List[AExprHandle], errors: List[Exception]) -> None:
        unique = {handle.aexpr_id: handle for handle in batch if not handle.disposed}
        monitors = []
        ordinary: Dict[int, AExprHandle] = {}
        for aexpr_id in sorted(unique):
            handle = unique[aexpr_id]
            if handle.role is HandleRole.SIGNAL_MONITOR:
                monitors.append(handle)
            else:
                ordinary[aexpr_id] = handle

        for monitor in monitors:
            self.check(monitor, errors)

        signals = self._engine.signals
        if signals.pending:
            with self.deferring():
                try:
                    signals.resolve_pending()
                except Exception as error:
                    errors.append(error)
            deferred, self._deferred = self._deferred, {}
            for aexpr_id, handle in deferred.items():
                handle.deferred = False
                ordinary.setdefault(aexpr_id, handle)

        for aexpr_id in sorted(ordinary):
            handle = ordinary[aexpr_id]
            if not handle.disposed:
                self.check(handle, errors)

    def check(self, handle: AExprHandle, errors: List[Exception]) -> bool:
        """maybe_changed plus re-analysis of handles that fired."""
        try:
            fired = handle.maybe_changed(errors)
        except Exception as error:
            errors.append(error)
            return False
        if fired and not handle.disposed:
            try:
                self._engine.strategy.after_fire(handle)
            except Exception as error:
                errors.append(error)
        return fired
