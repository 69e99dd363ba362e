"""
Convention strategy: handles are checked only where the program says so.

Mutations are never intercepted. ``check()`` walks the enabled handles (or a
given subset) and calls ``maybe_changed`` on each, so intermediate states
between two checks are coalesced.
"""
import logging
from typing import TYPE_CHECKING, Dict, Iterable, List, Optional

from aexpr.exceptions import ForeignHandle
from aexpr.strategies.base import Capabilities, Strategy, StrategyKind

if TYPE_CHECKING:
    from aexpr.handle import AExprHandle

logger = logging.getLogger(__name__)


class ConventionStrategy(Strategy):
    kind = StrategyKind.CONVENTION
    capabilities = Capabilities(
        members=True, locals=True, globals=True, natives=True,
        explicit_scope=False, immediate=False,
    )

    def __init__(self, engine):
        super().__init__(engine)
        self.enabled: Dict[int, "AExprHandle"] = {}

    def register(self, handle: "AExprHandle") -> None:
        handle.last_result = self.evaluate(handle)
        self.enabled[handle.aexpr_id] = handle

    def unregister(self, handle: "AExprHandle") -> None:
        self.enabled.pop(handle.aexpr_id, None)

    def check(self, subset: Optional[Iterable["AExprHandle"]] = None) -> int:
        """
        Re-evaluate handles and fire the ones whose result changed.

        Args:
            subset: Handles to check; all enabled handles when omitted

        Returns:
            Number of handles that fired

        Raises:
            ForeignHandle: If a subset handle belongs to another engine
        """
        if subset is None:
            handles = list(self.enabled.values())
        else:
            handles = list(subset)
            for handle in handles:
                if handle.engine is not self.engine:
                    raise ForeignHandle(handle.aexpr_id)

        fired = 0
        errors: List[Exception] = []
        for handle in sorted(handles, key=lambda h: h.aexpr_id):
            if handle.disposed:
                continue
            try:
                if handle.maybe_changed(errors):
                    fired += 1
            except Exception as error:
                errors.append(error)
        if errors:
            raise errors[0]
        return fired

    def registry_size(self) -> int:
        return len(self.enabled)
