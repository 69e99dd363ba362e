"""Errors raised by the active-expression core."""
from typing import Optional

from rxl.exceptions import RxlError


class DisposedHandle(RxlError):
    """Raised when a disposed active expression is used."""

    def __init__(self, aexpr_id: int, operation: str):
        super().__init__(
            message=f"Disposed aexpr: #{aexpr_id} cannot {operation}",
            details={"aexpr_id": aexpr_id, "operation": operation}
        )


class ForeignHandle(RxlError):
    """Raised when a handle owned by another engine is passed to check()."""

    def __init__(self, aexpr_id: int):
        super().__init__(
            message=f"Foreign aexpr: #{aexpr_id} belongs to another engine",
            details={"aexpr_id": aexpr_id}
        )


class PropagationLoop(RxlError):
    """Raised when change propagation does not settle within the round limit."""

    def __init__(self, rounds: int, last_aexpr: Optional[int] = None):
        super().__init__(
            message=f"Propagation loop: no quiescence after {rounds} rounds",
            details={"rounds": rounds, "last_aexpr": last_aexpr}
        )


class UnsupportedStrategy(RxlError):
    """Raised when a feature is used under a strategy that cannot provide it."""

    def __init__(self, feature: str, strategy: str):
        super().__init__(
            message=f"Unsupported strategy: {feature} is not available under {strategy}",
            details={"feature": feature, "strategy": strategy}
        )
