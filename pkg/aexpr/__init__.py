"""
Active expressions: handles, dependency keys and errors.

The engine lives in ``aexpr.engine`` and is imported from there; it is not
re-exported here because the concept modules import this package.
"""
from aexpr.exceptions import DisposedHandle, ForeignHandle, PropagationLoop, UnsupportedStrategy
from aexpr.handle import AExprHandle, HandleRole
from aexpr.keys import DependencyKey, GlobalKey, LocalKey, MemberKey

__all__ = [
    "AExprHandle",
    "HandleRole",
    "DependencyKey",
    "GlobalKey",
    "LocalKey",
    "MemberKey",
    "DisposedHandle",
    "ForeignHandle",
    "PropagationLoop",
    "UnsupportedStrategy",
]
