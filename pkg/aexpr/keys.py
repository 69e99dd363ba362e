"""Dependency keys: addressable slots of mutable state."""
from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class MemberKey:
    object_id: int
    name: str


@dataclass(frozen=True)
class LocalKey:
    scope_id: int
    name: str


@dataclass(frozen=True)
class GlobalKey:
    name: str


DependencyKey = Union[MemberKey, LocalKey, GlobalKey]
