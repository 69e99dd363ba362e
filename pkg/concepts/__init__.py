"""Reactive concepts built on active expressions."""
from concepts.constraints import ConstraintSystem, ConstraintVar, NonlinearConstraint, UnsupportedRelation
from concepts.layers import Layer, LayerManager, NoSuchBaseMethod
from concepts.object_queries import InstanceRegistry, UntrackedClass, View
from concepts.signals import CyclicSignal, SignalMeta, SignalRegistry
from concepts.solver import LinearConstraint, SolverState, UnsatisfiableSystem
from concepts.triggers import Trigger, trigger

__all__ = [
    "ConstraintSystem",
    "ConstraintVar",
    "NonlinearConstraint",
    "UnsupportedRelation",
    "Layer",
    "LayerManager",
    "NoSuchBaseMethod",
    "InstanceRegistry",
    "UntrackedClass",
    "View",
    "CyclicSignal",
    "SignalMeta",
    "SignalRegistry",
    "LinearConstraint",
    "SolverState",
    "UnsatisfiableSystem",
    "Trigger",
    "trigger",
]
