"""Directed disjoint paths with congestion on tournaments: constructions, exact oracles and the irrelevant-vertex pipeline."""

__version__ = "0.1.0"
