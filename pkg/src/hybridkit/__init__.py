"""Hybridised logics over pluggable base logics, with bisimulation and refinement checking."""

__version__ = "0.1.0"
