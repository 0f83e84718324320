"""Lazy abstraction for maximal reachability in symbolic MDPs."""

__version__ = "0.1.0"
