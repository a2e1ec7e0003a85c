"""Numerical laboratory for slopes of parabolic semigroups on staircase Koenigs domains."""

__version__ = "0.1.0"
