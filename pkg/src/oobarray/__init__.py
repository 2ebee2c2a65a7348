"""Beamformed PA distortion in multi-user antenna arrays."""

__version__ = "0.1.0"
