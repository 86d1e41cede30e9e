"""Differential evolution driven by chaotic number generators."""

__version__ = "0.1.0"
