"""Benchmarking toolkit for password guessing models."""

__version__ = "0.1.0"
