"""
Presentation layer for the experiments feature.

Contains the command line; the HTTP API lives in main.py.
"""

from src.features.experiments.presentation.cli import cli, main

__all__ = ["cli", "main"]
