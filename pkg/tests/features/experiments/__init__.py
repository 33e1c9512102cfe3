"""Tests for the experiments feature."""
