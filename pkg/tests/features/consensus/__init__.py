"""Tests for the consensus feature."""
