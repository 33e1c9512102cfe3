"""Tests for the merkle feature."""
