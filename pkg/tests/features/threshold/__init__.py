"""Tests for the threshold feature."""
