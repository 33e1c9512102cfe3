"""Tests for the state-sync feature."""
