"""Tests for the cross-shard feature."""
