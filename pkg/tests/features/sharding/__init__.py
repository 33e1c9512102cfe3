"""Tests for the sharding feature."""
