"""Tests for features module."""
