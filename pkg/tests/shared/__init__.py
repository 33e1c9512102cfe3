"""Tests for shared module."""
