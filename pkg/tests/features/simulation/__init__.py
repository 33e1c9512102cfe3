"""Tests for the simulation feature."""
