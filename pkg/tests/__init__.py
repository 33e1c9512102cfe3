"""
Test suite for the Adaptive Shard Simulator.

Tests are organized to mirror the src structure.
"""
