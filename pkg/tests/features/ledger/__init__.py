"""Tests for the ledger feature."""
