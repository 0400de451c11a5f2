"""Tests for novikov-eta."""
