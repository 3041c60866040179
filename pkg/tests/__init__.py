"""Test suite for CRSS."""
