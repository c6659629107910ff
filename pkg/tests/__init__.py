"""Test suite for hmpnn-lab."""
