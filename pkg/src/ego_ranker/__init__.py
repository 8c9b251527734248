"""Ranked ego networks from interaction logs."""
