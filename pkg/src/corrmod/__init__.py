"""Correspondence modules on the decorated line."""
