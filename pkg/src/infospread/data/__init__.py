"""Bundled data files: synthetic fund sample, demo network, reference tables."""
