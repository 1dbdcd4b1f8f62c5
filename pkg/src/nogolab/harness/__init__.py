"""Experiment runner, catalog, RNG streams, statistics and the CLI."""
