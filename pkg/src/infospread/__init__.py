"""Deterministic simulators for word-of-mouth information flow among fund
managers: pair-wise gossip chains, network diffusion centrality, SIR-style
contagion, reaction-diffusion fronts, and fund summary reports."""

from . import cli, epi_sir, errors, fundstats, gossip, netdiff, rdwave

__version__ = "0.1.0"

__all__ = ["cli", "epi_sir", "errors", "fundstats", "gossip", "netdiff",
           "rdwave", "__version__"]
