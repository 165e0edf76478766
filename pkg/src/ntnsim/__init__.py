"""Link-level Monte Carlo simulator for a multi-layer HAPS/UAV network."""

__version__ = "0.1.0"
