"""Multi-user goal-oriented edge offloading: simulator and per-slot optimizers."""

__version__ = "0.1.0"
