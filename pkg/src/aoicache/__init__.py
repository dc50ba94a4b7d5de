"""Age-aware edge cache update simulator and soft actor-critic agents."""

__version__ = "0.1.0"
