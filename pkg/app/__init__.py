"""svddcap: SVDD-based multivariate process capability."""

__version__ = "0.1.0"
