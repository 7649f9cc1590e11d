"""Privacy-preserving personalized federated learning simulator."""

__version__ = "0.1.0"
