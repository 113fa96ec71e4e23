"""Bridge from the torch model ecosystem into the sigsal file formats."""

__version__ = "0.1.0"
