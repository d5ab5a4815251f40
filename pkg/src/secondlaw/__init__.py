"""Second-law analysis of open systems."""

__version__ = "0.1.0"
