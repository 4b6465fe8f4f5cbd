"""Institution-level collaboration and citation network analysis."""

__version__ = "0.1.0"
