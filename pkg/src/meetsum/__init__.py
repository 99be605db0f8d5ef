"""Non-neural machinery for query-based meeting summarization experiments."""

__version__ = "0.1.0"
