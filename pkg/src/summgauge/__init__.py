"""summgauge: quality and bias metrics for multi-document summarization."""

__version__ = "0.1.0"
