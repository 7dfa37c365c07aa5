"""Conversational search with knowledge-graph passage scoring."""

__version__ = "0.1.0"
