"""Prioritized distributed motion planning with coloring-based priorities."""

__version__ = "0.1.0"
