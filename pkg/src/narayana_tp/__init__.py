"""Exact total-positivity certification for Narayana-type matrices."""

__version__ = "0.1.0"
