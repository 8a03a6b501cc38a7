"""Certificates for two degree-100 Belyi maps realizing Aut(HS) and HS over Q(t)."""

__version__ = "1.0.0"
