"""Exact spectral-curve and BNR verification toolkit."""
