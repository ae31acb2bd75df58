"""Truncated Cauchy combination of p-values: combiners, elementary tests, simulations and CLI."""
