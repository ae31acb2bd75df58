"""Combiners, elementary tests, simulation, ingestion and plotting services."""
