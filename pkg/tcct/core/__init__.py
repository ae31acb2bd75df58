"""Settings and the exception hierarchy shared across the package."""
