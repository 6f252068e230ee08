"""Self-dual bivariate bicycle codes on twisted tori."""

__version__ = "0.1.0"
