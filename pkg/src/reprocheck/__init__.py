"""Static reproducibility-readiness assessment for research software repositories."""

__version__ = "0.1.0"
