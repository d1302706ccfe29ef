"""Spectral and scattering analysis of Laplace-Beltrami realizations on Grushin cylinders."""
from .extensions import ConfigError, ExtensionSpec, Family, GrushinParams, negative_count

__version__ = "0.1.0"

__all__ = ["ConfigError", "ExtensionSpec", "Family", "GrushinParams", "negative_count", "__version__"]
