"""Combinatorial classification of singular strata of cohomogeneity-three quotients."""

__version__ = "0.1.0"
