"""Exact equivalent-PDE and rotational-isotropy analysis of linear MRT lattice Boltzmann schemes."""

__version__ = "0.1.0"
