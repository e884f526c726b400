"""shemom: cross-validated integer moments of the stochastic heat equation."""

__version__ = "0.1.0"
