"""Classical desk-scale simulations of quantum linear solvers for
geologic fracture-flow problems."""

__version__ = "0.1.0"
