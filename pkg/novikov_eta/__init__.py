"""novikov-eta: h0-localized algebraic Novikov and motivic computations around η."""

__version__ = "0.1.0"

__all__ = ["__version__"]
