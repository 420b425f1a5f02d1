"""moravak: desk-scale computations in twisted Morava K-theory at p = 2."""

__version__ = "0.1.0"
