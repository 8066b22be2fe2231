"""Computational tools for a ramified unitary Rapoport-Zink space over a 2-adic field."""

from .errors import RZLabError
from .padic_tower import make_ext, make_field

__version__ = "0.1.0"
__all__ = ["RZLabError", "make_field", "make_ext", "__version__"]
