"""Numerical Rieffel deformation, twisted crossed products and Weyl calculus on phase-space grids."""

from .algebra_actions import ActionSpec, AlgebraElement, Backend
from .crossed_product import CPElement
from .phase_space import PhaseFunction, PhaseGrid, SymplecticSpace
from .rieffel import Strategy, deform_product

__version__ = "0.1.0"

__all__ = [
    "ActionSpec",
    "AlgebraElement",
    "Backend",
    "CPElement",
    "PhaseFunction",
    "PhaseGrid",
    "Strategy",
    "SymplecticSpace",
    "deform_product",
]
