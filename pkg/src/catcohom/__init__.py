"""Cohomology of small categories and k-graphs, and its comparison with path-groupoid cohomology."""
from importlib.metadata import PackageNotFoundError, version

try:
    __version__ = version("artifact")
except PackageNotFoundError:  # running from a source tree
    __version__ = "0.1.0"

from .bar import cohomology_finite, is_coboundary, normalize_cocycle
from .category import FiniteCategory, LambdaModule, validate_category, validate_module
from .errors import CatcohomError
from .groupoid import GroupoidElement, InfinitePath
from .kgraph import KGraphModule, KGraphPresentation, h1_constant, validate_kgraph
from .linalg import AbelianGroupStructure, IntMatrix, smith_normal_form

__all__ = [
    "AbelianGroupStructure",
    "CatcohomError",
    "FiniteCategory",
    "GroupoidElement",
    "InfinitePath",
    "IntMatrix",
    "KGraphModule",
    "KGraphPresentation",
    "LambdaModule",
    "cohomology_finite",
    "h1_constant",
    "is_coboundary",
    "normalize_cocycle",
    "smith_normal_form",
    "validate_category",
    "validate_kgraph",
    "validate_module",
]
