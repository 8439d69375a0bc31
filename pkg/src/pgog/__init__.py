"""pgog: a verification laboratory for finite graphs of finite p-groups.

Concrete coordinate models of the vertex/edge groups, presentation and
coset-enumeration cross-checks, graph-of-groups assembly with properness
witnesses, collapse detection with the rank-bound oracle, the recursive
tower of path-shaped graphs with its transition maps, amalgam normal
forms, and separation certificates.  See README.md for the tour.
"""

from .backend import BACKEND_NAME

__version__ = "0.1.0"

__all__ = ["BACKEND_NAME", "__version__"]
