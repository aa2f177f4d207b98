"""Exact homological algebra over finite small categories.

Modules over a finite category, tensor products over the category, free
resolutions and Tor/Ext oracles, orbit categories of finite groups, and a
chain-indexed spectral sequence engine computed from an explicit filtered
double complex, with convergence checked against the oracle.
"""

from .rings import ZZ, QQ, GF, ring_from_tag
from .fpmod import FPModule

__all__ = ["ZZ", "QQ", "GF", "ring_from_tag", "FPModule"]
__version__ = "0.1.0"
