"""SU(2) gate synthesis with Fibonacci-anyon braids.

Braid words over the two Fibonacci B3 generators are dense in SU(2).  This
package approximates the binary icosahedral group with short braids, uses the
14400-element symmetry group of the 600-cell to replicate seed braids across
the 3-sphere, and refines the covering with geodesic hyperdome meshes and an
orthoscheme dictionary, so that arbitrary SU(2) targets compile to braid words
without a Solovay-Kitaev stage.
"""

from fibonav.quaternions import distance, hopf_map, quat_from_su2, quat_mul, su2_from_quat
from fibonav.braids import evaluate, format_word, invert, normalize, parse_word, sigma

__version__ = "0.1.0"

__all__ = [
    "distance",
    "hopf_map",
    "quat_from_su2",
    "quat_mul",
    "su2_from_quat",
    "evaluate",
    "format_word",
    "invert",
    "normalize",
    "parse_word",
    "sigma",
    "__version__",
]
