"""gmtcover: covering machinery for boundary images of grid-sampled mappings.

Subsystems
----------
``whitney``         dyadic Whitney decompositions, neighbor graphs, radial chains
``moduli``          moduli of continuity, regularity checks, divergence integrals
``gauges``          dimension gauges for generalized Hausdorff content
``balls``           weighted ball families (explicit and closed-form)
``sobolev``         grid-sampled maps, cube statistics, Dirichlet energy
``hausdorff``       content upper bounds, weighted covers, mass-distribution lower bounds
``cover_engine``    the annulus/selection pipeline producing weighted covers
``counterexample``  the Cantor-tower homeomorphism and its measure witness

The hot kernels run from a compiled extension when available; see
``gmtcover.kernel_implementation()``.
"""

from . import _kernels

__version__ = "0.1.0"


def kernel_implementation():
    """'compiled' when the Cython extension is active, else 'python'."""
    return _kernels.IMPLEMENTATION
