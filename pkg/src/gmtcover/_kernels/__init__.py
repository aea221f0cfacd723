"""Hot-kernel dispatch: compiled extension when built, numpy reference otherwise.

Set ``GMTCOVER_PURE=1`` to force the reference implementation (used by the
benchmark and the kernel-equivalence tests).
"""

import os

from . import _ref

DOMAIN_BALL = _ref.DOMAIN_BALL
DOMAIN_BOX = _ref.DOMAIN_BOX
MAX_LEVEL = _ref.MAX_LEVEL

if os.environ.get("GMTCOVER_PURE"):
    _impl = _ref
    IMPLEMENTATION = "python"
else:
    try:
        from . import _fast as _impl

        IMPLEMENTATION = "compiled"
    except ImportError:
        _impl = _ref
        IMPLEMENTATION = "python"

whitney_cubes = _impl.whitney_cubes
neighbor_pairs = _impl.neighbor_pairs
supercover_cells = _impl.supercover_cells
weighted_containment = _impl.weighted_containment

# table helpers are cheap; the reference versions are shared by both paths
encode_keys = _ref.encode_keys
build_tables = _ref.build_tables
lookup = _ref.lookup
