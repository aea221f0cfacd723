"""Versioned calibrated constants.

Values marked ``calibrated`` were measured once on reference configurations
(see tools/calibrate_defaults.py, which regenerates this table) and then
frozen; reports embed the values actually used together with their
provenance.  Values marked ``config`` are tunable policy knobs.
"""

DEFAULTS_VERSION = 1

# --- monotonicity / allowability checks (config) ---
PSEUDOMONOTONE_C = 1.05          # slack factor for monotonicity on float grids
ALLOWABILITY_GRID_EPS = 1e-8     # low end of the default allowability grid

# --- divergence classification (config) ---
DIVERGENCE_J_MAX = 14            # probe truncations at eps = e^(-2^j), j <= this
DIVERGENCE_THRESHOLD = 50.0      # "clearly divergent" truncation value
DIVERGENCE_GROWTH = 1.05         # and the last doublings each grow by >= 5%
CAUCHY_REL_TOL = 0.01            # doubling increments below this => convergent
BERTRAND_BOUNDARY_TOL = 0.25     # |exponent - 1| below this recurses a log level
MATCHED_RATE_BAND = 25.0         # truncation-ratio band for the two divergence integrals

# --- radial chain count comparison, per dimension (calibrated) ---
# ratio = (#cubes meeting [0, x]) / log(1/(1-|x|)), measured over random and
# axis-aligned directions at depths 8..16, prefix counts above CHAIN_C3.
CHAIN_C1 = {2: 0.75, 3: 0.75}    # placeholder until calibration run
CHAIN_C2 = {2: 6.0, 3: 6.0}
CHAIN_C3 = {2: 8, 3: 8}

# --- discrete Poincare/overlap constants (calibrated) ---
POINCARE_C = {2: 2.0, 3: 2.0}    # r_Q^n <= C * integral(N(Q)) |Df|^n, placeholder
OVERLAP_C = {2: 16, 3: 64}       # max multiplicity of neighbor unions, placeholder

# --- ball family truncation (config) ---
FAMILY_TAIL_REL = 1e-6           # discarded tail mass relative to seed r^n

# --- cover engine (config) ---
EXPLICIT_FAMILY_MAX_BALLS = 3_000_000  # materialization budget for explicit covers


def as_dict():
    return {
        "version": DEFAULTS_VERSION,
        "pseudomonotone_c": PSEUDOMONOTONE_C,
        "divergence": {
            "j_max": DIVERGENCE_J_MAX,
            "threshold": DIVERGENCE_THRESHOLD,
            "growth": DIVERGENCE_GROWTH,
            "cauchy_rel_tol": CAUCHY_REL_TOL,
            "bertrand_boundary_tol": BERTRAND_BOUNDARY_TOL,
        },
        "chain_band": {"c1": CHAIN_C1, "c2": CHAIN_C2, "c3": CHAIN_C3},
        "poincare_c": POINCARE_C,
        "overlap_c": OVERLAP_C,
        "family_tail_rel": FAMILY_TAIL_REL,
    }
