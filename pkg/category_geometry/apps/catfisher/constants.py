""" Constants for the catfisher app. """

# Posteriors below this are treated as exactly zero in F_cat
DEGENERATE_POSTERIOR = 1e-300

# Eigenvalues count toward the rank above max(RELATIVE * top, ABSOLUTE_FLOOR)
RANK_RELATIVE_THRESHOLD = 1e-8
RANK_ABSOLUTE_FLOOR = 1e-8

ZERO_GRADIENT = 1e-12
PDC_STOP_GRADIENT = 1e-10
MAX_LOG_ODDS_STEP = 10.0

# Defaults in units of the model's feature scale
DEFAULT_STEP_FRACTION = 0.01
DEFAULT_MAX_ARC_SCALES = 40.0
DEFAULT_MARGIN_SCALES = 2.0

BOUNDARY_TOLERANCE = 1e-10
ROOT_XTOL = 1e-14
EXTREMUM_RESIDUAL_TOLERANCE = 1e-6
POLISH_ITERATIONS = 30

# Points per field chunk when evaluating F_cat over grids
FIELD_CHUNK_SIZE = 2048
