""" Constants for the infomeasure app. """

QUADRATURE = 'quadrature'
MONTE_CARLO = 'monte_carlo'

NATS = 'nats'
BITS = 'bits'
UNITS = (NATS, BITS)

# Default quadrature box: every component's mean +- BOX_STANDARD_DEVIATIONS standard deviations
BOX_STANDARD_DEVIATIONS = 6.0

# Class masses captured by a quadrature grid must be within this of 1
GRID_MASS_TOLERANCE = 1e-3

# Tensor grids above this many nodes are slow; a warning is logged
LARGE_GRID_NODES = 2000000

# Upper bound on the elements of one (responses x nodes x classes) block of the grid posterior
BLOCK_ELEMENTS = 4000000

# F_cat counts as lying in the range of a singular F_code below this relative residual
RANGE_TOLERANCE = 1e-8

# Data-processing inequality slack, in combined standard errors
INEQUALITY_STANDARD_ERRORS = 3.0

# 1-D Bayes rate: argmax changes are located on this many scan points, then refined by Brent
BOUNDARY_SCAN_POINTS = 4001
BOUNDARY_XTOL = 1e-14

# Coordinate changes used by invariance checks must be better conditioned than this
MAX_TRANSFORM_CONDITION = 10.0
