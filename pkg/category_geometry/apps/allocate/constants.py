""" Constants for the allocate app. """

POWER_LAW = 'power_law'
ENTROPIC = 'entropic'
GENERAL = 'general'
TABULATED = 'tabulated'
RESPONSE_CURVE = 'response_curve'
CONSTRAINT_TYPES = (POWER_LAW, ENTROPIC, TABULATED, RESPONSE_CURVE)

CLOSED_FORM = 'closed_form'
ROOT_SOLVE = 'root_solve'
GRID_MINIMIZE = 'grid_minimize'

# Branch id of nodes left out of the optimization (F_cat = 0 or no probability mass)
INACTIVE_BRANCH = -1

# Sum of w * P(x) over the nodes must be within this of 1
MASS_TOLERANCE = 1e-3

# Log-spaced samples of u^2 Psi'(u) used to locate roots and branches
SCAN_POINTS = 4001

ROOT_XTOL = 1e-15
ROOT_RTOL = 1e-14

# Per-node contributions closer than this (relative) are ties; the smaller F_code wins
TIE_TOLERANCE = 1e-12

# Brute-force minimization over ln u
MINIMIZE_FLOOR = 1e-8
MINIMIZE_SCAN_POINTS = 401
MINIMIZE_XATOL = 1e-10
EXPANSION_FACTOR = 10.0
MAX_EXPANSIONS = 60

# Budget mode: tolerance on ln(lambda)
BUDGET_XTOL = 1e-13
