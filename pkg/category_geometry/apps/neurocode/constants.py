""" Constants for the neurocode app. """

# Tuning-curve families
RADIAL_BUMP = 'radial_bump'
SIGMOID_RAMP = 'sigmoid_ramp'
CURVE_FAMILIES = (RADIAL_BUMP, SIGMOID_RAMP)

# Noise families
GAUSSIAN_IID = 'gaussian_iid'
GAUSSIAN_CORRELATED = 'gaussian_correlated'
MULTIPLICATIVE = 'multiplicative'
POISSON = 'poisson'
NOISE_FAMILIES = (GAUSSIAN_IID, GAUSSIAN_CORRELATED, MULTIPLICATIVE, POISSON)
ADDITIVE_FAMILIES = (GAUSSIAN_IID, GAUSSIAN_CORRELATED)

# Unit-variance noise densities Q
Q_GAUSSIAN = 'gaussian'
Q_LAPLACE = 'laplace'
Q_STUDENT_T = 'student_t'
Q_UNIFORM = 'uniform'
DENSITIES = (Q_GAUSSIAN, Q_LAPLACE, Q_STUDENT_T, Q_UNIFORM)
DEFAULT_STUDENT_T_DOF = 5.0

# Variance links g of r = f + sigma sqrt(g(f)) z
LINK_RATE = 'f'
LINK_SQUARED = 'f2'
LINK_CONSTANT = '1'
VARIANCE_LINKS = (LINK_RATE, LINK_SQUARED, LINK_CONSTANT)

# Fisher weight of a multiplicative unit: exact, or the leading small-noise term only
FISHER_EXACT = 'exact'
FISHER_LEADING = 'leading'
FISHER_MODES = (FISHER_EXACT, FISHER_LEADING)

# Units whose rate falls below this are dropped from Poisson and multiplicative Fisher
RATE_FLOOR = 1e-9

# F_Q quadrature is truncated at |z| <= QUADRATURE_TRUNCATION
QUADRATURE_TRUNCATION = 12.0
QUADRATURE_LIMIT = 200
MOMENT_TOLERANCE = 1e-6

CORRELATION_TOLERANCE = 1e-10

# Maximum-likelihood decoding grid
ML_GRID_POINTS = 801
