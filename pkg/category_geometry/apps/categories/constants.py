""" Constants for the categories app. """

GAUSSIAN = 'gaussian'
EXP_GAUSS = 'expgauss'
COMPONENT_TYPES = (GAUSSIAN, EXP_GAUSS)

PRIOR_SUM_TOLERANCE = 1e-12
COVARIANCE_SYMMETRY_TOLERANCE = 1e-12

# Central finite differences: h_i = FD_GRADIENT_STEP * (1 + |x_i|)
FD_GRADIENT_STEP = 1e-5
FD_HESSIAN_STEP = 1e-4
# Gradients closer than this many steps to an ExpGauss kink are flagged
KINK_FLAG_STEPS = 2

EXP_GAUSS_DOMAIN = (-1.0, 1.0)

# Index of the '+' and '-' classes of a binary model
MINUS = 0
PLUS = 1
