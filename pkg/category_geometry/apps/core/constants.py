""" Constants for the core app. """

# Quality flags carried on results. A flagged result is still usable; the flag says which
# part of it was computed under a degraded condition.
FLAG_DEGENERATE_POSTERIOR = 'degenerate_posterior'
FLAG_NON_DIFFERENTIABLE = 'non_differentiable'
FLAG_SINGULAR_FISHER = 'singular_fisher'
FLAG_RATE_UNDERFLOW = 'rate_underflow'
FLAG_RELU_KINK = 'relu_kink'
FLAG_CLIPPED = 'clipped'
FLAG_RANK_MATCHED = 'rank_matched'

# Exit codes of the scenario command
EXIT_OK = 0
EXIT_CONFIG_ERROR = 2
EXIT_NUMERICAL_FAILURE = 3

# Symmetric PSD tolerances for Fisher matrices
SYMMETRY_TOLERANCE = 1e-10
PSD_TOLERANCE = 1e-10
SINGULAR_RELATIVE_TOLERANCE = 1e-10
