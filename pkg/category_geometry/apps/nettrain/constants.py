""" Constants for the nettrain app. """

# Hidden-layer activations; the output layer is always a softmax
SIGMOID = 'sigmoid'
RELU = 'relu'
LINEAR = 'linear'
ACTIVATIONS = (SIGMOID, RELU, LINEAR)

# Training defaults
DEFAULT_EPOCHS = 200
DEFAULT_BATCH_SIZE = 64
DEFAULT_LEARNING_RATE = 0.5
DEFAULT_NOISE_SIGMA = 0.3

# ReLU preactivations within this of 0 count as sitting on the kink
KINK_TOLERANCE = 1e-9

# Mean activity vectors shorter than this have no direction
ZERO_ACTIVITY_NORM = 1e-12

# Softmax outputs must sum to one within this
SOFTMAX_TOLERANCE = 1e-10

# Boundary probes: candidates drawn per requested point, and the line search along -grad L_ij
BOUNDARY_OVERSAMPLING = 4
BOUNDARY_MAX_ROUNDS = 10
BOUNDARY_INITIAL_STEP = 0.25
BOUNDARY_MAX_STEP = 16.0
BOUNDARY_XTOL = 1e-12
GRADIENT_FLOOR = 1e-12

# Interior probes: samples the model categorizes at least this confidently
INTERIOR_CONFIDENCE = 0.99

# Units whose curve is flatter than this along a probe are inactive
ACTIVE_UNIT_RANGE = 1e-6

# Posterior-transition region of a path: max_y P(y|x) below this
TRANSITION_THRESHOLD = 0.9

# Decomposition consistency checks, in combined standard errors, with an absolute floor
DECOMPOSITION_STANDARD_ERRORS = 3.0
DECOMPOSITION_ABSOLUTE_SLACK = 1e-10

# Checkpoint files
NETWORK_FORMAT_VERSION = 1
