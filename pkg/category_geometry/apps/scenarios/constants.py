""" Constants for the scenarios app. """

GAUSS1D = 'gauss1d'
PDC2D = 'pdc2d'
FCAT_FIELD = 'fcat-field'
FCODE_FIELD = 'fcode-field'
TRAIN2D = 'train2d'
CONTINUUM = 'continuum'
MI_VALIDATE = 'mi-validate'
ALLOCATE = 'allocate'
BIASVAR = 'biasvar'
SCENARIO_NAMES = (GAUSS1D, PDC2D, FCAT_FIELD, FCODE_FIELD, TRAIN2D, CONTINUUM, MI_VALIDATE, ALLOCATE, BIASVAR)

MANIFEST_FILE = 'manifest.json'
SUMMARY_FILE = 'summary.json'
ERROR_FILE = 'error.json'

# Config keys naming input files; relative paths resolve against the config file's directory
FILE_KEYS = ('model_file', 'code_file', 'network_file')

# Keys every scenario accepts
SEED_KEY = 'seed'

# Largest seed accepted on the command line or in a config
MAX_SEED = 2 ** 64 - 1

# Distance from the triple point below which boundary probes are left out of the rank statistics
TRIPLE_EXCLUSION = 1.0

# Lagrange multiplier of an allocation given neither a multiplier nor a budget
DEFAULT_MULTIPLIER = 1.0
