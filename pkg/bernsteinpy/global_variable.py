import os

# current package path
WORKING_PATH = os.getcwd()
PACKAGE_PATH = os.path.dirname(os.path.abspath(__file__))

# the directory where the built-in reference models stay
DATASET_PATH = os.path.join(PACKAGE_PATH, "dataset")

# the directory where tables, traces and reports are written by default
DATASET_OUTPUT_PATH = os.path.join(WORKING_PATH, "output")

TOOL_VERSION = "0.1.0"

# Tell which section the user is currently in
SECTION = ['Config', 'Model', 'Simulation', 'Verification']

# numerical cutoffs
EXACT_ENUMERATION_LIMIT = 12
EXACT_BINOMIAL_LIMIT = 60
MIN_ATOM_WEIGHT = 1e-15
RECURSION_EXACT_LIMIT = 20
GENERATOR_MAX_DIM = 7

# simulation defaults
DEFAULT_L_MAX = 10_000
DEFAULT_DT = 1e-3
DEFAULT_BATCHES = 20
DEFAULT_BURN_IN_FRACTION = 0.1
DEFAULT_SE_BUDGET = 1e-3
MAX_MC_OPERATOR_DRAWS = 1_000_000
REPLICA_BLOCK_SIZE = 1_000
Z_THRESHOLD = 3.0
RATE_TOLERANCE = 1e-12

ENV_OPERATOR_MODES = ['exact', 'monte_carlo']
OUTPUT_FORMATS = ['csv', 'json']
CONFIG_SUFFIXES = ['.json', '.toml', '.yaml', '.yml']

# top-level and selection keys accepted in a model config
CONFIG_KEYS = ['name', 'lambda0', 'lambda_atoms', 'mu_atoms', 'nu_atoms', 'theta_a', 'theta_A', 'selection']
SELECTION_KEYS = ['kappa', 'beta', 'p']

# built-in reference models, resolved against DATASET_PATH
BUILTIN_MODELS = {
    'neutral': 'neutral.json',
    'genic': 'genic.json',
    'theta_only': 'theta_only.toml',
    'full': 'full.json',
    'finite_c': 'finite_c.yaml',
    'violating': 'violating.json',
}

# The subcommands provided to use
SUBCOMMANDS = ['check', 'simulate-forward', 'simulate-dual', 'moran', 'duality', 'fixation', 'moments', 'recursion']

# subcommand defaults
DEFAULT_REPLICAS = 1_000
DEFAULT_N_MAX = 3
DEFAULT_POPULATION_SIZE = 100
DEFAULT_FIXATION_HORIZON = 1_000.0
DEFAULT_FORWARD_HORIZON = 20.0
LYAPUNOV_N_MAX = 1_000
DUALITY_X_GRID = [0.2, 0.5, 0.8]
DUALITY_T_GRID = [0.1, 0.5, 1.0]
FIXATION_GRID_POINTS = 11
GENERATOR_TOLERANCE = 1e-10
FIXATION_TOLERANCE = 0.02
# z-score excursions tolerated on a grid of Monte Carlo comparisons
MAX_Z_EXCURSIONS = 1
