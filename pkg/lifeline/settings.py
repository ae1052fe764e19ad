import os

# Settings for lifeline. Every value can be overridden from the environment
# so that bundled scenarios and batch runs can be tuned without code changes.

PROJECT_ROOT = os.path.dirname(os.path.abspath(__file__))

# Directory holding the bundled scenarios. `LIFELINE_IIM_SCENARIO_DIR`
# replaces it for scenario-name lookup.
SCENARIO_DIR = os.path.join(PROJECT_ROOT, 'scenarios')

# Version of the scenario document schema understood by the parser.
SCHEMA_VERSION = 1

# Default sampling grid of the temporal engine, in hours.
DEFAULT_DT = float(os.environ.get('LIFELINE_DT', 0.25))

# How autonomy clocks are charged: 'expected' or 'dominant'.
DEFAULT_AUTONOMY_MODE = os.environ.get('LIFELINE_AUTONOMY_MODE', 'expected')

# Fixed-point resolution of inter-network dependency cycles.
FIXED_POINT_TOLERANCE = 1e-10
FIXED_POINT_MAX_ITERATIONS = 1000
FIXED_POINT_DAMPING = 0.5

# Two instants closer than this are the same grid point.
TIME_EPSILON = 1e-9

# Report export.
CSV_SIGNIFICANT_DIGITS = 12

# Number of threads used to run ensemble members. 1 runs them in sequence.
ENSEMBLE_WORKERS = int(os.environ.get('LIFELINE_ENSEMBLE_WORKERS', 1))

LOG_LEVEL = os.environ.get('LIFELINE_LOG_LEVEL', 'INFO')
LOG_FORMAT = '%(asctime)s %(levelname)s %(name)s: %(message)s'
