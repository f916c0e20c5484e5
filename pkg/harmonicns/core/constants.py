"""Constants that are used all over HarmonicNS."""
import pathlib

import numpy as np

ROOT_DIR = pathlib.Path(__file__).resolve().parent.parent
DEFAULT_OUTPUT_DIR = pathlib.Path("harmonicns-output")

HALF_PI = np.pi/2

# Sectional curvature of the base is -A**2; every formula is specialized to 2.
CURVATURE_A = 2

# Points closer than this to the corners z = +-i are refused by jets.
CORNER_RADIUS = 1e-3
# Points closer than this to the axis L are refused by residual evaluators.
AXIS_MARGIN = 1e-3

# Strip grid.
DEFAULT_R = 12.
DEFAULT_NR = 769
DEFAULT_NS = 129
MIN_NODES = 8
WINDOW_MARGIN_NODES = 2
SOLVER_TOLERANCE = 1e-10
NEUMANN_TOLERANCE = 1e-6

# Boundary profile.
DEFAULT_PROFILE_KIND = "gaussian"
DEFAULT_PROFILE_AMPLITUDE = 0.25
DEFAULT_PROFILE_WIDTH = 1.
DEFAULT_SHIFTS = (-1.5, 1.5)

# Supersolution polynomial p(s) = 8s^4 - 50s^2 + 75, lowest degree first.
SUPERSOLUTION_COEFFICIENTS = (75., 0., -50., 0., 8.)
LEMMA_DELTA = 1.
ENDPOINT_GUARD = 1e-4
DEFAULT_SUPERSOLUTION_SAMPLES = 10**6
DEFAULT_PSI_DELTAS = (0.25, 0.5, 0.75, 0.9, 1., 1.5)
DEFAULT_PSI_SAMPLES = 64
GROWTH_FIT_TOLERANCE = 0.05

# Pointwise sampling.
DEFAULT_BOUND_SAMPLES = 10**4
DEFAULT_PROBES = 10**3
DEFAULT_SEED = 20240601

# Quadrature on the half-disk.
DEFAULT_QUADRATURE_LEVELS = 3
GRADING_RATIO = 0.7
GAUSS_ORDER = 4
INNER_RADIUS = 0.5
INNER_CELLS = 4
ANGULAR_CELLS = 24
# Graded rings at level l: (GRADED_DEPTH + GRADED_DEPTH_STEP*l)*2**l.
GRADED_DEPTH = 48
GRADED_DEPTH_STEP = 8
CONVERGENCE_THRESHOLD = 1e-2

# Modulated solutions.
DEFAULT_F0 = 1.
DEFAULT_K_MULTIPLIERS = (1., 2., 4.)
DEFAULT_NU = 1.
DEFAULT_PROBE_TIMES = (0., 0.5, 1., 2., 5., 10.)

# Output formatting.
CSV_FORMAT = "%.17g"
JSON_INDENT = 2

# Exit codes of the command line runner.
EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_VERIFICATION = 4
