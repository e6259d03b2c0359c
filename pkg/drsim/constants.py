__author__ = 'drsim developers'

"""
default constants of the demand response pricing experiments

power in kW, prices in $/kWh, sensitivities beta in kW per ($/kWh)
"""
import numpy as np

# tariff, normalized prices
PI = 2.  # retail rate
PI0 = 1.  # utility energy cost
OMEGA = 0.  # non-volumetric surcharge per node
X_MIN = 0.
X_MAX = 2.

# objective
KAPPA = 5.
ETA = 0.01
LAMBDA_CAP_MIN = 10.
LAMBDA_CAP_FACTOR = 10.
DUAL_CAP_MARGIN = 0.9  # lambda* must stay below this fraction of the cap

# customer response
BETA_RANGE = (0., 2.)
BETA_FLOOR = 0.05
DELTA_FACTOR = 2.  # delta_n ~ U[0, DELTA_FACTOR * d_hat_n]
SIGMA0_FRACTION = 0.1  # sigma0_n = SIGMA0_FRACTION * delta_n
ZETA = 1.
FAMILIES = ('gaussian', 'deterministic', 'truncated_gaussian')
MAD_GAUSS = np.sqrt(2. / np.pi)  # E|z| of a standard normal
DEVIATION_SAFETY = 1.1

# solvers
EPSILON = 0.01
MAX_ITERS = 100000
CONVERGENCE_TOL = 1e-10
DIVERGENCE_FACTOR = 1e3
KKT_TOL = 1e-8
SADDLE_TOL = 1e-10
VARIANTS = ('PO', 'InPO', 'PS', 'StochasticInPO')
OFFLINE_VARIANTS = ('PO', 'InPO', 'PS')

# experiments
N_RUNS = 300
STATIC_STEPS = 1000
STATIC_SEED = 2  # master seed of the built-in static instance
DRE_START = 10 * 60  # minute of day
DRE_END = 15 * 60
PROFILE_RESOLUTION = 1  # minutes per step
HOUSES_PER_BUS = 25
SOLAR_FRACTION = 0.3
STDERR_MARGIN = 3.
TAIL_FRACTION = 0.1  # share of the final steps averaged for terminal statistics
