"""Physical constants, unit conversions and solver limits."""

import math

from scipy import constants as _sc

# CODATA values, fixed in one place
HBAR = _sc.hbar  # 1.054571817e-34 J s
SPEED_OF_LIGHT = _sc.c  # 2.99792458e8 m/s
TWO_PI = 2.0 * math.pi

# Unit conversions applied on config ingest
THZ = 1e12
PICOJOULE = 1e-12
MILLIWATT = 1e-3
NANOSECOND = 1e-9
PICOSECOND = 1e-12
MICROMETER = 1e-6

FORMAT_VERSION = "squeezetools-output/1.0"

# Mode labels of the three resonances
MODE_LABELS = ("drive", "signal", "pump")

# Dwell-time conventions
DWELL_INVERSE_TOTAL = "inverse_total"
DWELL_INVERSE_DOUBLE_TOTAL = "inverse_double_total"
DWELL_INVERSE_LINEWIDTH = "inverse_linewidth"
DWELL_CONVENTIONS = (DWELL_INVERSE_TOTAL, DWELL_INVERSE_DOUBLE_TOTAL, DWELL_INVERSE_LINEWIDTH)

# Grid limits
MIN_GRID_POINTS = 16
MAX_KERNEL_POINTS = 4096
ORACLE_MAX_POINTS = 256

# Tolerances
GROUP_VELOCITY_RTOL = 1e-9
PUMP_CONVERGENCE_RTOL = 1e-6
SU11_RTOL = 1e-6
PROPAGATOR_MAX_ENTRY = 1e12
HERMITICITY_RTOL = 1e-10
PSD_RTOL = 1e-10
TAKAGI_DEGENERACY_TOL = 1e-10

# Reporting
DEFAULT_MODE_COUNT = 10
DEFAULT_PUMP_FWHM_FRACTION = 0.1
PULSE_LEAD_FWHM = 5.0
PULSE_TRUNCATION_FWHM = 4.0
GRID_TAIL_DWELLS = 8.0
GRID_SAMPLES_PER_FWHM = 20.0
GRID_SAMPLES_PER_PUMP_LIFETIME = 20.0
