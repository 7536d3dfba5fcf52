"""Physical constants (CODATA 2018 recommended values, SI units)."""
import math

HBAR = 1.054571817e-34  # J s
K_B = 1.380649e-23  # J / K, exact
C_LIGHT = 299792458.0  # m / s, exact
AMU = 1.660539067e-27  # kg, atomic mass unit m0
TWO_PI = 2.0 * math.pi
