"""Physical constants (SI, exact 2019 redefinition values)."""

import math

h = 6.62607015e-34
hbar = h / (2 * math.pi)
e = 1.602176634e-19
c = 299792458.0

#: magnetic flux quantum h/2e
phi0 = h / (2 * e)
#: von Klitzing resistance h/e^2
R_Q = h / e**2

#: superconducting gap of aluminium, 180 ueV
AL_GAP = 180e-6 * e
