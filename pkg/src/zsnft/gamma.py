"""Complex Gamma function via the Lanczos approximation (g=7, 9 terms)."""

import cmath
import math

_G = 7
_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)


def gamma(z):
    """Gamma(z) for complex ``z``; reflection is used for Re z < 1/2.

    Raises ZeroDivisionError at the poles z = 0, -1, -2, ...
    """
    z = complex(z)
    if z.imag == 0 and z.real <= 0 and z.real == math.floor(z.real):
        raise ZeroDivisionError(f"Gamma pole at {z}")
    if z.real < 0.5:
        s = cmath.sin(math.pi * z)
        return math.pi / (s * gamma(1.0 - z))
    z -= 1.0
    x = _COEF[0]
    for i in range(1, _G + 2):
        x += _COEF[i] / (z + i)
    t = z + _G + 0.5
    return _SQRT_2PI * cmath.exp((z + 0.5) * cmath.log(t) - t) * x
