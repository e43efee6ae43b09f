import cmath
import math

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zsnft.gamma import gamma

# frozen mpmath values
FROZEN = [
    (0.5, math.sqrt(math.pi)),
    (2.25, 1.1330030963193463),
    (1 + 1j, 0.49801566811835607 - 0.15494982830181067j),
    (-2.5 + 0.3j, -0.6138229974377415 - 0.2112326149370418j),
    (0.1 - 7j, 1.847258471388663e-05 + 5.625609535565905e-06j),
    (3.7 + 9.5j, -0.000917065447076528 - 0.0007425143045274496j),
]


@pytest.mark.parametrize("z, expected", FROZEN)
def test_frozen_values(z, expected):
    assert abs(gamma(z) - expected) <= 1e-13 * abs(expected)


@pytest.mark.parametrize("n", range(1, 15))
def test_factorials(n):
    assert abs(gamma(n) - math.factorial(n - 1)) <= 1e-13 * math.factorial(n - 1)


@pytest.mark.parametrize("z", [0, -1, -4])
def test_poles(z):
    with pytest.raises(ZeroDivisionError):
        gamma(z)


finite = dict(allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(st.floats(-6, 6, **finite), st.floats(-10, 10, **finite))
def test_matches_mpmath(x, y):
    z = complex(x, y)
    if abs(y) < 1e-3 and abs(x - round(x)) < 1e-3 and x < 0.5:
        return  # near a pole
    ref = complex(mpmath.gamma(mpmath.mpc(x, y)))
    assert abs(gamma(z) - ref) <= 1e-13 * abs(ref)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.1, 5, **finite), st.floats(-5, 5, **finite))
def test_recurrence_and_conjugation(x, y):
    z = complex(x, y)
    g = gamma(z)
    assert abs(gamma(z + 1) - z * g) <= 1e-12 * abs(z * g)
    assert abs(gamma(z.conjugate()) - g.conjugate()) <= 1e-13 * abs(g)


def test_reflection():
    z = 0.3 + 0.4j
    lhs = gamma(z) * gamma(1 - z)
    assert abs(lhs - cmath.pi / cmath.sin(cmath.pi * z)) < 1e-13 * abs(lhs)
