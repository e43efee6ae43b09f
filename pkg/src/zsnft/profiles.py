"""Analytic test potentials with closed-form scattering data.

Three model signals are provided:

* ``OVER``     -- over-soliton ``A sech t`` (Satsuma-Yajima pulse)
* ``RECT``     -- rectangle of height ``A`` on ``[-L, L]``
* ``PHASED``   -- single soliton ``exp(-i t) sech t`` with eigenvalue 0.5+0.5i

Their closed-form ``a``, ``b``, ``r``, eigenvalues and norming constants are the
oracles every numerical scheme in the package is checked against.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import UnsupportedEigenvalue
from .gamma import gamma

PHASED_EIGENVALUE = 0.5 + 0.5j
PHASED_NORMING = 1j


class ProfileKind(str, enum.Enum):
    OVER = "over"
    RECT = "rect"
    PHASED = "phased"


@dataclass(frozen=True)
class ProfileSpec:
    """A model potential.

    ``amplitude`` is ignored for ``PHASED``. ``half_width`` is the support
    half-width for ``RECT`` and the truncation half-width otherwise. A zero
    amplitude is accepted and yields the zero potential.
    """

    kind: ProfileKind
    amplitude: float = 1.0
    half_width: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "kind", ProfileKind(self.kind))
        if self.amplitude < 0:
            raise ValueError("amplitude must be non-negative")
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")


def over(A, L=30.0):
    return ProfileSpec(ProfileKind.OVER, A, L)


def rect(A, L=1.0):
    return ProfileSpec(ProfileKind.RECT, A, L)


def phased(L=30.0):
    return ProfileSpec(ProfileKind.PHASED, 1.0, L)


def evaluate_q(spec: ProfileSpec, t):
    """Potential value(s) at time(s) ``t``; accepts scalars or arrays."""
    t_arr = np.asarray(t, dtype=float)
    if spec.kind is ProfileKind.OVER:
        out = spec.amplitude / np.cosh(t_arr) + 0j
    elif spec.kind is ProfileKind.RECT:
        out = np.where(np.abs(t_arr) <= spec.half_width, spec.amplitude, 0.0) + 0j
    else:
        out = np.exp(-1j * t_arr) / np.cosh(t_arr)
    if out.ndim == 0:
        return complex(out)
    return out


# --- rectangle helpers -------------------------------------------------------
# cos(2L sqrt(z)) and sin(2L sqrt(z))/sqrt(z) are entire in z = xi^2 + A^2, so
# the sqrt branch never matters; the sinc form also removes the k=0 singularity.

def _rect_cs(A, L, xi, branch=1):
    z = xi * xi + A * A
    k = branch * cmath.sqrt(z)
    if abs(k) * L < 1e-8:
        return 1.0 - 2.0 * L * L * z, 2.0 * L * (1.0 - 2.0 * L * L * z / 3.0), k
    return cmath.cos(2.0 * k * L), cmath.sin(2.0 * k * L) / k, k


def _over_a(A, xi):
    return gamma(0.5 - 1j * xi) ** 2 / (gamma(0.5 - A - 1j * xi) * gamma(0.5 + A - 1j * xi))


def _over_a_safe(A, xi):
    # 1/Gamma is entire: a pole of a denominator Gamma means a exact zero of a
    try:
        return _over_a(A, xi)
    except ZeroDivisionError:
        return 0j


def _over_b(A, xi):
    return math.sin(math.pi * A) / cmath.cosh(math.pi * xi)


def _phased_a(xi):
    return (xi - PHASED_EIGENVALUE) / (xi - PHASED_EIGENVALUE.conjugate())


def _vectorize(fn, xi):
    if np.ndim(xi) == 0:
        return complex(fn(complex(xi)))
    xi_arr = np.asarray(xi, dtype=complex)
    return np.array([fn(complex(x)) for x in xi_arr.ravel()], dtype=complex).reshape(xi_arr.shape)


def analytic_a(spec: ProfileSpec, xi):
    """Closed-form a(xi).

    For ``PHASED`` the standard reflectionless one-soliton coefficient
    (xi - xi_s)/(xi - conj(xi_s)) is returned; it is not derived from the
    sampled potential and is meant for eigenvalue checks only.
    """
    A, L = spec.amplitude, spec.half_width
    if spec.kind is ProfileKind.OVER:
        return _vectorize(lambda x: _over_a_safe(A, x), xi)
    if spec.kind is ProfileKind.RECT:
        def f(x):
            c, s, _ = _rect_cs(A, L, x)
            return cmath.exp(2j * x * L) * (c - 1j * x * s)
        return _vectorize(f, xi)
    return _vectorize(_phased_a, xi)


def analytic_b(spec: ProfileSpec, xi):
    """Closed-form b(xi).

    ``PHASED`` returns 0, valid on the real axis where r vanishes. Signs
    follow the package convention b = -phi2 e^{-i xi L}, which gives
    b = A sin(2kL)/k for the rectangle and sin(pi A) sech(pi xi) for the
    over-soliton.
    """
    A, L = spec.amplitude, spec.half_width
    if spec.kind is ProfileKind.OVER:
        return _vectorize(lambda x: _over_b(A, x), xi)
    if spec.kind is ProfileKind.RECT:
        def f(x):
            _, s, _ = _rect_cs(A, L, x)
            return A * s
        return _vectorize(f, xi)
    return _vectorize(lambda x: 0j, xi)


def analytic_r(spec: ProfileSpec, xi):
    A, L = spec.amplitude, spec.half_width
    if spec.kind is ProfileKind.OVER:
        def f(x):
            # r = b / a written with the Gamma ratio inverted to stay finite
            num = gamma(0.5 - A - 1j * x) * gamma(0.5 + A - 1j * x)
            return _over_b(A, x) * num / gamma(0.5 - 1j * x) ** 2
        return _vectorize(f, xi)
    if spec.kind is ProfileKind.RECT:
        def f(x):
            c, s, _ = _rect_cs(A, L, x)
            return A * s * cmath.exp(-2j * x * L) / (c - 1j * x * s)
        return _vectorize(f, xi)
    return _vectorize(lambda x: 0j, xi)


def rect_residual(A, L, xi):
    """Residual of tan(2kL) = k/(i xi), k = sqrt(A^2 + xi^2)."""
    c, s, k = _rect_cs(A, L, xi)
    return s / c * k - k / (1j * xi)


def _rect_eigenvalues(A, L, steps=200):
    if A == 0:
        return []

    # on xi = i*eta the eigenvalue condition is the real equation
    # g(eta) = cos(2kL) + eta*sin(2kL)/k = 0, k = sqrt(A^2 - eta^2)
    def g(eta):
        c, s, _ = _rect_cs(A, L, 1j * eta)
        return (c + eta * s).real

    def dg(eta):
        h = 1e-7 * max(1.0, eta)
        return (g(eta + h) - g(eta - h)) / (2 * h)

    etas = np.linspace(0.0, A, steps + 1)[1:]
    vals = [g(e) for e in etas]
    prev_eta, prev_val = 0.0, g(0.0)
    roots = []
    for eta, val in zip(etas, vals):
        if prev_val == 0.0:
            roots.append(prev_eta)
        elif prev_val * val < 0:
            lo, hi = prev_eta, eta
            x = 0.5 * (lo + hi)
            for _ in range(100):
                gx = g(x)
                if gx == 0:
                    break
                if gx * g(lo) < 0:
                    hi = x
                else:
                    lo = x
                step = gx / dg(x)
                x_new = x - step
                if not lo < x_new < hi:
                    x_new = 0.5 * (lo + hi)
                if abs(x_new - x) < 1e-15 * max(1.0, abs(x)):
                    x = x_new
                    break
                x = x_new
            roots.append(x)
        prev_eta, prev_val = eta, val
    return sorted((1j * r for r in roots if r > 0), key=lambda z: -z.imag)


def analytic_eigenvalues(spec: ProfileSpec):
    """Eigenvalues in the upper half-plane, sorted by descending imaginary part."""
    A = spec.amplitude
    if spec.kind is ProfileKind.OVER:
        if A < 0.5:
            return []
        kmax = int(math.floor(A - 0.5))
        return [complex(0.0, A - 0.5 - k) for k in range(kmax + 1) if A - 0.5 - k > 0]
    if spec.kind is ProfileKind.RECT:
        return _rect_eigenvalues(A, spec.half_width)
    return [PHASED_EIGENVALUE]


def analytic_norming(spec: ProfileSpec, xi_j):
    """Closed-form norming constant c_j = Res r at ``xi_j``."""
    A, L = spec.amplitude, spec.half_width
    xi_j = complex(xi_j)
    if spec.kind is ProfileKind.OVER:
        top = complex(0.0, A - 0.5)
        if A < 0.5 or abs(xi_j - top) > 1e-9 * max(1.0, abs(top)):
            raise UnsupportedEigenvalue("closed form known only for the highest eigenvalue")
        return 1j * gamma(2 * A) / gamma(A) ** 2
    if spec.kind is ProfileKind.RECT:
        k2 = A * A + xi_j * xi_j
        c, s, _ = _rect_cs(A, L, xi_j)
        cot_term = 2 * L * c / s
        return -1j * k2 * cmath.exp(-2j * L * xi_j) / (A * (cot_term - 1))
    if abs(xi_j - PHASED_EIGENVALUE) > 1e-9:
        raise UnsupportedEigenvalue(f"{xi_j} is not the soliton eigenvalue")
    return PHASED_NORMING
