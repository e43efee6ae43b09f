"""Error measures, continuous-spectrum energy and runtime helpers."""

from __future__ import annotations

import math
import statistics
import time
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .discretize import SampledPotential
from .errors import LengthMismatch, NonFiniteInput, ZeroReference

_trapezoid = getattr(np, "trapezoid", None) or np.trapz

# below this magnitude a reference value is treated as zero
ZERO_REF = 0.0


@dataclass(frozen=True)
class ErrorReport:
    relative: float
    msre: Optional[float]
    runtime_per_sample: float

    def __post_init__(self):
        for name in ("relative", "msre", "runtime_per_sample"):
            v = getattr(self, name)
            if v is not None and not v >= 0:
                raise ValueError(f"{name} must be non-negative")


def relative_error(computed, analytical):
    analytical = complex(analytical)
    if analytical == 0:
        raise ZeroReference("relative error undefined for a zero reference")
    return abs(complex(computed) - analytical) / abs(analytical)


def msre(computed, analytical, zero_ref=ZERO_REF):
    """Mean squared relative error; plain squared difference where |ref| <= zero_ref."""
    c = np.asarray(computed, dtype=complex).ravel()
    r = np.asarray(analytical, dtype=complex).ravel()
    if c.size != r.size:
        raise LengthMismatch(f"{c.size} computed values vs {r.size} references")
    if c.size == 0:
        raise LengthMismatch("empty input")
    d = np.abs(c - r)
    zero = np.abs(r) <= zero_ref
    # ratio before squaring so tiny references do not underflow to 0
    terms = np.where(zero, d, d / np.where(zero, 1.0, np.abs(r))) ** 2
    return float(np.mean(terms))


def max_relative_error(computed, analytical, zero_ref=ZERO_REF):
    """Largest pointwise relative error, absolute error where |ref| <= zero_ref."""
    c = np.asarray(computed, dtype=complex).ravel()
    r = np.asarray(analytical, dtype=complex).ravel()
    if c.size != r.size:
        raise LengthMismatch(f"{c.size} computed values vs {r.size} references")
    d = np.abs(c - r)
    zero = np.abs(r) <= zero_ref
    return float(np.max(np.where(zero, d, d / np.where(zero, 1.0, np.abs(r)))))


def continuous_energy(values, xi_grid, source="a"):
    """Energy carried by the continuous spectrum.

    ``source="a"``: -(1/pi) int log|a|^2; ``source="r"``: (1/pi) int log(1 + |r|^2).
    Trapezoidal rule on the given real grid.
    """
    v = np.asarray(values, dtype=complex).ravel()
    x = np.asarray(xi_grid, dtype=float).ravel()
    if v.size != x.size:
        raise LengthMismatch(f"{v.size} values vs {x.size} grid points")
    if not (np.all(np.isfinite(v)) and np.all(np.isfinite(x))):
        raise NonFiniteInput("values and grid must be finite")
    if source == "a":
        if np.any(v == 0):
            raise NonFiniteInput("log|a| undefined where a = 0")
        integrand = -np.log(np.abs(v) ** 2)
    elif source == "r":
        integrand = np.log1p(np.abs(v) ** 2)
    else:
        raise ValueError("source must be 'a' or 'r'")
    return float(_trapezoid(integrand, x) / math.pi)


def energy_grid(lo=-20.0, hi=20.0, n=1024):
    return np.linspace(lo, hi, n)


def imag_bound_from_energy(pot: SampledPotential):
    """Advisory upper bound on max Im(xi_j): half the signal energy.

    Each eigenvalue carries 4 Im(xi_j) of the total energy int |q|^2, so
    Im(xi_j) <= E/4 <= E/2; the looser half-energy is returned.
    """
    return 0.5 * pot.energy()


def timed(fn, *args, repeats=3, **kwargs):
    """Run ``fn`` ``repeats`` times; return (last result, median wall time in seconds)."""
    times = []
    result = None
    for _ in range(max(1, repeats)):
        t0 = time.perf_counter()
        result = fn(*args, **kwargs)
        times.append(time.perf_counter() - t0)
    return result, statistics.median(times)
