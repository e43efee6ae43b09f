"""Norming constants c_j = Res_{xi_j} r(xi) of the discrete spectrum.

Three routes:

* ``ContourResidue``   -- (1/2 pi i) times the integral of r = b/a around a small circle
* ``Fraction``         -- b(xi_j) / a'(xi_j) from one forward sweep
* ``Bidirectional``    -- b_j from left and right waves meeting at t = 0, then b_j / a'(xi_j)

The first two use b(xi) continued off the real axis, which grows like
exp(2 Im(xi) L) and ruins the result for large eigenvalues. The bidirectional
route never propagates further than half the window from either edge.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels as K
from .discretize import SampledPotential
from .errors import (DerivativeUnsupported, InvalidGrid, NotAnEigenvalue,
                     ZSNFTError)
from .hybrid import HybridConfig, hybrid_eigenvalues
from .zss import Scheme, scatter, scatter_arrays

MIN_RESIDUE_POINTS = 8
MAX_RADIUS = 0.2
CONSISTENCY = 0.1


class NormingKind(str, enum.Enum):
    CONTOUR = "contour"
    FRACTION = "fraction"
    BIDIRECTIONAL = "bidirectional"


@dataclass(frozen=True)
class NormingMethod:
    kind: NormingKind = NormingKind.BIDIRECTIONAL
    n_points: int = 64

    def __post_init__(self):
        object.__setattr__(self, "kind", NormingKind(self.kind))
        if self.kind is NormingKind.CONTOUR and self.n_points < MIN_RESIDUE_POINTS:
            raise ValueError(f"contour residue needs at least {MIN_RESIDUE_POINTS} points")


@dataclass(frozen=True)
class SpectrumEntry:
    xi: complex
    c: Optional[complex]
    b: Optional[complex] = None
    refined: bool = True
    error: Optional[str] = None


@dataclass(frozen=True)
class DiscreteSpectrum:
    entries: list = field(default_factory=list)

    def __post_init__(self):
        if any(e.xi.imag <= 0 for e in self.entries):
            raise ValueError("eigenvalues must lie in the upper half-plane")
        object.__setattr__(self, "entries",
                           sorted(self.entries, key=lambda e: (-e.xi.imag, e.xi.real)))

    def __len__(self):
        return len(self.entries)

    @property
    def eigenvalues(self):
        return [e.xi for e in self.entries]

    @property
    def norming_constants(self):
        return [e.c for e in self.entries]


def default_radius(xi_j, others=()):
    """Half the distance to the nearest other eigenvalue or the real axis, at most 0.2."""
    d = xi_j.imag
    for z in others:
        if z != xi_j:
            d = min(d, abs(z - xi_j))
    return min(0.5 * d, MAX_RADIUS)


def residue_contour(pot: SampledPotential, xi_j, scheme=Scheme.BO, n_points=64, radius=None,
                    others=()):
    """Trapezoidal rule for (1/2 pi i) times the integral of b/a on a circle around ``xi_j``."""
    xi_j = complex(xi_j)
    if n_points < MIN_RESIDUE_POINTS:
        raise ValueError(f"n_points must be at least {MIN_RESIDUE_POINTS}")
    rho = default_radius(xi_j, others) if radius is None else float(radius)
    if not 0 < rho < xi_j.imag:
        raise ValueError("radius must be positive and keep the circle off the real axis")
    w = np.exp(2j * math.pi * np.arange(n_points) / n_points)
    nodes = xi_j + rho * w
    a, b, _, _ = scatter_arrays(pot, nodes, scheme)
    # dz = i rho w dtheta; (1/2 pi i) * sum(r * i rho w) * 2 pi / N
    return complex(np.sum(b / a * rho * w) / n_points)


def residue_fraction(pot: SampledPotential, xi_j, scheme=Scheme.BO):
    scheme = Scheme(scheme)
    if not scheme.has_derivative:
        raise DerivativeUnsupported(f"{scheme.value} does not propagate a'(xi)")
    res = scatter(pot, xi_j, scheme, want_derivative=True)
    return res.b / res.a_prime


def bidirectional_ratios(pot: SampledPotential, xi_j, scheme=Scheme.BO):
    """Left wave G and right wave H at t = 0, as (G1, G2, H1, H2)."""
    scheme = Scheme(scheme)
    if scheme not in (Scheme.BO, Scheme.AL):
        raise ValueError("bidirectional propagation is available for BO and AL only")
    if pot.n % 2:
        raise InvalidGrid("bidirectional propagation needs an even number of samples")
    return K.bidirectional(scheme.code, np.ascontiguousarray(pot.samples), pot.dt,
                           pot.half_width, complex(xi_j))


def bidirectional_b(pot: SampledPotential, xi_j, scheme=Scheme.BO, tol=CONSISTENCY):
    """b_j with G(0) = -b_j H(0), from the better conditioned component.

    The minus sign keeps b_j in the same convention as b(xi) from
    :mod:`zsnft.zss`. The other component ratio is the consistency check; a
    relative mismatch above ``tol`` means ``xi_j`` is not an eigenvalue.
    """
    g1, g2, h1, h2 = bidirectional_ratios(pot, xi_j, scheme)
    vals = (g1, g2, h1, h2)
    if not all(cmath.isfinite(v) for v in vals):
        raise NotAnEigenvalue(f"waves are not finite at xi={xi_j}")
    if h1 == 0 or h2 == 0:
        raise NotAnEigenvalue(f"right wave has a vanishing component at xi={xi_j}")
    r1, r2 = g1 / h1, g2 / h2
    best, other = (r1, r2) if abs(h1) >= abs(h2) else (r2, r1)
    if best == 0 or abs(best - other) > tol * abs(best):
        raise NotAnEigenvalue(f"G and H are not proportional at xi={xi_j} "
                              f"(ratios {r1:.6g}, {r2:.6g})")
    return -best


def bidirectional_mismatch(pot: SampledPotential, xi_j, scheme=Scheme.BO):
    """|G1/H1 - G2/H2| / |b_j|, the component consistency of the two waves."""
    g1, g2, h1, h2 = bidirectional_ratios(pot, xi_j, scheme)
    r1, r2 = g1 / h1, g2 / h2
    best = r1 if abs(h1) >= abs(h2) else r2
    return abs(r1 - r2) / abs(best)


def residue_bidirectional(pot: SampledPotential, xi_j, scheme=Scheme.BO):
    b = bidirectional_b(pot, xi_j, scheme)
    ap = scatter(pot, xi_j, scheme, want_derivative=True).a_prime
    return b / ap, b


def norming_constant(pot, xi_j, method: NormingMethod, scheme=Scheme.BO, others=()):
    """Return (c_j, b_j); b_j is None except for the bidirectional route."""
    if method.kind is NormingKind.CONTOUR:
        return residue_contour(pot, xi_j, scheme, method.n_points, others=others), None
    if method.kind is NormingKind.FRACTION:
        return residue_fraction(pot, xi_j, scheme), None
    return residue_bidirectional(pot, xi_j, scheme)


def full_discrete_spectrum(pot: SampledPotential, scheme=Scheme.BO,
                           hybrid_cfg: Optional[HybridConfig] = None,
                           norming: NormingMethod = NormingMethod()) -> DiscreteSpectrum:
    """Eigenvalues from the hybrid method, then a norming constant for each.

    A failed norming computation is recorded on its entry and does not stop
    the others.
    """
    cfg = hybrid_cfg or HybridConfig(scheme=scheme)
    eigs = [e for e in hybrid_eigenvalues(pot, cfg) if e.xi.imag > 0]
    xis = [e.xi for e in eigs]
    entries = []
    for e in eigs:
        try:
            c, b = norming_constant(pot, e.xi, norming, cfg.scheme, xis)
            entries.append(SpectrumEntry(e.xi, c, b, e.refined))
        except (ZSNFTError, ArithmeticError, ValueError) as exc:
            entries.append(SpectrumEntry(e.xi, None, None, e.refined, f"{type(exc).__name__}: {exc}"))
    return DiscreteSpectrum(entries)


# soliton parameters from (xi_j, c_j)

def soliton_amplitude(xi_j):
    return 2.0 * complex(xi_j).imag


def soliton_frequency(xi_j):
    return -2.0 * complex(xi_j).real


def soliton_center(xi_j, c_j):
    eta = complex(xi_j).imag
    return -math.log(abs(c_j) / (2.0 * eta)) / (2.0 * eta)


def soliton_phase(c_j):
    return -cmath.phase(1j * complex(c_j))
