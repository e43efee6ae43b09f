"""Zeros of analytic functions inside a closed contour.

Pipeline: count zeros (argument principle), compute power sums of the zeros
from contour moments, turn the power sums into polynomial coefficients with
Newton's identities, and root the polynomial with Aberth-Ehrlich iteration.
"""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import AmbiguousCount, NoConvergence, NumericalFailure, ZSNFTError


class CountMode(str, enum.Enum):
    LOG_DERIVATIVE = "logderiv"
    PHASE_INCREMENT = "phase"
    APPROXIMATED = "approx"


class MomentMode(str, enum.Enum):
    DL = "dl"
    ADL = "adl"


@dataclass(frozen=True)
class Rectangle:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_max > self.re_min and self.im_max > self.im_min):
            raise ValueError("degenerate rectangle")

    def corners(self):
        return [complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max)]

    def bounding_box(self):
        return self.re_min, self.re_max, self.im_min, self.im_max


@dataclass(frozen=True)
class AnnularSector:
    """Region rho_min <= |z| <= rho_max, theta_min <= arg z <= theta_max."""

    rho_min: float
    rho_max: float
    theta_min: float
    theta_max: float

    def __post_init__(self):
        if not (0 <= self.rho_min < self.rho_max and self.theta_min < self.theta_max):
            raise ValueError("degenerate annular sector")
        if self.theta_max - self.theta_min > 2 * math.pi:
            raise ValueError("sector wider than a full turn")

    def bounding_box(self):
        th = np.linspace(self.theta_min, self.theta_max, 721)
        z = np.concatenate([self.rho_max * np.exp(1j * th), self.rho_min * np.exp(1j * th)])
        return float(z.real.min()), float(z.real.max()), float(z.imag.min()), float(z.imag.max())


Shape = Union[Rectangle, AnnularSector]


@dataclass(frozen=True)
class Contour:
    shape: Shape
    n_points: int = 1600

    def __post_init__(self):
        if self.n_points < 16:
            raise ValueError("n_points must be at least 16")

    def with_points(self, n_points):
        return Contour(self.shape, n_points)

    def nodes(self):
        """Counter-clockwise quadrature nodes and weights dz.

        Each side gets a share of ``n_points`` proportional to its length;
        nodes sit at sub-segment midpoints so no node lands on a corner.
        """
        segments = _segments(self.shape)
        lengths = np.array([s[2] for s in segments])
        share = np.maximum(1, np.round(self.n_points * lengths / lengths.sum()).astype(int))
        zs, ws = [], []
        for (param, deriv, _), m in zip(segments, share):
            u = (np.arange(m) + 0.5) / m
            zs.append(param(u))
            ws.append(deriv(u) / m)
        return np.concatenate(zs), np.concatenate(ws)

    def contains(self, z):
        s = self.shape
        if isinstance(s, Rectangle):
            return s.re_min < z.real < s.re_max and s.im_min < z.imag < s.im_max
        r, th = abs(z), cmath.phase(z)
        if not s.rho_min < r < s.rho_max:
            return False
        # compare angles modulo 2 pi
        rel = (th - s.theta_min) % (2 * math.pi)
        return 0 < rel < s.theta_max - s.theta_min


@dataclass(frozen=True)
class MomentSet:
    s: np.ndarray

    @property
    def count(self):
        return self.s.size


def _segments(shape):
    """List of (z(u), z'(u), length) for u in [0, 1], counter-clockwise."""
    if isinstance(shape, Rectangle):
        c = shape.corners()
        out = []
        for a, b in zip(c, c[1:] + c[:1]):
            out.append((lambda u, a=a, b=b: a + (b - a) * u,
                        lambda u, a=a, b=b: np.full(np.shape(u), b - a),
                        abs(b - a)))
        return out
    r0, r1, t0, t1 = shape.rho_min, shape.rho_max, shape.theta_min, shape.theta_max
    dth = t1 - t0
    out = [
        (lambda u: (r0 + (r1 - r0) * u) * np.exp(1j * t0),
         lambda u: np.full(np.shape(u), (r1 - r0) * np.exp(1j * t0)), r1 - r0),
        (lambda u: r1 * np.exp(1j * (t0 + dth * u)),
         lambda u: 1j * dth * r1 * np.exp(1j * (t0 + dth * u)), r1 * dth),
        (lambda u: (r1 - (r1 - r0) * u) * np.exp(1j * t1),
         lambda u: np.full(np.shape(u), -(r1 - r0) * np.exp(1j * t1)), r1 - r0),
    ]
    if r0 > 0:
        out.append((lambda u: r0 * np.exp(1j * (t1 - dth * u)),
                    lambda u: -1j * dth * r0 * np.exp(1j * (t1 - dth * u)), r0 * dth))
    return out


def _values(fn, zs, what):
    if fn is None:
        raise ValueError(f"{what} is required in this mode")
    out = np.empty(zs.size, complex)
    for k, z in enumerate(zs):
        try:
            out[k] = fn(complex(z))
        except ZSNFTError as exc:
            raise type(exc)(f"{what} failed at contour node {k} (z={z}): {exc}") from exc
        if not cmath.isfinite(out[k]):
            raise NumericalFailure(f"{what} is not finite at contour node {k} (z={z})")
    if what == "f" and np.any(out == 0):
        k = int(np.flatnonzero(out == 0)[0])
        raise NumericalFailure(f"f vanishes on the contour at node {k} (z={zs[k]})")
    return out


@dataclass
class PathSamples:
    """f (and optionally f') sampled once along a contour, reused by all moments."""

    z: np.ndarray
    dz: np.ndarray
    f: np.ndarray
    fp: Optional[np.ndarray]

    @classmethod
    def evaluate(cls, f, f_prime, contour: Contour, need_derivative):
        z, dz = contour.nodes()
        fv = _values(f, z, "f")
        fpv = _values(f_prime, z, "f'") if need_derivative else None
        return cls(z, dz, fv, fpv)


def _raw_count(ps: PathSamples, mode):
    if mode is CountMode.LOG_DERIVATIVE:
        return (np.sum(ps.fp / ps.f * ps.dz) / (2j * math.pi)).real
    if mode is CountMode.PHASE_INCREMENT:
        ratio = ps.f / np.roll(ps.f, 1)
        return float(np.sum(np.angle(ratio)) / (2 * math.pi))
    return (np.sum(1.0 - np.roll(ps.f, 1) / ps.f) / (2j * math.pi)).real


def count_zeros(f, f_prime, contour: Contour, mode=CountMode.LOG_DERIVATIVE, _samples=None):
    """Number of zeros inside ``contour``; returns ``(n, raw)``.

    If the raw value sits more than 0.4 from an integer, the node count is
    doubled once before giving up with :class:`AmbiguousCount`.
    """
    mode = CountMode(mode)
    need_d = mode is CountMode.LOG_DERIVATIVE
    ps = _samples or PathSamples.evaluate(f, f_prime, contour, need_d)
    raw = _raw_count(ps, mode)
    if abs(raw - round(raw)) > 0.4:
        ps = PathSamples.evaluate(f, f_prime, contour.with_points(2 * contour.n_points), need_d)
        raw = _raw_count(ps, mode)
        if abs(raw - round(raw)) > 0.4:
            raise AmbiguousCount(raw)
    return int(round(raw)), float(raw)


def moments(f, f_prime, contour: Contour, N, mode=MomentMode.DL, _samples=None) -> MomentSet:
    """Power sums s_p = sum z_i^p, p = 1..N, of the zeros inside ``contour``.

    ``DL`` integrates z^p f'/f; ``aDL`` replaces f' dz/f by the discrete
    difference 1 - f(z_{k-1})/f(z_k).
    """
    mode = MomentMode(mode)
    if N < 0:
        raise ValueError("N must be non-negative")
    ps = _samples or PathSamples.evaluate(f, f_prime, contour, mode is MomentMode.DL)
    if mode is MomentMode.DL:
        kernel = ps.fp / ps.f * ps.dz
    else:
        kernel = 1.0 - np.roll(ps.f, 1) / ps.f
    s = np.empty(N, complex)
    zp = np.ones_like(ps.z)
    for p in range(N):
        zp = zp * ps.z
        s[p] = np.sum(zp * kernel) / (2j * math.pi)
    return MomentSet(s)


def newton_identities(s) -> np.ndarray:
    """Coefficients sigma_1..sigma_N of z^N + sigma_1 z^{N-1} + ... + sigma_N from power sums."""
    s = np.asarray(s.s if isinstance(s, MomentSet) else s, dtype=complex)
    N = s.size
    sigma = np.zeros(N, complex)
    for p in range(1, N + 1):
        acc = s[p - 1]
        for j in range(1, p):
            acc += sigma[p - j - 1] * s[j - 1]
        sigma[p - 1] = -acc / p
    return sigma


def _horner(coef, z):
    # coef: monic, highest power first; returns p(z), p'(z)
    p = coef[0]
    dp = 0j
    for c in coef[1:]:
        dp = dp * z + p
        p = p * z + c
    return p, dp


def polynomial_roots(sigma, tol=1e-12, max_sweeps=200):
    """All roots of z^N + sigma_1 z^{N-1} + ... + sigma_N by Aberth-Ehrlich iteration."""
    sigma = np.asarray(sigma, dtype=complex)
    N = sigma.size
    if N < 1:
        raise ValueError("polynomial degree must be at least 1")
    coef = np.concatenate([[1.0 + 0j], sigma])
    if N == 1:
        return [complex(-sigma[0])]
    radius = 1.0 + max(abs(sigma[p]) ** (1.0 / (p + 1)) for p in range(N))
    # offset angle avoids symmetric starts stalling on symmetric root sets
    z = radius * np.exp(1j * (2 * math.pi * np.arange(N) / N + 0.4))
    scale = max(1.0, radius)
    for _ in range(max_sweeps):
        biggest = 0.0
        for i in range(N):
            p, dp = _horner(coef, z[i])
            if p == 0:
                continue
            ratio = p / dp if dp != 0 else p
            rep = sum(1.0 / (z[i] - z[j]) for j in range(N) if j != i and z[i] != z[j])
            den = 1.0 - ratio * rep
            w = ratio / den if den != 0 else ratio
            z[i] -= w
            biggest = max(biggest, abs(w))
        if biggest < tol * scale:
            break
    else:
        raise NoConvergence(f"Aberth iteration did not converge in {max_sweeps} sweeps")
    # Newton polish on the full polynomial
    for i in range(N):
        for _ in range(3):
            p, dp = _horner(coef, z[i])
            if dp == 0 or p == 0:
                break
            z[i] -= p / dp
    return [complex(x) for x in z]


def dl_locate(f, f_prime, contour: Contour, mode=MomentMode.DL):
    """Zeros inside ``contour``: count, moments, Newton identities, polynomial roots.

    Results are sorted by descending imaginary part, then real part.
    """
    mode = MomentMode(mode)
    if mode is MomentMode.DL:
        ps = PathSamples.evaluate(f, f_prime, contour, True)
        n, _ = count_zeros(f, f_prime, contour, CountMode.LOG_DERIVATIVE, _samples=ps)
    else:
        ps = PathSamples.evaluate(f, None, contour, False)
        n, _ = count_zeros(f, None, contour, CountMode.APPROXIMATED, _samples=ps)
    if n == 0:
        return []
    sigma = newton_identities(moments(f, f_prime, contour, n, mode, _samples=ps))
    return sort_zeros(polynomial_roots(sigma))


def sort_zeros(zs):
    return sorted(zs, key=lambda z: (-z.imag, z.real))
