"""Iterative complex root finders, deflation and the multi-zero search driver."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .errors import Incomplete, NumericalFailure, ZSNFTError


class Method(str, enum.Enum):
    NEWTON = "nr"
    SECANT = "secant"
    SIDI = "sidi"
    STEFFENSEN = "steffensen"
    MULLER = "muller"


class Status(str, enum.Enum):
    CONVERGED = "converged"
    MAX_ITER = "max_iter"
    LEFT_ROI = "left_roi"
    FAILURE = "numerical_failure"


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle in the complex plane."""

    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __contains__(self, z):
        return (self.re_min <= z.real <= self.re_max) and (self.im_min <= z.imag <= self.im_max)

    def inflate(self, frac):
        dr = 0.5 * frac * (self.re_max - self.re_min)
        di = 0.5 * frac * (self.im_max - self.im_min)
        return Region(self.re_min - dr, self.re_max + dr, self.im_min - di, self.im_max + di)

    def random_point(self, rng):
        return complex(rng.uniform(self.re_min, self.re_max), rng.uniform(self.im_min, self.im_max))


@dataclass(frozen=True)
class RootConfig:
    """Iteration settings.

    ``stop_on`` selects the convergence test: ``"step"`` uses |x_{k+1} - x_k|,
    ``"fvalue"`` uses |f_{k+1} - f_k|.
    """

    method: Method = Method.NEWTON
    tol_step: float = 1e-10
    max_iter: int = 1000
    roi: Optional[Region] = None
    stop_on: str = "step"
    max_outside: int = 10

    def __post_init__(self):
        object.__setattr__(self, "method", Method(self.method))
        if not self.tol_step > 0:
            raise ValueError("tol_step must be positive")
        if self.max_iter < 1:
            raise ValueError("max_iter must be at least 1")
        if self.stop_on not in ("step", "fvalue"):
            raise ValueError("stop_on must be 'step' or 'fvalue'")


@dataclass(frozen=True)
class RootOutcome:
    root: Optional[complex]
    iterations: int
    status: Status
    residual: Optional[float] = None
    history: tuple = ()

    @property
    def converged(self):
        return self.status is Status.CONVERGED


def divided_difference(xs, fs):
    """f[x_0, ..., x_m] by the recursive table."""
    table = list(fs)
    m = len(xs)
    for level in range(1, m):
        for i in range(m - level):
            den = xs[i + level] - xs[i]
            if den == 0:
                raise NumericalFailure("coincident points in divided difference")
            table[i] = (table[i + 1] - table[i]) / den
    return table[0]


class _Stop(Exception):
    def __init__(self, status):
        self.status = status


def _safe(f, x):
    try:
        v = complex(f(x))
    except (ZeroDivisionError, OverflowError, ZSNFTError) as exc:
        raise _Stop(Status.FAILURE) from exc
    if not (math.isfinite(v.real) and math.isfinite(v.imag)):
        raise _Stop(Status.FAILURE)
    return v


def _div(num, den):
    if den == 0 or not cmath.isfinite(den):
        raise _Stop(Status.FAILURE)
    return num / den


def _perturbed(guess):
    # three-point start for derivative-free methods
    return guess * (1 - 1e-3) - 1e-3, guess * (1 + 1e-3) + 1e-3


def _iterates(method, f, fprime, guess):
    """Yield successive iterates ``(x, f(x))``; the first is the guess itself."""
    x = complex(guess)
    fx = _safe(f, x)
    yield x, fx
    if method is Method.NEWTON:
        while True:
            x = x - _div(fx, _safe(fprime, x))
            fx = _safe(f, x)
            yield x, fx
    if method is Method.STEFFENSEN:
        while True:
            probe = x + fx
            x = x - _div(fx * fx, _safe(f, probe) - fx)
            fx = _safe(f, x)
            yield x, fx
    if method is Method.MULLER:
        x0, x1 = _perturbed(x)
        xs = [x0, x1, x]
        fs = [_safe(f, x0), _safe(f, x1), fx]
        while True:
            (xa, xb, xc), (fa, fb, fc) = xs, fs
            try:
                w = (divided_difference([xb, xc], [fb, fc]) + divided_difference([xa, xc], [fa, fc])
                     - divided_difference([xa, xb], [fa, fb]))
                g = divided_difference(xs, fs)
            except NumericalFailure:
                raise _Stop(Status.FAILURE)
            root = cmath.sqrt(w * w - 4 * fc * g)
            d = w + root if abs(w + root) >= abs(w - root) else w - root
            xn = xc - 2 * _div(fc, d)
            fn = _safe(f, xn)
            xs, fs = [xb, xc, xn], [fb, fc, fn]
            yield xn, fn
    # secant and Sidi share the secant start
    xp, _ = _perturbed(x)
    xs = [xp, x]
    fs = [_safe(f, xp), fx]
    order = 3 if method is Method.SIDI else 1
    while True:
        k = len(xs) - 1
        if method is Method.SECANT or len(xs) < order + 1:
            slope = _div(fs[-1] - fs[-2], xs[-1] - xs[-2])
        else:
            # derivative at x_k of the degree-j interpolant through the last j+1 points
            pts = xs[-(order + 1):][::-1]
            vals = fs[-(order + 1):][::-1]
            try:
                slope = divided_difference(pts[:2], vals[:2])
                prod = 1.0 + 0j
                for i in range(2, order + 1):
                    prod *= pts[0] - pts[i - 1]
                    slope += divided_difference(pts[:i + 1], vals[:i + 1]) * prod
            except NumericalFailure:
                raise _Stop(Status.FAILURE)
        xn = xs[k] - _div(fs[k], slope)
        fn = _safe(f, xn)
        xs = (xs + [xn])[-(order + 1):] if method is Method.SIDI else [xs[-1], xn]
        fs = (fs + [fn])[-(order + 1):] if method is Method.SIDI else [fs[-1], fn]
        yield xn, fn


def find_root(f: Callable, f_prime: Optional[Callable], guess, cfg: RootConfig = RootConfig(),
              keep_history=False) -> RootOutcome:
    """Run one iterative method from ``guess``.

    Stops when the step (or function change, see ``RootConfig.stop_on``) drops
    below ``tol_step``, after ``max_iter`` updates, or after ``max_outside``
    consecutive iterates outside ``roi``. A converged point outside ``roi``, or a
    numerical failure while the last iterate lies outside it, is reported as
    ``LEFT_ROI``.
    """
    method = Method(cfg.method)
    if method is Method.NEWTON and f_prime is None:
        raise ValueError("Newton-Raphson needs f_prime")
    hist = []
    outside = 0
    it = _iterates(method, f, f_prime, guess)
    k = 0
    x_prev = complex(guess)
    try:
        x_prev, f_prev = next(it)
        if keep_history:
            hist.append(x_prev)
        while k < cfg.max_iter:
            x, fx = next(it)
            k += 1
            if keep_history:
                hist.append(x)
            delta = abs(x - x_prev) if cfg.stop_on == "step" else abs(fx - f_prev)
            if cfg.roi is not None:
                outside = 0 if x in cfg.roi else outside + 1
            # an exact zero ends the iteration; the next step would divide 0/0
            if delta < cfg.tol_step or fx == 0:
                if cfg.roi is not None and x not in cfg.roi:
                    return RootOutcome(None, k, Status.LEFT_ROI, abs(fx), tuple(hist))
                return RootOutcome(x, k, Status.CONVERGED, abs(fx), tuple(hist))
            if cfg.roi is not None and outside >= cfg.max_outside:
                return RootOutcome(None, k, Status.LEFT_ROI, None, tuple(hist))
            x_prev, f_prev = x, fx
    except _Stop as stop:
        status = stop.status
        if cfg.roi is not None and x_prev not in cfg.roi:
            status = Status.LEFT_ROI
        return RootOutcome(None, k, status, None, tuple(hist))
    return RootOutcome(None, k, Status.MAX_ITER, None, tuple(hist))


def deflate(f: Callable, located) -> Callable:
    """x -> f(x) / prod(x - x_i)."""
    roots = [complex(r) for r in located]
    if not roots:
        return f

    def g(x):
        den = 1.0 + 0j
        for r in roots:
            den *= x - r
        return f(x) / den

    return g


def deflate_derivative(f: Callable, f_prime: Callable, located) -> Callable:
    """Derivative of :func:`deflate` output: g' = (f' - f * sum 1/(x - x_i)) / prod(x - x_i)."""
    roots = [complex(r) for r in located]
    if not roots:
        return f_prime

    def gp(x):
        den = 1.0 + 0j
        s = 0j
        for r in roots:
            den *= x - r
            s += 1.0 / (x - r)
        return (f_prime(x) - f(x) * s) / den

    return gp


def multi_root(f, f_prime, n_expected, roi: Region, cfg: RootConfig = RootConfig(),
               rng_seed=0, guess=None, attempts=3):
    """Locate ``n_expected`` zeros inside ``roi`` by iterate-and-deflate.

    Start from ``guess`` (default: ROI centre); after each success the zero is
    divided out, after each failure a fresh guess is drawn uniformly from the
    ROI. Each zero gets ``attempts`` tries. Raises :class:`Incomplete` with the
    partial list when the budget runs out.
    """
    if n_expected < 1:
        raise ValueError("n_expected must be at least 1")
    rng = np.random.default_rng(rng_seed)
    if guess is None:
        guess = complex(0.5 * (roi.re_min + roi.re_max), 0.5 * (roi.im_min + roi.im_max))
    cfg = replace(cfg, roi=cfg.roi or roi)
    found = []
    fc, fpc = f, f_prime
    x_c = complex(guess)
    tries = 0
    while len(found) < n_expected:
        out = find_root(fc, fpc, x_c, cfg)
        if out.converged and out.root in roi:
            found.append(out.root)
            tries = 0
            if len(found) == n_expected:
                break
            fc = deflate(f, found)
            fpc = None if f_prime is None else deflate_derivative(f, f_prime, found)
        else:
            tries += 1
            if tries >= attempts:
                raise Incomplete(found, n_expected)
        x_c = roi.random_point(rng)
    return found
