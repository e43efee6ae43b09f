"""Scattering coefficients a(xi), b(xi) and a'(xi) of a sampled potential.

Six propagation schemes are available. ``BO``, ``AL`` and ``CN`` act on the raw
Zakharov-Shabat system, ``BOMOD``, ``ALMOD`` and ``RK4`` on the envelope system
in which the fast ``exp(-+ i xi t)`` oscillation is factored out.

All transfer-matrix schemes also propagate d/dxi of the state, so a'(xi) comes
out of the same sweep. RK4 has no transfer matrix and no derivative.
"""

from __future__ import annotations

import enum
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import _kernels as K
from .discretize import SampledPotential
from .errors import DerivativeUnsupported, NumericalOverflow

OVERFLOW_CAP = 1e150


class Scheme(str, enum.Enum):
    BO = "bo"
    BOMOD = "bomod"
    AL = "al"
    ALMOD = "almod"
    CN = "cn"
    RK4 = "rk4"

    @property
    def code(self):
        return _CODES[self]

    @property
    def envelope(self):
        return self in (Scheme.BOMOD, Scheme.ALMOD, Scheme.RK4)

    @property
    def has_derivative(self):
        return self is not Scheme.RK4


_CODES = {Scheme.BO: K.BO, Scheme.BOMOD: K.BOMOD, Scheme.AL: K.AL,
          Scheme.ALMOD: K.ALMOD, Scheme.CN: K.CN, Scheme.RK4: K.RK4}

TRANSFER_SCHEMES = (Scheme.BO, Scheme.BOMOD, Scheme.AL, Scheme.ALMOD, Scheme.CN)


@dataclass(frozen=True)
class ScatteringResult:
    a: complex
    b: complex
    a_prime: Optional[complex]
    scheme: Scheme
    xi: complex

    @property
    def r(self):
        return self.b / self.a


@dataclass(frozen=True)
class TransferStep:
    T: np.ndarray
    T_prime: Optional[np.ndarray] = None


def transfer_matrix(scheme, q_m, q_next, xi, dt, t_m=0.0, want_derivative=False) -> TransferStep:
    """Single-cell transfer matrix for ``scheme``.

    ``q_next`` is only read by CN, ``t_m`` only by the envelope schemes (the
    phase ``exp(+-2i xi t)`` is frozen at the cell midpoint).
    """
    scheme = Scheme(scheme)
    if scheme is Scheme.RK4:
        raise DerivativeUnsupported("RK4 has no transfer matrix")
    t, d = K.step_matrix(scheme.code, complex(q_m), complex(q_next), complex(xi),
                         float(dt), float(t_m))
    T = np.array(t, dtype=complex).reshape(2, 2)
    Tp = np.array(d, dtype=complex).reshape(2, 2) if want_derivative else None
    return TransferStep(T, Tp)


def _edge_values(q):
    """4th-order interpolation of midpoint samples to cell edges (zero padded)."""
    p = np.concatenate([np.zeros(2, complex), q, np.zeros(2, complex)])
    # edge j sits between cells j-1 and j
    return (-p[0:-3] + 9.0 * p[1:-2] + 9.0 * p[2:-1] - p[3:]) / 16.0


def _raise_bad(status, xis):
    bad = np.flatnonzero(status)
    if bad.size:
        j = int(bad[0])
        kind = "exceeded the magnitude cap" if status[j] == K.OVERFLOW else "became non-finite"
        raise NumericalOverflow(f"state {kind} at xi={xis[j]} (grid index {j})", index=j)


def scatter_arrays(pot: SampledPotential, xis, scheme, want_derivative=False,
                   cap=OVERFLOW_CAP, check=True):
    """Vectorized core: returns ``(a, b, a_prime, status)`` arrays.

    ``a_prime`` is None when not requested. With ``check`` set, the first
    flagged grid point raises :class:`NumericalOverflow`.
    """
    scheme = Scheme(scheme)
    xis = np.atleast_1d(np.asarray(xis, dtype=complex)).ravel()
    q = np.ascontiguousarray(pot.samples)
    a = np.empty(xis.size, complex)
    b = np.empty(xis.size, complex)
    status = np.zeros(xis.size, np.int64)
    if scheme is Scheme.RK4:
        if want_derivative:
            raise DerivativeUnsupported("RK4 does not propagate a'(xi)")
        edges = _edge_values(q)
        K.propagate_rk4(edges[:-1], q, edges[1:], pot.dt, pot.half_width, xis, cap, a, b, status)
        ap = None
    else:
        ap = np.empty(xis.size, complex)
        K.propagate(scheme.code, q, pot.dt, pot.half_width, xis, bool(want_derivative),
                    cap, a, b, ap, status)
        if not want_derivative:
            ap = None
    if check:
        _raise_bad(status, xis)
    return a, b, ap, status


def scatter(pot: SampledPotential, xi, scheme=Scheme.BO, want_derivative=False,
            cap=OVERFLOW_CAP) -> ScatteringResult:
    """Scattering data at a single spectral point."""
    scheme = Scheme(scheme)
    a, b, ap, _ = scatter_arrays(pot, [xi], scheme, want_derivative, cap)
    return ScatteringResult(complex(a[0]), complex(b[0]),
                            None if ap is None else complex(ap[0]), scheme, complex(xi))


def scatter_rk4(pot: SampledPotential, xi, cap=OVERFLOW_CAP) -> ScatteringResult:
    return scatter(pot, xi, Scheme.RK4, False, cap)


def worker_count():
    env = os.environ.get("ZSNFT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def continuous_spectrum(pot: SampledPotential, xi_grid, scheme=Scheme.BO,
                        want_derivative=False, threads=None):
    """Scatter at every grid point, in input order.

    Chunks of the grid run on a thread pool (the kernels release the GIL);
    results are reassembled in order, so output never depends on timing.
    """
    scheme = Scheme(scheme)
    xs = np.asarray(xi_grid, dtype=complex).ravel()
    threads = threads or worker_count()
    chunks = np.array_split(np.arange(xs.size), max(1, min(threads, xs.size)))
    a = np.empty(xs.size, complex)
    b = np.empty(xs.size, complex)
    ap = np.empty(xs.size, complex) if want_derivative else None

    def run(idx):
        return idx, scatter_arrays(pot, xs[idx], scheme, want_derivative, check=False)

    status = np.zeros(xs.size, np.int64)
    if len(chunks) == 1:
        results = [run(chunks[0])]
    else:
        with ThreadPoolExecutor(len(chunks)) as ex:
            results = list(ex.map(run, chunks))
    for idx, (ca, cb, cap_, cs) in results:
        a[idx], b[idx], status[idx] = ca, cb, cs
        if want_derivative:
            ap[idx] = cap_
    _raise_bad(status, xs)
    return [ScatteringResult(complex(a[j]), complex(b[j]),
                             None if ap is None else complex(ap[j]), scheme, complex(xs[j]))
            for j in range(xs.size)]


class CoefficientA:
    """a(xi) of a fixed potential/scheme as a callable, with a'(xi) on demand.

    The last evaluation is cached so a root finder asking for ``f`` and ``f'``
    at the same point pays for one sweep.
    """

    def __init__(self, pot: SampledPotential, scheme=Scheme.BO, cap=OVERFLOW_CAP):
        self.pot = pot
        self.scheme = Scheme(scheme)
        self.cap = cap
        self._last = None
        self.evaluations = 0

    def _eval(self, xi):
        xi = complex(xi)
        if self._last is not None and self._last[0] == xi:
            return self._last[1], self._last[2]
        self.evaluations += 1
        a, _, ap, _ = scatter_arrays(self.pot, [xi], self.scheme,
                                     self.scheme.has_derivative, self.cap)
        val = (complex(a[0]), None if ap is None else complex(ap[0]))
        self._last = (xi, val[0], val[1])
        return val

    def __call__(self, xi):
        return self._eval(xi)[0]

    def derivative(self, xi):
        if not self.scheme.has_derivative:
            raise DerivativeUnsupported(f"{self.scheme.value} does not propagate a'(xi)")
        return self._eval(xi)[1]

    def many(self, xis, want_derivative=False):
        a, _, ap, _ = scatter_arrays(self.pot, xis, self.scheme, want_derivative, self.cap)
        return a, ap
