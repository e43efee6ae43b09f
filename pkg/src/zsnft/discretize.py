"""Truncation and midpoint sampling of potentials on [-L, L]."""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import InvalidGrid
from .profiles import ProfileSpec, evaluate_q


@dataclass(frozen=True)
class SampledPotential:
    """Piecewise-constant potential: ``samples[m]`` holds on the m-th cell.

    The cells split ``[-L, L]`` into ``n`` equal pieces of width ``dt = 2L/n``;
    the potential is zero outside. Samples are stored as a read-only array.
    """

    samples: np.ndarray
    half_width: float
    dt: float = field(init=False)

    def __post_init__(self):
        q = np.array(self.samples, dtype=complex)
        if q.ndim != 1 or q.size < 2:
            raise InvalidGrid("need at least two samples")
        if not self.half_width > 0:
            raise InvalidGrid("half_width must be positive")
        q.setflags(write=False)
        object.__setattr__(self, "samples", q)
        object.__setattr__(self, "dt", 2.0 * self.half_width / q.size)

    @property
    def n(self):
        return self.samples.size

    @property
    def t(self):
        """Cell midpoints t_m = -L + (m - 1/2) dt."""
        return -self.half_width + (np.arange(self.n) + 0.5) * self.dt

    def l1_norm(self):
        return float(np.sum(np.abs(self.samples)) * self.dt)

    def energy(self):
        return float(np.sum(np.abs(self.samples) ** 2) * self.dt)


def midpoints(L, n):
    dt = 2.0 * L / n
    return -L + (np.arange(n) + 0.5) * dt


def sample(spec: ProfileSpec, L=None, n=1024) -> SampledPotential:
    """Sample ``spec`` at the ``n`` cell midpoints of ``[-L, L]``.

    ``L`` defaults to the profile's own half-width.
    """
    if L is None:
        L = spec.half_width
    if n < 2 or not L > 0:
        raise InvalidGrid(f"invalid grid: L={L}, n={n}")
    return SampledPotential(evaluate_q(spec, midpoints(L, n)), L)


def zero_potential(L=1.0, n=16) -> SampledPotential:
    return SampledPotential(np.zeros(n, dtype=complex), L)


def write_csv(pot: SampledPotential, path):
    """Write columns ``t, re_q, im_q``; floats use 17 significant digits."""
    with open(Path(path), "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["t", "re_q", "im_q"])
        for t, q in zip(pot.t, pot.samples):
            w.writerow([f"{t:.17g}", f"{q.real:.17g}", f"{q.imag:.17g}"])


def read_csv(path) -> SampledPotential:
    """Read a potential written by :func:`write_csv`.

    The grid must be uniform midpoints; ``L`` is recovered from the spacing.
    """
    with open(Path(path), newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
    if len(rows) < 2:
        raise InvalidGrid("need at least two samples")
    t = np.array([float(r["t"]) for r in rows])
    q = np.array([complex(float(r["re_q"]), float(r["im_q"])) for r in rows])
    dt = np.diff(t)
    if not np.allclose(dt, dt[0], rtol=1e-9, atol=1e-12) or dt[0] <= 0:
        raise InvalidGrid("time grid is not uniform and increasing")
    L = 0.5 * dt.mean() * t.size
    if not np.isclose(t[0], -L + 0.5 * dt.mean(), atol=1e-9 * max(1.0, L)):
        raise InvalidGrid("time grid is not centred midpoints of [-L, L]")
    return SampledPotential(q, L)
