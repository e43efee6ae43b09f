"""Eigenvalues by coarse contour integration followed by iterative refinement.

The contour stage finds every zero inside the contour, only roughly; each rough
zero then seeds a root finder on a(xi). A zero whose refinement fails keeps its
coarse value, so nothing found by the contour stage is ever dropped.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .contour import Contour, MomentMode, Rectangle, dl_locate
from .discretize import SampledPotential
from .rootfind import Method, Region, RootConfig, find_root
from .zss import CoefficientA, Scheme

COARSE_POINTS = 400
MERGE_COARSE = 1e-3
MERGE_REFINED = 1e-6


def default_contour(n_points=COARSE_POINTS):
    return Contour(Rectangle(-1.0, 1.0, 0.1, 5.0), n_points)


@dataclass(frozen=True)
class HybridConfig:
    """``refine.roi`` falls back to the contour's bounding box grown by 10%."""

    contour: Contour = field(default_factory=default_contour)
    coarse_mode: MomentMode = MomentMode.DL
    refine: RootConfig = RootConfig(Method.NEWTON)
    scheme: Scheme = Scheme.BO

    def __post_init__(self):
        object.__setattr__(self, "coarse_mode", MomentMode(self.coarse_mode))
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.refine.roi is None:
            box = Region(*self.contour.shape.bounding_box()).inflate(0.1)
            object.__setattr__(self, "refine", replace(self.refine, roi=box))


@dataclass(frozen=True)
class Eigenvalue:
    xi: complex
    refined: bool
    coarse: complex


def _merge(zs, tol):
    out = []
    for z in zs:
        if all(abs(z - w) >= tol for w in out):
            out.append(z)
    return out


def hybrid_eigenvalues(pot: SampledPotential, cfg: Optional[HybridConfig] = None,
                       a_func: Optional[CoefficientA] = None):
    """Eigenvalues of ``pot`` inside ``cfg.contour``, sorted by descending Im.

    Returns a list of :class:`Eigenvalue`. ``refined`` is False where the root
    finder failed, made |a| larger, or collapsed onto an already refined zero.
    """
    cfg = cfg or HybridConfig()
    a = a_func or CoefficientA(pot, cfg.scheme)
    use_d = cfg.scheme.has_derivative
    fprime = a.derivative if use_d else None
    if cfg.coarse_mode is MomentMode.DL and not use_d:
        raise ValueError(f"DL coarse stage needs a'(xi); use aDL with {cfg.scheme.value}")
    coarse = _merge(dl_locate(a, fprime, cfg.contour, cfg.coarse_mode), MERGE_COARSE)

    results = []
    for z0 in coarse:
        out = find_root(a, fprime, z0, cfg.refine)
        ok = out.converged and abs(a(out.root)) <= abs(a(z0))
        results.append(Eigenvalue(out.root if ok else z0, ok, z0))

    # two refinements landing on the same zero: the one that moved less keeps it
    order = sorted(range(len(results)), key=lambda i: abs(results[i].xi - results[i].coarse))
    kept = []
    for i in order:
        e = results[i]
        if e.refined and any(k.refined and abs(k.xi - e.xi) < MERGE_REFINED for k in kept):
            e = Eigenvalue(e.coarse, False, e.coarse)
        kept.append(e)
    return sorted(kept, key=lambda e: (-e.xi.imag, e.xi.real))
