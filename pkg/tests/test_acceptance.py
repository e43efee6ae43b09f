"""End-to-end acceptance checks, one test per criterion.

Each test prints a ``criterion N PASS/FAIL`` line (collected again in the
terminal summary) before asserting, so a failing run still reports the
measured numbers.
"""

import math
import time
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from zsnft import cli
from zsnft import discretize as D
from zsnft import norming as N
from zsnft import profiles as P
from zsnft.contour import (Contour, CountMode, MomentMode, Rectangle, count_zeros, dl_locate,
                           newton_identities, polynomial_roots)
from zsnft.hybrid import HybridConfig, hybrid_eigenvalues
from zsnft.metrics import max_relative_error, msre
from zsnft.rootfind import Method, RootConfig, find_root
from zsnft.zss import CoefficientA, Scheme, scatter_arrays


def _residual(spec, xi):
    a = np.asarray(P.analytic_a(spec, xi))
    b = np.asarray(P.analytic_b(spec, xi))
    return float(np.max(np.abs(np.abs(a) ** 2 + np.abs(b) ** 2 - 1)))


def test_c01_oracle_unitarity(criterion):
    xi = np.linspace(-10, 10, 1000)
    worst = [0.0]
    t0 = time.perf_counter()
    for spec in (P.over(2.25), P.rect(np.pi / 2, 1.0), P.phased()):
        worst[0] = max(worst[0], _residual(spec, xi))
    elapsed = time.perf_counter() - t0

    @settings(max_examples=15, deadline=None)
    @given(st.sampled_from(["over", "rect"]), st.floats(0.0, 6.0), st.floats(0.2, 3.0),
           st.floats(-30, 30))
    def prop(kind, A, L, x0):
        spec = P.ProfileSpec(P.ProfileKind(kind), A, L)
        worst[0] = max(worst[0], _residual(spec, x0 + np.linspace(-5, 5, 1000)))

    prop()
    ok = worst[0] < 1e-10 and elapsed < 1.0
    criterion(1, "oracle unitarity", ok, f"max residual {worst[0]:.2e}, {elapsed:.2f} s")
    assert ok


def test_c02_bo_exact_on_rectangle(criterion):
    spec = P.rect(np.pi / 2, 1.0)
    pot = D.sample(spec, n=2 ** 10)
    xi = np.linspace(-10, 10, 401)
    t0 = time.perf_counter()
    a, b, _, _ = scatter_arrays(pot, xi, Scheme.BO)
    elapsed = time.perf_counter() - t0
    # b vanishes at xi = 0; compare absolutely where the reference is roundoff
    e_a = max_relative_error(a, P.analytic_a(spec, xi))
    e_b = max_relative_error(b, P.analytic_b(spec, xi), zero_ref=1e-12)
    ok = max(e_a, e_b) < 1e-10 and elapsed < 5
    criterion(2, "BO exact on rectangle", ok, f"err a {e_a:.2e}, err b {e_b:.2e}")
    assert ok


@pytest.mark.slow
def test_c03_convergence_orders(criterion):
    spec = P.over(2.25, 30.0)
    xi = np.round(np.arange(-2.0, 2.0 + 1e-9, 0.1), 12)
    ref = P.analytic_a(spec, xi)
    ns = [2 ** k for k in range(8, 14)]
    t0 = time.perf_counter()
    slopes = {}
    for scheme in Scheme:
        errs = []
        for n in ns:
            a, _, _, _ = scatter_arrays(D.sample(spec, n=n), xi, scheme)
            errs.append(math.sqrt(msre(a, ref)))
        slopes[scheme] = np.polyfit(np.log2(ns), np.log2(errs), 1)[0]
    elapsed = time.perf_counter() - t0
    ok = all((-4.5 <= s <= -3.5) if sc is Scheme.RK4 else (-2.3 <= s <= -1.7)
             for sc, s in slopes.items()) and elapsed < 120
    detail = ", ".join(f"{sc.value} {s:.2f}" for sc, s in slopes.items())
    criterion(3, "convergence orders", ok, f"slopes {detail}")
    assert ok


def test_c04_five_eigenvalues(criterion, pot):
    p = pot("over", 5.0, 30.0, 2 ** 10)
    cfg = HybridConfig(Contour(Rectangle(-1, 1, 0.1, 5), 400), MomentMode.DL,
                       RootConfig(Method.NEWTON), Scheme.BO)
    t0 = time.perf_counter()
    res = hybrid_eigenvalues(p, cfg)
    elapsed = time.perf_counter() - t0
    ref = [complex(0, 4.5 - k) for k in range(5)]
    ok = len(res) == 5
    err = re = float("inf")
    if ok:
        err = max(abs(e.xi - r) / abs(r) for e, r in zip(res, ref))
        re = max(abs(e.xi.real) for e in res)
        ok = err < 1e-4 and re < 1e-5 and elapsed < 30
    criterion(4, "five-eigenvalue recovery", ok,
              f"{len(res)} found, max rel err {err:.2e}, max |Re| {re:.1e}")
    assert ok


def test_c05_phased_soliton_spectrum(criterion, pot):
    p = pot("phased", 1.0, 20.0, 2 ** 12)
    t0 = time.perf_counter()
    sp = N.full_discrete_spectrum(p, Scheme.BO, norming=N.NormingMethod(N.NormingKind.BIDIRECTIONAL))
    elapsed = time.perf_counter() - t0
    ok = len(sp) == 1 and sp.entries[0].c is not None
    d_xi = d_c = float("inf")
    if ok:
        e = sp.entries[0]
        d_xi = abs(e.xi - P.PHASED_EIGENVALUE)
        d_c = abs(e.c - P.PHASED_NORMING)
        ok = d_xi < 1e-6 and d_c < 1e-3 and elapsed < 30
    criterion(5, "phased-soliton discrete spectrum", ok,
              f"{len(sp)} entries, |dxi| {d_xi:.2e}, |dc| {d_c:.2e}")
    assert ok


def test_c06_norming_breakdown_and_repair(criterion, pot):
    errs = {}
    for A in (5.25, 0.8):
        spec = P.over(A, 20.0)
        p = pot("over", A, 20.0, 2 ** 12)
        xi = P.analytic_eigenvalues(spec)[0]
        ref = P.analytic_norming(spec, xi)
        with np.errstate(all="ignore"):
            frac = N.residue_fraction(p, xi)
        bi, _ = N.residue_bidirectional(p, xi)
        errs[A] = (abs(frac - ref) / abs(ref), abs(bi - ref) / abs(ref))
    ok = (errs[5.25][0] > 1e-1 and errs[5.25][1] < 1e-3
          and errs[0.8][0] < 1e-2 and errs[0.8][1] < 1e-2)
    detail = "; ".join(f"A={A}: fraction {f:.1e}, bidirectional {b:.1e}"
                       for A, (f, b) in errs.items())
    criterion(6, "norming breakdown and repair", ok, detail)
    assert ok


def _hausdorff(xs, ys):
    d = np.abs(np.subtract.outer(np.asarray(xs), np.asarray(ys)))
    return max(d.min(axis=1).max(), d.min(axis=0).max())


def _root_set(rng):
    m = int(rng.integers(1, 7))
    out = []
    while len(out) < m:
        z = complex(rng.uniform(-2, 2), rng.uniform(0.05, 2))
        if all(abs(z - w) > 0.05 for w in out):
            out.append(z)
    return out


def test_c07_newton_identity_round_trip(criterion):
    rng = np.random.default_rng(7)
    t0 = time.perf_counter()
    worst = 0.0
    for _ in range(200):
        roots = np.array(_root_set(rng))
        s = np.array([np.sum(roots ** p) for p in range(1, roots.size + 1)])
        got = polynomial_roots(newton_identities(s))
        worst = max(worst, _hausdorff(got, roots))
    elapsed = time.perf_counter() - t0
    ok = worst < 1e-8 and elapsed < 5
    criterion(7, "Newton-identity round trip", ok, f"max Hausdorff {worst:.2e}, {elapsed:.2f} s")
    assert ok


def test_c08_zero_counting(criterion, pot):
    contour = Contour(Rectangle(-1, 1, 0.1, 5.5), 1600)
    t0 = time.perf_counter()
    found, worst = {}, 0.0
    for A, want in ((0.4, 0), (2.0, 2), (3.0, 3), (5.25, 5)):
        a = CoefficientA(pot("over", A, 30.0, 2 ** 10))
        for mode in CountMode:
            n, raw = count_zeros(a, a.derivative, contour, mode)
            found[(A, mode)] = n == want
            worst = max(worst, abs(raw - want))
    elapsed = time.perf_counter() - t0
    ok = all(found.values()) and worst < 0.4 and elapsed < 60
    criterion(8, "zero counting", ok, f"max |raw-N| {worst:.2e}, {elapsed:.1f} s")
    assert ok


def test_c09_dl_not_worse_than_adl(criterion):
    def f(z):
        return z * z + 1

    def fp(z):
        return 2 * z

    rows = []
    for n in (200, 400, 800, 1600):
        c = Contour(Rectangle(-2, 2, 0.1, 2), n)
        e_dl = abs(dl_locate(f, fp, c, MomentMode.DL)[0] - 1j)
        e_adl = abs(dl_locate(f, None, c, MomentMode.ADL)[0] - 1j)
        rows.append((n, e_dl, e_adl))
    ok = all(d <= a for _, d, a in rows)
    detail = ", ".join(f"{n}: {d:.1e}/{a:.1e}" for n, d, a in rows)
    criterion(9, "DL vs aDL ordering", ok, f"DL/aDL errors {detail}")
    assert ok


@pytest.mark.slow
def test_c10_basin_ordering(criterion, pot):
    a = CoefficientA(pot("phased", 1.0, 30.0, 2 ** 10))
    guesses = [complex(x, y) for y in np.linspace(0.05, 2, 40) for x in np.linspace(-1, 2, 40)]
    t0 = time.perf_counter()
    counts = {}
    for method in (Method.MULLER, Method.NEWTON):
        cfg = RootConfig(method)
        counts[method] = sum(find_root(a, a.derivative, g, cfg).converged for g in guesses)
    elapsed = time.perf_counter() - t0
    ok = counts[Method.MULLER] >= counts[Method.NEWTON] and elapsed < 300
    criterion(10, "basin ordering (soft)", ok,
              f"converged cells muller {counts[Method.MULLER]}, nr {counts[Method.NEWTON]}")
    if not ok:
        warnings.warn("basin ordering not reproduced; investigate lattice resolution")


def test_c11_derivative_propagation(criterion, pot):
    p = pot("over", 2.25, 30.0, 2 ** 11)
    rng = np.random.default_rng(11)
    xis = rng.uniform(-2, 2, 20) + 1j * rng.uniform(0.1, 2, 20)
    h = 1e-5
    worst = {}
    for scheme in (Scheme.BO, Scheme.BOMOD, Scheme.AL, Scheme.ALMOD, Scheme.CN):
        _, _, ap, _ = scatter_arrays(p, xis, scheme, want_derivative=True)
        hi, _, _, _ = scatter_arrays(p, xis + h, scheme)
        lo, _, _, _ = scatter_arrays(p, xis - h, scheme)
        fd = (hi - lo) / (2 * h)
        worst[scheme] = float(np.max(np.abs(ap - fd) / np.abs(ap)))
    ok = max(worst.values()) < 1e-6
    detail = ", ".join(f"{s.value} {w:.1e}" for s, w in worst.items())
    criterion(11, "derivative propagation", ok, f"max rel discrepancy {detail}")
    assert ok


DETERMINISM_RUNS = [
    ["spectrum", "--A", "2.25", "--n", "64..256", "--schemes", "bo,al,cn,rk4", "--xi-step", "0.5"],
    ["eigenvalues", "--A", "2.25", "--n", "512", "--methods", "hybrid,contour,multiroot",
     "--seed", "3"],
    ["basin", "--profile", "phased", "--n", "256", "--lattice", "6", "--methods",
     "nr,secant,sidi,steffensen,muller"],
    ["norming", "--amplitudes", "0.8,2.25", "--n", "1024"],
    ["count-zeros", "--A", "3", "--n", "512", "--points", "400"],
]


def test_c12_determinism(criterion, tmp_path):
    same = {}
    for k, argv in enumerate(DETERMINISM_RUNS):
        outs = []
        for rep in range(2):
            path = tmp_path / f"{k}_{rep}.out"
            cli.main(argv + ["--out", str(path)])
            outs.append(path.read_bytes())
        same[argv[0]] = outs[0] == outs[1] and len(outs[0]) > 0
    ok = all(same.values())
    bad = [k for k, v in same.items() if not v]
    criterion(12, "determinism", ok, f"{len(same)} subcommands" + (f", differ: {bad}" if bad else ""))
    assert ok
