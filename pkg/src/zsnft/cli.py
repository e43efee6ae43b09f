"""Command-line front end: sweeps and experiments that write CSV or JSON.

Ranges are written ``lo..hi`` and expand to the powers of two between the two
bounds, so ``--n 256..8192`` means 256, 512, ..., 8192. Lists are comma
separated. Output is byte-identical for identical flags unless ``--timing`` is
given, which fills the runtime columns with measured wall-clock times.

Exit status: 0 when every row succeeded, 1 when some rows failed or the time
budget ran out, 2 when the command line itself is invalid.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import profiles as P
from .contour import (AnnularSector, Contour, CountMode, MomentMode, Rectangle,
                      count_zeros, dl_locate)
from .discretize import sample
from .errors import AmbiguousCount, Incomplete, ZSNFTError
from .hybrid import HybridConfig, hybrid_eigenvalues
from .metrics import msre
from .norming import (NormingKind, residue_bidirectional, residue_contour,
                      residue_fraction)
from .rootfind import Method, Region, RootConfig, find_root, multi_root
from .zss import CoefficientA, Scheme, scatter_arrays, worker_count

EXIT_OK, EXIT_PARTIAL, EXIT_SPEC = 0, 1, 2


class SpecError(ValueError):
    """Invalid combination of command-line values."""


class Budget:
    def __init__(self, seconds):
        self.deadline = time.monotonic() + seconds
        self.exceeded = False

    def check(self):
        if time.monotonic() > self.deadline:
            self.exceeded = True
        return not self.exceeded


# --- parsing helpers --------------------------------------------------------

def parse_int_range(text):
    """``"256..8192"`` -> powers of two in range; ``"256,1024"`` -> list."""
    out = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo_s, hi_s = part.split("..", 1)
            lo, hi = int(lo_s), int(hi_s)
            if lo < 1 or hi < lo:
                raise argparse.ArgumentTypeError(f"bad range {part!r}")
            k = math.ceil(math.log2(lo))
            while 2 ** k <= hi:
                out.append(2 ** k)
                k += 1
        else:
            out.append(int(part))
    if not out or any(v < 2 for v in out):
        raise argparse.ArgumentTypeError(f"no valid sizes in {text!r}")
    return out


def parse_floats(text):
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def parse_box(text):
    v = parse_floats(text)
    if len(v) != 4:
        raise argparse.ArgumentTypeError("expected re_min,re_max,im_min,im_max")
    return tuple(v)


def parse_lattice(text):
    parts = text.lower().split("x")
    try:
        nums = [int(p) for p in parts]
    except ValueError:
        raise argparse.ArgumentTypeError("lattice must be N or NxM") from None
    if len(nums) == 1:
        nums = nums * 2
    if len(nums) != 2 or min(nums) < 1:
        raise argparse.ArgumentTypeError("lattice must be N or NxM")
    return tuple(nums)


def _enum_list(enum_cls, text, what):
    try:
        return [enum_cls(v.strip()) for v in text.split(",") if v.strip()]
    except ValueError:
        choices = ",".join(e.value for e in enum_cls)
        raise argparse.ArgumentTypeError(f"unknown {what} in {text!r}; choices: {choices}") from None


# --- output -----------------------------------------------------------------

def fmt(x):
    if x is None:
        return ""
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return f"{float(x):.17g}"
    return str(x)


def write_csv(path, header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(row.get(h)) for h in header])
    _emit(path, buf.getvalue())


def to_json(obj, indent=0):
    """JSON text with floats at 17 significant digits and non-finite as null."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if obj is None:
        return "null"
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return f"{v:.17g}" if math.isfinite(v) else "null"
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{to_json(str(k))}: {to_json(v, indent + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{to_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def write_json(path, obj):
    _emit(path, to_json(obj) + "\n")


def _emit(path, text):
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def cz(z):
    return {"re": float(z.real), "im": float(z.imag)}


# --- shared ------------------------------------------------------------------

@dataclass
class Timer:
    enabled: bool

    def run(self, fn, *args, **kwargs):
        t0 = time.perf_counter()
        out = fn(*args, **kwargs)
        return out, (time.perf_counter() - t0) if self.enabled else None


def profile_from(args):
    kind = P.ProfileKind(args.profile)
    if kind is P.ProfileKind.PHASED:
        return P.phased(args.L)
    return P.ProfileSpec(kind, args.A, args.L)


def pool_map(fn, items):
    """Map in a thread pool; results keep input order."""
    items = list(items)
    workers = min(worker_count(), max(1, len(items)))
    if workers == 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as ex:
        return list(ex.map(fn, items))


def nearest_oracle(z, oracle):
    if not oracle:
        return None, None
    ref = min(oracle, key=lambda w: abs(w - z))
    return ref, abs(z - ref) / abs(ref)


def make_contour(args, n_points):
    if args.sector is not None:
        rho0, rho1, th0, th1 = args.sector
        return Contour(AnnularSector(rho0, rho1, th0, th1), n_points)
    return Contour(Rectangle(*args.contour), n_points)


# --- subcommands ------------------------------------------------------------

SPECTRUM_HEADER = ["scheme", "n", "A", "xi", "re_a", "im_a", "re_b", "im_b",
                   "err_a", "err_b", "msre", "msre_b", "runtime_per_sample", "status"]


def cmd_spectrum(args):
    spec = profile_from(args)
    if args.xi_step <= 0 or args.xi_max < args.xi_min:
        raise SpecError("need xi_step > 0 and xi_max >= xi_min")
    m = int(round((args.xi_max - args.xi_min) / args.xi_step))
    xis = args.xi_min + args.xi_step * np.arange(m + 1)
    a_ref = np.asarray(P.analytic_a(spec, xis))
    b_ref = np.asarray(P.analytic_b(spec, xis))
    timer = Timer(args.timing)
    budget = Budget(args.budget_seconds)
    cells = [(s, n) for s in args.schemes for n in args.n]

    def run(cell):
        scheme, n = cell
        if not budget.check():
            return None
        pot = sample(spec, n=n)
        (a, b, _, status), dt = timer.run(scatter_arrays, pot, xis, scheme, False, check=False)
        return a, b, status, dt

    rows, failed = [], False
    for (scheme, n), res in zip(cells, pool_map(run, cells)):
        if res is None:
            failed = True
            rows.append({"scheme": scheme.value, "n": n, "A": spec.amplitude,
                         "status": "budget_exceeded"})
            continue
        a, b, status, dt = res
        ok = status == 0
        m_a = msre(a[ok], a_ref[ok]) if ok.any() else None
        m_b = msre(b[ok], b_ref[ok]) if ok.any() else None
        for j, xi in enumerate(xis):
            row = {"scheme": scheme.value, "n": n, "A": spec.amplitude, "xi": float(xi),
                   "msre": m_a, "msre_b": m_b,
                   "runtime_per_sample": None if dt is None else dt / n}
            if ok[j]:
                row.update(re_a=a[j].real, im_a=a[j].imag, re_b=b[j].real, im_b=b[j].imag,
                           err_a=abs(a[j] - a_ref[j]), err_b=abs(b[j] - b_ref[j]), status="ok")
            else:
                failed = True
                row["status"] = "overflow" if status[j] == 1 else "nonfinite"
            rows.append(row)
    write_csv(args.out, SPECTRUM_HEADER, rows)
    return EXIT_PARTIAL if failed or budget.exceeded else EXIT_OK


def _zeros_payload(zeros, oracle, refined=None):
    out = []
    for k, z in enumerate(zeros):
        ref, err = nearest_oracle(z, oracle)
        item = {"xi": cz(z), "reference": None if ref is None else cz(ref), "relative_error": err}
        if refined is not None:
            item["refined"] = refined[k]
        out.append(item)
    return out


def cmd_eigenvalues(args):
    spec = profile_from(args)
    oracle = P.analytic_eigenvalues(spec)
    timer = Timer(args.timing)
    budget = Budget(args.budget_seconds)
    n = args.n[0]
    pot = sample(spec, n=n)
    results = []
    failed = False
    for method in args.methods:
        if not budget.check():
            failed = True
            results.append({"method": method, "status": "budget_exceeded", "count": 0,
                            "zeros": [], "runtime": None})
            continue
        a = CoefficientA(pot, args.scheme)
        fprime = a.derivative if args.scheme.has_derivative else None
        entry = {"method": method, "status": "ok"}
        try:
            if method == "hybrid":
                cfg = HybridConfig(make_contour(args, args.coarse_points), args.mode,
                                   RootConfig(args.root), args.scheme)
                res, dt = timer.run(hybrid_eigenvalues, pot, cfg, a)
                zeros = [e.xi for e in res]
                entry["zeros"] = _zeros_payload(zeros, oracle, [e.refined for e in res])
            elif method == "contour":
                zeros, dt = timer.run(dl_locate, a, fprime, make_contour(args, args.points),
                                      args.mode)
                entry["zeros"] = _zeros_payload(zeros, oracle)
            else:
                box = args.contour
                n_exp = args.expected if args.expected is not None else len(oracle)
                if n_exp == 0:
                    zeros, dt = [], None
                else:
                    zeros, dt = timer.run(multi_root, a, fprime, n_exp, Region(*box),
                                          RootConfig(args.root), args.seed)
                entry["zeros"] = _zeros_payload(sorted(zeros, key=lambda z: (-z.imag, z.real)),
                                                oracle)
        except Incomplete as exc:
            failed = True
            dt = None
            entry["status"] = "incomplete"
            entry["zeros"] = _zeros_payload(exc.found, oracle)
        except (ZSNFTError, ArithmeticError) as exc:
            failed = True
            dt = None
            entry["status"] = "failed"
            entry["error"] = f"{type(exc).__name__}: {exc}"
            entry["zeros"] = []
        entry["count"] = len(entry["zeros"])
        entry["runtime"] = dt
        results.append(entry)
    write_json(args.out, {
        "command": "eigenvalues",
        "profile": {"kind": spec.kind.value, "A": spec.amplitude, "L": spec.half_width},
        "n": n, "scheme": args.scheme.value, "seed": args.seed,
        "oracle": [cz(z) for z in oracle],
        "results": results,
    })
    return EXIT_PARTIAL if failed else EXIT_OK


BASIN_HEADER = ["method", "re_guess", "im_guess", "status", "converged", "in_basin",
                "iterations", "re_root", "im_root", "relative_error", "runtime"]


def cmd_basin(args):
    spec = profile_from(args)
    oracle = P.analytic_eigenvalues(spec)
    pot = sample(spec, n=args.n[0])
    nx, ny = args.lattice
    re_min, re_max, im_min, im_max = args.region
    res = np.linspace(re_min, re_max, nx)
    ims = np.linspace(im_min, im_max, ny)
    guesses = [complex(x, y) for y in ims for x in res]
    roi = Region(*args.roi) if args.roi is not None else None
    timer = Timer(args.timing)
    budget = Budget(args.budget_seconds)
    cells = [(m, g) for m in args.methods for g in guesses]
    chunks = np.array_split(np.arange(len(cells)), max(1, min(worker_count(), len(cells))))

    def run_chunk(idx):
        # one evaluator per chunk; its one-point cache is not shared across threads
        a = CoefficientA(pot, args.scheme)
        fp = a.derivative if args.scheme.has_derivative else None
        out = []
        for i in idx:
            method, g = cells[i]
            if not budget.check():
                out.append(None)
                continue
            if method is Method.NEWTON and fp is None:
                out.append(("unsupported", None, 0, None))
                continue
            r, dt = timer.run(find_root, a, fp, g, RootConfig(method, roi=roi))
            out.append((r.status.value, r.root, r.iterations, dt))
        return out

    results = [r for chunk in pool_map(run_chunk, chunks) for r in chunk]
    rows, failed = [], False
    for (method, g), r in zip(cells, results):
        row = {"method": method.value, "re_guess": g.real, "im_guess": g.imag}
        if r is None:
            failed = True
            row.update(status="budget_exceeded", converged=False, in_basin=False)
        else:
            status, root, its, dt = r
            ref, err = nearest_oracle(root, oracle) if root is not None else (None, None)
            row.update(status=status, converged=root is not None,
                       in_basin=err is not None and err < 0.01, iterations=its, runtime=dt,
                       relative_error=err)
            if root is not None:
                row.update(re_root=root.real, im_root=root.imag)
            if status == "unsupported":
                failed = True
        rows.append(row)
    write_csv(args.out, BASIN_HEADER, rows)
    return EXIT_PARTIAL if failed or budget.exceeded else EXIT_OK


NORMING_HEADER = ["profile", "A", "method", "scheme", "n", "re_xi", "im_xi", "re_c", "im_c",
                  "re_ref", "im_ref", "relative_error", "status", "runtime"]


def _norming_oracle(spec):
    eigs = P.analytic_eigenvalues(spec)
    if not eigs:
        return None, None
    return eigs[0], P.analytic_norming(spec, eigs[0])


def cmd_norming(args):
    timer = Timer(args.timing)
    budget = Budget(args.budget_seconds)
    if args.profile == P.ProfileKind.PHASED.value:
        amps = [1.0]
    else:
        amps = args.amplitudes if args.amplitudes is not None else [args.A]
    n = args.n[0]
    if n % 2 and NormingKind.BIDIRECTIONAL in args.norming:
        raise SpecError("bidirectional norming needs an even --n")
    cells = [(A, m) for A in amps for m in args.norming]

    def run(cell):
        A, method = cell
        if args.profile == P.ProfileKind.PHASED.value:
            spec = P.phased(args.L)
        else:
            spec = P.ProfileSpec(P.ProfileKind(args.profile), A, args.L)
        row = {"profile": spec.kind.value, "A": spec.amplitude, "method": method.value,
               "scheme": args.scheme.value, "n": n}
        xi, ref = _norming_oracle(spec)
        if xi is None:
            row["status"] = "no_eigenvalue"
            return row, True
        row.update(re_xi=xi.real, im_xi=xi.imag, re_ref=ref.real, im_ref=ref.imag)
        if not budget.check():
            row["status"] = "budget_exceeded"
            return row, True
        pot = sample(spec, n=n)
        try:
            if method is NormingKind.CONTOUR:
                c, dt = timer.run(residue_contour, pot, xi, args.scheme, args.residue_points)
            elif method is NormingKind.FRACTION:
                c, dt = timer.run(residue_fraction, pot, xi, args.scheme)
            else:
                (c, _), dt = timer.run(residue_bidirectional, pot, xi, args.scheme)
        except (ZSNFTError, ArithmeticError, ValueError) as exc:
            row["status"] = type(exc).__name__
            return row, True
        if not (math.isfinite(c.real) and math.isfinite(c.imag)):
            row["status"] = "nonfinite"
            return row, True
        row.update(re_c=c.real, im_c=c.imag, relative_error=abs(c - ref) / abs(ref),
                   status="ok", runtime=dt)
        return row, False

    out = pool_map(run, cells)
    write_csv(args.out, NORMING_HEADER, [r for r, _ in out])
    return EXIT_PARTIAL if any(f for _, f in out) else EXIT_OK


def cmd_count_zeros(args):
    spec = profile_from(args)
    oracle = P.analytic_eigenvalues(spec)
    contour = make_contour(args, args.points)
    expected = sum(1 for z in oracle if contour.contains(z))
    pot = sample(spec, n=args.n[0])
    timer = Timer(args.timing)
    budget = Budget(args.budget_seconds)
    a = CoefficientA(pot, args.scheme)
    fprime = a.derivative if args.scheme.has_derivative else None
    modes, failed = [], False
    for mode in CountMode:
        entry = {"mode": mode.value}
        if not budget.check():
            failed = True
            entry["status"] = "budget_exceeded"
            modes.append(entry)
            continue
        if mode is CountMode.LOG_DERIVATIVE and fprime is None:
            failed = True
            entry["status"] = "unsupported"
            modes.append(entry)
            continue
        try:
            (n_z, raw), dt = timer.run(count_zeros, a, fprime, contour, mode)
            entry.update(status="ok", count=n_z, raw=raw, deviation=abs(raw - n_z), runtime=dt)
        except AmbiguousCount as exc:
            failed = True
            entry.update(status="ambiguous", raw=exc.raw)
        except (ZSNFTError, ArithmeticError) as exc:
            failed = True
            entry.update(status="failed", error=f"{type(exc).__name__}: {exc}")
        modes.append(entry)
    write_json(args.out, {
        "command": "count-zeros",
        "profile": {"kind": spec.kind.value, "A": spec.amplitude, "L": spec.half_width},
        "n": args.n[0], "scheme": args.scheme.value, "points": contour.n_points,
        "expected": expected,
        "modes": modes,
    })
    return EXIT_PARTIAL if failed else EXIT_OK


# --- parser -----------------------------------------------------------------

def _common(p, default_n="1024"):
    p.add_argument("--profile", choices=[k.value for k in P.ProfileKind], default="over")
    p.add_argument("--A", type=float, default=1.0, help="amplitude (ignored for phased)")
    p.add_argument("--L", type=float, default=30.0, help="half-width of [-L, L]")
    p.add_argument("--n", type=parse_int_range, default=parse_int_range(default_n),
                   help="samples; list a,b or power-of-two range lo..hi")
    p.add_argument("--out", default="-", help="output file (default stdout)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--budget-seconds", type=float, default=600.0)
    p.add_argument("--timing", action="store_true",
                   help="fill runtime columns (output is then not reproducible)")
    p.add_argument("--scheme", type=Scheme, default=Scheme.BO,
                   choices=list(Scheme), metavar="{" + ",".join(s.value for s in Scheme) + "}")


def _contour_args(p, default_box="-1,1,0.1,5", points=1600):
    p.add_argument("--contour", type=parse_box, default=parse_box(default_box),
                   help="rectangle re_min,re_max,im_min,im_max")
    p.add_argument("--sector", type=parse_box, default=None,
                   help="annular sector rho_min,rho_max,theta_min,theta_max (overrides --contour)")
    p.add_argument("--points", type=int, default=points, help="contour nodes")


def build_parser():
    parser = argparse.ArgumentParser(
        prog="zsnft", description=__doc__,
        formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("spectrum", help="continuous spectrum errors vs n (CSV)")
    _common(p, "256..8192")
    p.add_argument("--schemes", type=lambda t: _enum_list(Scheme, t, "scheme"),
                   default=[Scheme.BO], help="comma list of schemes")
    p.add_argument("--xi-min", type=float, default=-2.0)
    p.add_argument("--xi-max", type=float, default=2.0)
    p.add_argument("--xi-step", type=float, default=0.1)
    p.set_defaults(func=cmd_spectrum)

    p = sub.add_parser("eigenvalues", help="discrete eigenvalues (JSON)")
    _common(p)
    _contour_args(p)
    p.add_argument("--methods", type=lambda t: [v.strip() for v in t.split(",") if v.strip()],
                   default=["hybrid"], help="comma list of hybrid,contour,multiroot")
    p.add_argument("--root", type=Method, default=Method.NEWTON,
                   choices=list(Method), metavar="{" + ",".join(m.value for m in Method) + "}")
    p.add_argument("--mode", type=MomentMode, default=MomentMode.DL,
                   choices=list(MomentMode), metavar="{dl,adl}")
    p.add_argument("--coarse-points", type=int, default=400)
    p.add_argument("--expected", type=int, default=None,
                   help="zeros to look for with multiroot (default: oracle count)")
    p.set_defaults(func=cmd_eigenvalues)

    p = sub.add_parser("basin", help="root-finder convergence over a guess lattice (CSV)")
    _common(p)
    p.add_argument("--methods", type=lambda t: _enum_list(Method, t, "method"),
                   default=list(Method))
    p.add_argument("--region", type=parse_box, default=parse_box("-1,2,0.05,2"))
    p.add_argument("--lattice", type=parse_lattice, default=(60, 60), help="N or NxM")
    p.add_argument("--roi", type=parse_box, default=None)
    p.set_defaults(func=cmd_basin)

    p = sub.add_parser("norming", help="top norming constant vs amplitude (CSV)")
    _common(p, "4096")
    p.set_defaults(L=20.0)
    p.add_argument("--amplitudes", type=parse_floats, default=None, help="comma list of A")
    p.add_argument("--norming", type=lambda t: _enum_list(NormingKind, t, "norming method"),
                   default=list(NormingKind))
    p.add_argument("--residue-points", type=int, default=64)
    p.set_defaults(func=cmd_norming)

    p = sub.add_parser("count-zeros", help="zero count in all three modes (JSON)")
    _common(p)
    _contour_args(p, "-1,1,0.1,5.5", 1600)
    p.set_defaults(func=cmd_count_zeros)
    return parser


def _validate(parser, args):
    if args.L <= 0:
        parser.error("--L must be positive")
    if args.A < 0:
        parser.error("--A must be non-negative")
    if args.budget_seconds <= 0:
        parser.error("--budget-seconds must be positive")
    if getattr(args, "amplitudes", None) is not None and any(a < 0 for a in args.amplitudes):
        parser.error("--amplitudes must be non-negative")
    if getattr(args, "methods", None) and args.command == "eigenvalues":
        bad = [m for m in args.methods if m not in ("hybrid", "contour", "multiroot")]
        if bad:
            parser.error(f"unknown method(s): {','.join(bad)}")
        if args.mode is MomentMode.DL and not args.scheme.has_derivative:
            parser.error("DL needs a'(xi); use --mode adl with rk4")
    if hasattr(args, "points") and args.points < 16:
        parser.error("--points must be at least 16")
    if hasattr(args, "contour"):
        lo_r, hi_r, lo_i, hi_i = args.contour
        if not (hi_r > lo_r and hi_i > lo_i):
            parser.error("--contour must satisfy re_min < re_max and im_min < im_max")
    if args.command in ("eigenvalues", "basin", "norming", "count-zeros") and len(args.n) != 1:
        parser.error("--n takes a single value for this command")


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _validate(parser, args)
    try:
        return args.func(args)
    except (SpecError, ValueError) as exc:
        print(f"zsnft: error: {exc}", file=sys.stderr)
        return EXIT_SPEC


if __name__ == "__main__":
    sys.exit(main())
