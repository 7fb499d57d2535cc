"""Command-line front end.

Every subcommand prints one JSON report on stdout.  Exit status is 0 on
success, 1 when a computed quantity misses its tolerance and 2 when a
precondition fails (the named conditions go to stderr as JSON).
"""
from __future__ import annotations

import argparse
import configparser
import json
import sys
from pathlib import Path

import numpy as np

from . import io
from .grid import Field, Grid, PhaseField, boundary_magnitude, fourier, inverse_fourier, l2_norm
from .modspace import gaussian_window, make_window_pair, mod_norm, verify_conv, verify_mult, wiener_norm
from .nlse import NlseConfig, free_gaussian, phase_residual, split_step
from .product import ASSOCIATION, gabor_product
from .rng import gaussian_chirp, make_rng, random_field, random_phase_field
from .sequences import verify_holder, verify_young
from .stft import moyal, project, stft, twisted_convolve
from .suite import CHECKS, product_cases, run_suite
from .weights import ConditionError, NoAdmissibleExponent, as_exponent, intro_solve, parse_weight

DEFAULTS = {"L": 12.0, "N": 256, "d": 1, "seed": 0}


class ToleranceFailure(Exception):
    pass


# --------------------------------------------------------------------------
# helpers


def load_config(path) -> dict:
    """``key = value`` lines; ``#`` starts a comment."""
    cp = configparser.ConfigParser(inline_comment_prefixes=("#",))
    cp.optionxform = str
    cp.read_string("[gaborlab]\n" + Path(path).read_text())
    return dict(cp["gaborlab"])


def _setting(args, key, cast):
    v = getattr(args, key, None)
    if v is None:
        v = args.config_values.get(key, DEFAULTS.get(key))
    return None if v is None else cast(v)


def _grid(args, L=None, N=None) -> Grid:
    return Grid(_setting(args, "d", int), L if L is not None else _setting(args, "L", float),
                N if N is not None else _setting(args, "N", int))


def _grid_with(args, L: float, N: int) -> Grid:
    """Grid with command-specific defaults; flags and config values still win."""
    def pick(key, default, cast):
        v = getattr(args, key, None)
        if v is None:
            v = args.config_values.get(key, default)
        return cast(v)

    return Grid(_setting(args, "d", int), pick("L", L, float), pick("N", N, int))


def _tol(args, default: float) -> float:
    v = args.tol if args.tol is not None else args.config_values.get("tol")
    return float(v) if v is not None else default


def _seed(args) -> int:
    return _setting(args, "seed", int)


def _weight(text):
    return None if text in (None, "", "1", "none") else parse_weight(text)


def _emit(report: dict) -> None:
    sys.stdout.write(json.dumps(report, sort_keys=True, default=_jsonable) + "\n")


def _jsonable(x):
    if isinstance(x, (np.floating, np.integer)):
        return x.item()
    if isinstance(x, complex):
        return [x.real, x.imag]
    return str(x)


def _check(value: float, tol: float, report: dict) -> dict:
    ok = bool(np.isfinite(value) and value <= tol)
    report.update({"status": "ok" if ok else "fail", "tolerance": tol})
    _emit(report)
    if not ok:
        raise ToleranceFailure()
    return report


def _field_or_random(args, path, stream: int) -> Field:
    if path:
        f = io.read_field(path)
        if not isinstance(f, Field):
            raise ValueError(f"{path} holds a phase-space field, expected a field")
        return f
    return random_field(_grid(args), make_rng(_seed(args), stream))


def _window(args, grid: Grid) -> Field:
    if getattr(args, "window", None):
        return io.read_field(args.window)
    return gaussian_window(grid)


# --------------------------------------------------------------------------
# subcommands


def cmd_fourier(args):
    f = _field_or_random(args, args.inp, 100)
    fh = fourier(f)
    if args.out:
        io.write_field(args.out, fh)
    back = inverse_fourier(fh)
    inv = l2_norm(back - f) / l2_norm(f)
    pars = abs(l2_norm(fh) - l2_norm(f)) / l2_norm(f)
    _check(max(inv, pars), _tol(args, 1e-12), {
        "command": "fourier", "inversion_rel": inv, "parseval_rel": pars,
        "boundary_mass": boundary_magnitude(f)})


def cmd_stft(args):
    f = _field_or_random(args, args.inp, 101)
    phi = _window(args, f.grid)
    F = stft(f, phi)
    if args.out:
        io.write_field(args.out, F)
    err = abs(l2_norm(F) - l2_norm(phi) * l2_norm(f)) / (l2_norm(phi) * l2_norm(f))
    _check(err, _tol(args, 1e-10), {
        "command": "stft", "norm": l2_norm(F), "moyal_norm_rel": err,
        "boundary_mass": boundary_magnitude(F)})


def _phase_field_or_random(args, path, stream: int) -> PhaseField:
    if path:
        F = io.read_field(path)
        if not isinstance(F, PhaseField):
            raise ValueError(f"{path} holds a field, expected a phase-space field")
        return F
    return random_phase_field(_grid(args), make_rng(_seed(args), stream))


def cmd_project(args):
    F = _phase_field_or_random(args, args.inp, 102)
    phi = _window(args, F.grid)
    P = project(F, phi)
    if args.out:
        io.write_field(args.out, P)
    PP = project(P, phi)
    idem = float(np.linalg.norm(PP.values - P.values) / np.linalg.norm(P.values))
    _check(idem, _tol(args, 1e-8), {
        "command": "project", "idempotence_rel": idem, "norm_in": l2_norm(F), "norm_out": l2_norm(P)})


def cmd_twisted(args):
    if args.f or args.g:
        F = _phase_field_or_random(args, args.f, 103)
        G = _phase_field_or_random(args, args.g, 104)
        H = twisted_convolve(F, G, allow_large=args.allow_large)
        if args.out:
            io.write_field(args.out, H)
        _emit({"command": "twisted-conv", "norm": l2_norm(H), "status": "ok"})
        return
    # no inputs: the reproducing identity on seeded data
    g = _grid_with(args, 6.0, 64)
    rng = make_rng(_seed(args), 103)
    f, phi = random_field(g, rng), random_field(g, rng)
    A = twisted_convolve(stft(phi, phi), stft(f, phi), allow_large=args.allow_large)
    B = stft(f, phi) * l2_norm(phi) ** 2
    rel = float(np.linalg.norm(A.values - B.values) / np.linalg.norm(B.values))
    _check(rel, _tol(args, 1e-6), {"command": "twisted-conv", "reproducing_rel": rel})


def cmd_moyal(args):
    g = _grid(args)
    rng = make_rng(_seed(args), 105)
    paths = [args.f, args.g, args.phi, args.psi]
    fs = [io.read_field(p) if p else random_field(g, rng) for p in paths]
    lhs, rhs = moyal(*fs)
    err = abs(lhs - rhs)
    _check(err / (1 + abs(rhs)), _tol(args, 1e-8), {
        "command": "moyal", "lhs": [lhs.real, lhs.imag], "rhs": [rhs.real, rhs.imag], "abs_error": err})


def cmd_seq_verify(args):
    a1 = io.read_sequence(args.a1)
    a2 = io.read_sequence(args.a2)
    exps = [as_exponent(x) for x in args.exps.split(",")]
    weights = None
    if args.weights:
        weights = tuple(_weight(w.strip()) for w in args.weights.split(";"))
    fn = verify_holder if args.kind == "holder" else verify_young
    ratio = fn(a1, a2, exps, weights)
    _check(ratio, _tol(args, 1 + 1e-12), {
        "command": "seq-verify", "kind": args.kind, "exponents": [str(e) for e in exps], "ratio": ratio})


def cmd_mod_norm(args):
    if args.inp:
        f = _field_or_random(args, args.inp, 106)
    else:
        # the plateau windows need 16 points per unit
        g = _grid_with(args, 12.0, 384)
        f = random_field(g, make_rng(_seed(args), 106))
    if args.window:
        w, wid = io.read_field(args.window), Path(args.window).name
    else:
        pair = make_window_pair(f.grid)
        w, wid = pair.phi, pair.window_id
    radii = tuple(int(x) for x in args.radii.split(",")) if args.radii else None
    val = mod_norm(f, args.p, args.q, _weight(args.weight), args.flavor, w, radii)
    _emit({"command": "mod-norm", "norm": val, "window_id": wid,
           "truncation": list(radii) if radii else "full-lattice",
           "boundary_mass": boundary_magnitude(f), "status": "ok"})


def cmd_wiener_norm(args):
    if args.inp:
        F = io.read_field(args.inp)
        if isinstance(F, Field):
            F = stft(F, gaussian_window(F.grid))
    else:
        g = _grid(args)
        F = stft(random_field(g, make_rng(_seed(args), 107)), gaussian_window(g))
    val = wiener_norm(F, args.r, args.p, args.q, _weight(args.weight), args.variant)
    _emit({"command": "wiener-norm", "norm": val, "status": "ok"})


def _targets(args, kind):
    p1, q1, p2, q2 = (as_exponent(x) for x in (args.p1, args.q1, args.p2, args.q2))
    if args.auto_target or args.p0 is None or args.q0 is None:
        sol = intro_solve(p1, q1, p2, q2)
        p0, q0 = sol.mult if kind == "mult" else sol.conv
    else:
        p0, q0 = as_exponent(args.p0), as_exponent(args.q0)
    return (p0, p1, p2), (q0, q1, q2)


def _cmd_theorem(args, kind):
    g = _grid_with(args, 12.0, 384)
    p, q = _targets(args, kind)
    weights = None
    if any((args.w0, args.w1, args.w2)):
        weights = tuple(_weight(w) for w in (args.w0, args.w1, args.w2))
    pair = make_window_pair(g)
    if args.f1 and args.f2:
        pairs = [(io.read_field(args.f1), io.read_field(args.f2))]
    else:
        rng = make_rng(_seed(args), 108 if kind == "mult" else 109)
        pairs = [(gaussian_chirp(g, rng), gaussian_chirp(g, rng)) for _ in range(args.samples)]
    fn = verify_mult if kind == "mult" else verify_conv
    reps = [fn(f1, f2, p, q, weights, args.flavor, window=pair.phi) for f1, f2 in pairs]
    ratios = [r.ratio for r in reps]
    ident = max(max(r.identity_rel, r.extract_rel) for r in reps)
    rows = [(k, r) for k, r in enumerate(ratios)]
    if args.csv:
        io.write_csv(args.csv, ["sample", "ratio"], rows)
    _check(ident, _tol(args, 1e-6), {
        "command": f"verify-{kind}", "flavor": args.flavor,
        "p0": str(p[0]), "q0": str(q[0]), "p": [str(x) for x in p], "q": [str(x) for x in q],
        "max_ratio": max(ratios), "samples": len(reps), "identity_rel": ident,
        "weight_constant": reps[0].weight_constant})


def cmd_verify_mult(args):
    _cmd_theorem(args, "mult")


def cmd_verify_conv(args):
    _cmd_theorem(args, "conv")


def cmd_gabor_product(args):
    A = io.read_field(args.f1)
    B = io.read_field(args.f2)
    phi = io.read_field(args.window) if args.window else gaussian_window(A.grid)
    phi = phi * (1.0 / l2_norm(phi))
    if isinstance(A, Field):
        A = stft(A, phi)
    if isinstance(B, Field):
        B = stft(B, phi.conj())
    P = gabor_product(A, B, phi, allow_large=args.allow_large)
    if args.out:
        io.write_field(args.out, P)
    _emit({"command": "gabor-product", "norm": l2_norm(P), "status": "ok"})


def cmd_product_identity(args):
    from .grid import inner, multiply

    worst = 0.0
    for g, f1, f2, (phi, phi1, phi2) in product_cases(_seed(args), args.cases):
        lhs = stft(multiply(f1, f2), phi) * inner(phi2, phi1)
        rhs = gabor_product(stft(f1, phi1), stft(f2, phi2.conj()), phi)
        worst = max(worst, float(np.linalg.norm(rhs.values - lhs.values) / np.linalg.norm(lhs.values)))
    _check(worst, _tol(args, 1e-5), {"command": "product-identity", "cases": args.cases, "max_rel": worst})


def cmd_nlse(args):
    g = _grid_with(args, 8.0, 96)
    cfg = NlseConfig(args.lam, args.dt, args.T, g)
    psi0 = free_gaussian(g, 0.0) * args.amp
    traj = split_step(psi0, cfg)
    masses = traj.masses()
    drift = float(np.max(np.abs(masses - masses[0])) / masses[0])
    report = {"command": "nlse", "lambda": args.lam, "dt": args.dt, "T": args.T,
              "steps": cfg.steps, "mass_drift": drift}
    if args.out:
        doc = {"format": "nlse-traj/1", "lambda": args.lam, "dt": args.dt,
               "times": traj.times.tolist(),
               "states": [io.field_to_json(s) for s in traj.states]}
        Path(args.out).write_text(json.dumps(doc))
    if args.residuals:
        res = phase_residual(traj, cfg.lifting_window(), cfg)
        rows = [(t, r, masses[n + 1], traj.boundary_mass[n + 1])
                for n, (t, r) in enumerate(zip(res.times, res.residual))]
        io.write_csv(args.residuals, ["t", "residual", "mass", "boundary_mass"], rows)
        report["max_residual"] = res.max()
        report["association"] = ASSOCIATION
    _check(drift, _tol(args, 1e-10), report)


def cmd_suite(args):
    only = args.only.split(",") if args.only else None
    if only:
        unknown = [o for o in only if o not in CHECKS]
        if unknown:
            raise ValueError(f"unknown checks: {unknown}; choose from {list(CHECKS)}")
    results = run_suite(_seed(args), args.quick, only)
    summary = [r.as_dict() for r in results]
    if args.out:
        Path(args.out).write_text(json.dumps(summary, indent=1) + "\n")
    failed = [r.check_name for r in results if r.status != "ok"]
    _emit({"command": "suite", "seed": _seed(args), "quick": args.quick, "checks": summary,
           "status": "ok" if not failed else "fail"})
    if failed:
        raise ToleranceFailure()


# --------------------------------------------------------------------------
# parser


def _common(p: argparse.ArgumentParser, grid: bool = True) -> None:
    p.add_argument("--seed", type=int, default=None, help="64-bit seed for all random inputs")
    p.add_argument("--config", default=None, help="file of 'key = value' lines (L, N, d, seed, tol)")
    p.add_argument("--tol", type=float, default=None, help="override the tolerance of the check")
    if grid:
        p.add_argument("--L", type=float, default=None, help="half-width of the box")
        p.add_argument("--N", type=int, default=None, help="points per axis")
        p.add_argument("--d", type=int, default=None, choices=(1, 2))


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="gaborlab", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("fourier", help="Fourier transform of a field")
    _common(p)
    p.add_argument("--in", dest="inp")
    p.add_argument("--out")
    p.set_defaults(func=cmd_fourier)

    p = sub.add_parser("stft", help="short-time Fourier transform")
    _common(p)
    p.add_argument("--in", dest="inp")
    p.add_argument("--window")
    p.add_argument("--out")
    p.set_defaults(func=cmd_stft)

    p = sub.add_parser("project", help="projection onto the range of the STFT")
    _common(p)
    p.add_argument("--in", dest="inp")
    p.add_argument("--window")
    p.add_argument("--out")
    p.set_defaults(func=cmd_project)

    p = sub.add_parser("twisted-conv", help="twisted convolution of phase-space fields")
    _common(p)
    p.add_argument("--f")
    p.add_argument("--g")
    p.add_argument("--out")
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_twisted)

    p = sub.add_parser("moyal", help="both sides of the orthogonality relation")
    _common(p)
    for name in ("f", "g", "phi", "psi"):
        p.add_argument(f"--{name}")
    p.set_defaults(func=cmd_moyal)

    p = sub.add_parser("seq-verify", help="discrete Hölder or Young ratio")
    _common(p, grid=False)
    p.add_argument("--kind", choices=("holder", "young"), required=True)
    p.add_argument("--a1", required=True)
    p.add_argument("--a2", required=True)
    p.add_argument("--exps", required=True, help="e0,e1,e2 (decimal, p/q or inf)")
    p.add_argument("--weights", help="w0;w1;w2 weight literals (1 for none)")
    p.set_defaults(func=cmd_seq_verify)

    p = sub.add_parser("mod-norm", help="modulation-space quasi-norm")
    _common(p)
    p.add_argument("--in", dest="inp")
    p.add_argument("--p", default="2")
    p.add_argument("--q", default="2")
    p.add_argument("--weight")
    p.add_argument("--flavor", choices=("M", "W"), default="M")
    p.add_argument("--window")
    p.add_argument("--radii", help="J,M")
    p.set_defaults(func=cmd_mod_norm)

    p = sub.add_parser("wiener-norm", help="Wiener amalgam quasi-norm")
    _common(p)
    p.add_argument("--in", dest="inp")
    p.add_argument("--r", default="inf")
    p.add_argument("--p", default="2")
    p.add_argument("--q", default="2")
    p.add_argument("--weight")
    p.add_argument("--variant", choices=("standard", "star"), default="standard")
    p.set_defaults(func=cmd_wiener_norm)

    for name, fn in (("verify-mult", cmd_verify_mult), ("verify-conv", cmd_verify_conv)):
        p = sub.add_parser(name, help="multiplication bound" if name == "verify-mult" else "convolution bound")
        _common(p)
        for e in ("p0", "q0"):
            p.add_argument(f"--{e}")
        for e in ("p1", "q1", "p2", "q2"):
            p.add_argument(f"--{e}", default="2")
        p.add_argument("--auto-target", action="store_true", help="solve (p0, q0) from the inputs")
        p.add_argument("--flavor", choices=("M", "W"), default="M")
        for w in ("w0", "w1", "w2"):
            p.add_argument(f"--{w}")
        p.add_argument("--f1")
        p.add_argument("--f2")
        p.add_argument("--samples", type=int, default=50)
        p.add_argument("--csv", help="write per-sample ratios")
        p.set_defaults(func=fn)

    p = sub.add_parser("gabor-product", help="Gabor product of two fields")
    _common(p, grid=False)
    p.add_argument("--f1", required=True)
    p.add_argument("--f2", required=True)
    p.add_argument("--window")
    p.add_argument("--out")
    p.add_argument("--allow-large", action="store_true")
    p.set_defaults(func=cmd_gabor_product)

    p = sub.add_parser("product-identity", help="STFT of a product versus the Gabor product")
    _common(p, grid=False)
    p.add_argument("--cases", type=int, default=20)
    p.set_defaults(func=cmd_product_identity)

    p = sub.add_parser("nlse", help="split-step solve and phase-space residual")
    _common(p)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--dt", type=float, default=1e-3)
    p.add_argument("--T", type=float, default=0.1)
    p.add_argument("--amp", type=float, default=1.0, help="amplitude of the Gaussian initial datum")
    p.add_argument("--out")
    p.add_argument("--residuals")
    p.set_defaults(func=cmd_nlse)

    p = sub.add_parser("suite", help="run the acceptance battery")
    _common(p, grid=False)
    p.add_argument("--quick", action="store_true")
    p.add_argument("--only", help="comma-separated check groups")
    p.add_argument("--out", help="write the summary JSON here")
    p.set_defaults(func=cmd_suite)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    args.config_values = load_config(args.config) if args.config else {}
    try:
        args.func(args)
    except ToleranceFailure:
        return 1
    except ConditionError as e:
        sys.stderr.write(json.dumps({"error": "conditions not satisfied", "conditions": e.conditions}) + "\n")
        return 2
    except (NoAdmissibleExponent, ValueError) as e:
        sys.stderr.write(json.dumps({"error": str(e)}) + "\n")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
