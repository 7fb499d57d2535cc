"""The acceptance battery.  Each check returns one or more ``CheckResult`` rows
with ``status == "ok"`` iff ``value <= tolerance``.  ``quick=True`` shrinks
sample counts and horizons but keeps every tolerance."""
from __future__ import annotations

import itertools
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .grid import Field, Grid, PhaseField, convolve, fourier, inner, l2_norm, multiply
from .modspace import (
    gabor_coeffs,
    gabor_synthesize,
    gaussian_window,
    make_window_pair,
    mod_norm,
    verify_conv,
    verify_mult,
)
from .nlse import NlseConfig, free_gaussian, phase_residual, split_step
from .product import gabor_product
from .rng import gaussian_chirp, hermite_gaussian, make_rng, random_field, random_phase_field, random_sequence
from .sequences import verify_holder, verify_young
from .stft import moyal, project, stft, stft_adjoint, twisted_convolve
from .weights import INF, Bracket, Polynomial, Split, holder_ok, intro_solve, young_ok

__all__ = ["CheckResult", "CHECKS", "run_suite", "EXPONENT_MATRIX"]

EXPONENT_MATRIX = (Fraction(1, 2), Fraction(2, 3), 1, 2, 4, INF)


@dataclass
class CheckResult:
    check_name: str
    status: str
    value: float
    tolerance: float

    @classmethod
    def of(cls, name: str, value: float, tol: float) -> "CheckResult":
        value = float(value)
        ok = np.isfinite(value) and value <= tol
        return cls(name, "ok" if ok else "fail", value, float(tol))

    def as_dict(self) -> dict:
        return asdict(self)


def _rel(a, b) -> float:
    return float(np.linalg.norm(np.ravel(a) - np.ravel(b)) / np.linalg.norm(np.ravel(b)))


def _n(quick: bool, full: int, small: int) -> int:
    return small if quick else full


def _grid_std() -> Grid:
    return Grid(1, 12.0, 256)


def _grid_gabor() -> Grid:
    return Grid(1, 12.0, 384)


# 1
def check_fourier_convolution(seed: int, quick: bool = False) -> list[CheckResult]:
    g = _grid_std()
    rng = make_rng(seed, 1)
    worst = 0.0
    for _ in range(_n(quick, 50, 10)):
        f, h = random_field(g, rng), random_field(g, rng)
        lhs = fourier(convolve(f, h)).values
        rhs = np.sqrt(2 * np.pi) * fourier(f).values * fourier(h).values
        worst = max(worst, _rel(lhs, rhs))
    return [CheckResult.of("fourier_convolution", worst, 1e-8)]


# 2
def check_moyal(seed: int, quick: bool = False) -> list[CheckResult]:
    g = _grid_std()
    rng = make_rng(seed, 2)
    worst = 0.0
    for _ in range(_n(quick, 100, 20)):
        f, h, phi, psi = (random_field(g, rng) for _ in range(4))
        lhs, rhs = moyal(f, h, phi, psi)
        worst = max(worst, abs(lhs - rhs) / (1 + abs(rhs)))
    return [CheckResult.of("moyal", worst, 1e-8)]


# 3
def check_inversion_projection(seed: int, quick: bool = False) -> list[CheckResult]:
    g = _grid_std()
    rng = make_rng(seed, 3)
    inv = idem = adj = 0.0
    for _ in range(_n(quick, 50, 10)):
        f, phi = random_field(g, rng), random_field(g, rng)
        back = stft_adjoint(stft(f, phi), phi) * (1.0 / l2_norm(phi) ** 2)
        inv = max(inv, _rel(back.values, f.values))
        F, G = random_phase_field(g, rng), random_phase_field(g, rng)
        PF = project(F, phi)
        idem = max(idem, _rel(project(PF, phi).values, PF.values))
        a = np.vdot(G.values, PF.values)
        b = np.vdot(project(G, phi).values, F.values)
        adj = max(adj, abs(a - b) / abs(b))
    return [
        CheckResult.of("stft_inversion", inv, 1e-8),
        CheckResult.of("projection_idempotence", idem, 1e-8),
        CheckResult.of("projection_selfadjoint", adj, 1e-8),
    ]


# 4
def check_twisted(seed: int, quick: bool = False) -> list[CheckResult]:
    g = Grid(1, 6.0, 64)
    rng = make_rng(seed, 4)
    rep = assoc = 0.0
    for _ in range(_n(quick, 5, 2)):
        f, phi = random_field(g, rng), random_field(g, rng)
        A = twisted_convolve(stft(phi, phi), stft(f, phi))
        rep = max(rep, _rel(A.values, (stft(f, phi) * l2_norm(phi) ** 2).values))
        F, G, H = (random_phase_field(g, rng) for _ in range(3))
        left = twisted_convolve(twisted_convolve(F, G), H)
        right = twisted_convolve(F, twisted_convolve(G, H))
        assoc = max(assoc, _rel(left.values, right.values))
    return [
        CheckResult.of("twisted_reproducing", rep, 1e-6),
        CheckResult.of("twisted_associativity", assoc, 1e-6),
    ]


# 5
def check_holder_young(seed: int, quick: bool = False) -> list[CheckResult]:
    rng = make_rng(seed, 5)
    triples = list(itertools.product(EXPONENT_MATRIX, repeat=3))
    hold = [t for t in triples if holder_ok(*t)]
    young = [t for t in triples if young_ok(*t)]
    unweighted = (None, None, None)
    hw = (Bracket(1.0), Bracket(1.0), None)
    yw = (Polynomial(1.0), Polynomial(1.0), Polynomial(1.0))
    worst = 0.0
    for k in range(_n(quick, 20, 3)):
        a1 = random_sequence(rng, (4, 3), split=(1, 1))
        a2 = random_sequence(rng, (3, 4), split=(1, 1))
        ws_h, ws_y = (unweighted, unweighted) if k % 2 == 0 else (hw, yw)
        for t in hold:
            worst = max(worst, verify_holder(a1, a2, t, ws_h))
        for t in young:
            worst = max(worst, verify_young(a1, a2, t, ws_y))
    return [CheckResult.of("holder_young", worst, 1 + 1e-12)]


# 6
def check_gabor_reconstruction(seed: int, quick: bool = False) -> list[CheckResult]:
    g = _grid_gabor()
    pair = make_window_pair(g)
    rng = make_rng(seed, 6)
    worst = 0.0
    for _ in range(_n(quick, 50, 10)):
        f = random_field(g, rng)
        r1 = gabor_synthesize(gabor_coeffs(f, pair.phi), pair.psi)
        r2 = gabor_synthesize(gabor_coeffs(f, pair.psi), pair.phi)
        worst = max(worst, _rel(r1.values, f.values), _rel(r2.values, f.values))
    return [
        CheckResult.of("gabor_reconstruction", worst, 1e-6),
        CheckResult.of("partition_of_unity", pair.partition_error(), 1e-12),
    ]


# 7
def check_window_independence(seed: int, quick: bool = False) -> list[CheckResult]:
    g = _grid_gabor()
    pair = make_window_pair(g)
    rng = make_rng(seed, 7)
    pqs = [(2, 2), (1, 1), (Fraction(1, 2), Fraction(1, 2)), (1, INF)]
    worst = 1.0
    for _ in range(_n(quick, 50, 10)):
        f = random_field(g, rng)
        for p, q in pqs:
            r = mod_norm(f, p, q, window=pair.phi) / mod_norm(f, p, q, window=pair.psi)
            worst = max(worst, r, 1 / r)
    return [CheckResult.of("window_independence", worst, 10.0)]


def _band(ratios) -> float:
    r = np.asarray(ratios)
    return float(r.max() / r.min())


# 8
def check_l2_sobolev(seed: int, quick: bool = False) -> list[CheckResult]:
    g = _grid_gabor()
    pair = make_window_pair(g)
    rng = make_rng(seed, 8)
    fs = [random_field(g, rng) for _ in range(_n(quick, 50, 10))]
    l2 = [mod_norm(f, 2, 2, window=pair.phi) / l2_norm(f) for f in fs]
    out = [CheckResult.of("m22_l2_band", _band(l2), 1.5)]
    # the plateau window's spectrum has only Gevrey decay, which the <xi>^2s
    # weight amplifies; the Gaussian window keeps the leakage negligible
    gauss = gaussian_window(g)
    xi = g.freq_axis
    for s in (1, 2):
        w = Split(Polynomial(0.0), Bracket(float(s)))
        rs = []
        for f in fs:
            hs = np.sqrt(np.sum((1 + xi**2) ** s * np.abs(fourier(f).values) ** 2) * g.dxi)
            rs.append(mod_norm(f, 2, 2, w, window=gauss) / hs)
        out.append(CheckResult.of(f"sobolev_band_s{s}", _band(rs), 2.0))
    return out


# 9
THEOREM_CASES = ((2, 2, 2, 2), (1, 1, 1, 1))


def theorem_max_ratios(seed: int, stream: int, n: int) -> tuple[dict, float]:
    """Max ratio per (kind, case) over ``n`` Gaussian-chirp pairs, and the worst identity error."""
    g = _grid_gabor()
    pair = make_window_pair(g)
    rng = make_rng(seed, stream)
    pairs = [(gaussian_chirp(g, rng), gaussian_chirp(g, rng)) for _ in range(n)]
    best: dict = {}
    ident = 0.0
    for case in THEOREM_CASES:
        p1, q1, p2, q2 = case
        sol = intro_solve(*case)
        for kind, fn, (p0, q0) in (("mult", verify_mult, sol.mult), ("conv", verify_conv, sol.conv)):
            top = 0.0
            for f1, f2 in pairs:
                rep = fn(f1, f2, (p0, p1, p2), (q0, q1, q2), window=pair.phi)
                top = max(top, rep.ratio)
                ident = max(ident, rep.identity_rel, rep.extract_rel)
            best[(kind, case)] = top
    return best, ident


def check_theorems(seed: int, quick: bool = False) -> list[CheckResult]:
    n = _n(quick, 50, 10)
    a, ia = theorem_max_ratios(seed, 90, n)
    b, ib = theorem_max_ratios(seed, 91, n)
    spread = max(abs(a[k] / b[k] - 1) for k in a)
    finite = all(np.isfinite(v) for v in list(a.values()) + list(b.values()))
    return [
        CheckResult.of("theorem_ratio_stability", spread if finite else np.inf, 0.25),
        CheckResult.of("theorem_stft_identities", max(ia, ib), 1e-6),
    ]


# 10
def product_cases(seed: int, count: int = 20):
    """Seeded Gaussian/Hermite pairs with Gaussian windows on the ``N = 96`` grid."""
    g = Grid(1, 8.0, 96)
    rng = make_rng(seed, 10)
    x = g.axis
    for k in range(count):
        n1, n2 = (int(v) for v in rng.integers(0, 4, 2))
        f1 = hermite_gaussian(g, n1, rng.uniform(-1, 1), rng.uniform(0.7, 1.2))
        f2 = hermite_gaussian(g, n2, rng.uniform(-1, 1), rng.uniform(0.7, 1.2))
        f2 = f2 * np.exp(1j * rng.uniform(-2, 2) * x)
        phis = []
        for _ in range(3):
            c, s = rng.uniform(-0.5, 0.5), rng.uniform(0.7, 1.3)
            phis.append(Field(g, np.exp(-((x - c) ** 2) / (2 * s * s))))
        yield g, f1, f2, phis


def check_gabor_product(seed: int, quick: bool = False) -> list[CheckResult]:
    worst = 0.0
    bil = 0.0
    rng = make_rng(seed, 11)
    for g, f1, f2, (phi, phi1, phi2) in product_cases(seed, _n(quick, 20, 5)):
        lhs = stft(multiply(f1, f2), phi) * inner(phi2, phi1)
        rhs = gabor_product(stft(f1, phi1), stft(f2, phi2.conj()), phi)
        worst = max(worst, _rel(rhs.values, lhs.values))
        F, G, H = (random_phase_field(g, rng) for _ in range(3))
        a, b = complex(rng.normal(), rng.normal()), complex(rng.normal(), rng.normal())
        left = gabor_product(F * a + G * b, H, phi)
        right = gabor_product(F, H, phi) * a + gabor_product(G, H, phi) * b
        bil = max(bil, _rel(left.values, right.values))
    return [
        CheckResult.of("gabor_product_identity", worst, 1e-5),
        CheckResult.of("gabor_product_bilinearity", bil, 1e-12),
    ]


# 11
def nlse_residual_levels(T: float, dts=(4e-3, 2e-3, 1e-3), lam: float = 0.0, amp: float = 1.0):
    g = Grid(1, 8.0, 96)
    out = []
    for dt in dts:
        cfg = NlseConfig(lam, dt, T, g)
        traj = split_step(free_gaussian(g, 0.0) * amp, cfg)
        out.append(phase_residual(traj, cfg.lifting_window(), cfg).max())
    return out


def check_nlse(seed: int, quick: bool = False) -> list[CheckResult]:
    g = _grid_std()
    psi0 = free_gaussian(g, 0.0)
    T = 0.5
    mass = 0.0
    for lam in (1.0, -1.0):
        traj = split_step(psi0, NlseConfig(lam, 1e-3, T, g))
        m = traj.masses()
        mass = max(mass, float(np.max(np.abs(m - m[0]) / m[0])))
    traj = split_step(psi0, NlseConfig(0.0, 1e-3, T, g))
    free = _rel(traj.states[-1].values, free_gaussian(g, T).values)
    levels = nlse_residual_levels(0.02 if quick else 0.1)
    steps = max(levels[k + 1] / levels[k] for k in range(len(levels) - 1))
    return [
        CheckResult.of("nlse_mass", mass, 1e-10),
        CheckResult.of("nlse_free_gaussian", free, 1e-6),
        CheckResult.of("nlse_phase_residual", levels[-1], 1e-2),
        CheckResult.of("nlse_residual_refinement", steps, 1.0),
    ]


CHECKS = {
    "fourier-convolution": check_fourier_convolution,
    "moyal": check_moyal,
    "inversion-projection": check_inversion_projection,
    "twisted": check_twisted,
    "holder-young": check_holder_young,
    "gabor-reconstruction": check_gabor_reconstruction,
    "window-independence": check_window_independence,
    "l2-sobolev": check_l2_sobolev,
    "theorems": check_theorems,
    "gabor-product": check_gabor_product,
    "nlse": check_nlse,
}


def run_suite(seed: int = 0, quick: bool = False, only=None) -> list[CheckResult]:
    names = list(CHECKS) if only is None else list(only)
    results: list[CheckResult] = []
    for name in names:
        results.extend(CHECKS[name](seed, quick))
    return results
