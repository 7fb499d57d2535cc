"""Gabor analysis on the lattice ``Z^d x pi Z^d``: window pairs, coefficients,
synthesis, modulation and Wiener amalgam quasi-norms, operator matrices and
empirical checks of the multiplication and convolution theorems.

Lattice points must be grid samples.  That holds when ``L`` is an integer and
``N`` is a multiple of ``2L``: positions ``j`` sit at grid index
``(j + L) * N / (2L)`` and frequencies ``pi m`` at ``m L`` steps of ``pi / L``.
On such grids analysis followed by synthesis is exact up to rounding, since
each windowed piece ``f phi(. - j)`` lives on an interval of length 2 where
the frequencies ``pi m`` form a complete Fourier basis.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .grid import Field, Grid, PhaseField, _same_grid, convolve, l2_norm, multiply
from .sequences import LatticeSeq, seq_norm
from .stft import SizeLimitError, stft, stft_adjoint, stft_values
from .weights import (
    ConditionError,
    Weight,
    WeightClass,
    as_exponent,
    classify,
    conv_exponent_violations,
    mult_exponent_violations,
    sample_points,
    weight_cond_conv,
    weight_cond_mult,
)

__all__ = [
    "smoothstep",
    "plateau",
    "WindowPair",
    "make_window_pair",
    "gaussian_window",
    "GaborCoeffs",
    "gabor_coeffs",
    "gabor_synthesize",
    "mod_norm",
    "wiener_norm",
    "operator_gabor_matrix",
    "apply_gabor_matrix",
    "TheoremReport",
    "verify_mult",
    "verify_conv",
    "projection_bound",
    "weight_violations",
]

MIN_POINTS_PER_UNIT = 16
MAX_MATRIX_POINTS = 4096


# --------------------------------------------------------------------------
# windows


def smoothstep(t) -> np.ndarray:
    """C-infinity step: 0 for ``t <= 0``, 1 for ``t >= 1``, built from ``exp(-1/t)``."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        a = np.where(t > 0, np.exp(-1.0 / np.where(t > 0, t, 1.0)), 0.0)
        b = np.where(t < 1, np.exp(-1.0 / np.where(t < 1, 1.0 - t, 1.0)), 0.0)
    return a / (a + b)


def plateau(x, inner: float, outer: float) -> np.ndarray:
    """1 on ``|x| <= inner``, 0 on ``|x| >= outer``, smooth and monotone between."""
    return smoothstep((outer - np.abs(x)) / (outer - inner))


def _phi_1d(x) -> np.ndarray:
    p = plateau(x, 0.25, 0.75)
    # s(t) + s(1 - t) = 1 makes the translates sum to one already; dividing
    # anyway removes the rounding drift of the sum
    total = np.zeros_like(p)
    span = int(np.ceil(np.max(np.abs(x)))) + 2
    for j in range(-span, span + 1):
        total += plateau(x - j, 0.25, 0.75)
    return p / total


def _psi_1d(x) -> np.ndarray:
    return plateau(x, 0.75, 1.0)


def _tensor(grid: Grid, fn) -> np.ndarray:
    v = fn(grid.axis)
    if grid.d == 1:
        return v
    return np.multiply.outer(v, v)


@dataclass(frozen=True, eq=False)
class WindowPair:
    """Analysis window ``phi`` (partition of unity) and synthesis window ``psi``."""

    phi: Field
    psi: Field
    window_id: str = "plateau-smoothstep"

    @property
    def grid(self) -> Grid:
        return self.phi.grid

    def partition_error(self) -> float:
        """``max_x |sum_j phi(x - j) - 1|`` over grid points."""
        g = self.grid
        span = int(np.ceil(g.L)) + 2
        total = 0.0
        for j in range(-span, span + 1):
            total = total + _phi_1d(g.axis - j)
        err = np.abs(total - 1.0)
        if g.d == 2:
            err = np.abs(np.multiply.outer(total, total) - 1.0)
        return float(err.max())


def make_window_pair(grid: Grid) -> WindowPair:
    """Plateau pair with ``phi = 1`` on ``[-1/4, 1/4]^d``, ``supp phi`` in ``[-3/4, 3/4]^d``,
    ``psi = 1`` on ``[-3/4, 3/4]^d`` and ``supp psi`` in ``[-1, 1]^d``."""
    if grid.N / (2 * grid.L) < MIN_POINTS_PER_UNIT - 1e-9:
        raise ValueError(
            f"insufficient resolution: {grid.N / (2 * grid.L):g} points per unit, "
            f"need at least {MIN_POINTS_PER_UNIT}"
        )
    if grid.L < 1:
        raise ValueError("insufficient resolution: grid must contain [-1, 1]^d")
    phi = Field(grid, _tensor(grid, _phi_1d))
    psi = Field(grid, _tensor(grid, _psi_1d))
    return WindowPair(phi, psi)


def gaussian_window(grid: Grid, sigma: float = 1.0) -> Field:
    """Real Gaussian normalized to unit discrete ``L^2`` norm."""
    g = Field.from_function(grid, lambda *xs: np.exp(-sum(x * x for x in xs) / (2 * sigma**2)))
    return g * (1.0 / l2_norm(g))


# --------------------------------------------------------------------------
# Gabor coefficients


def _lattice_params(grid: Grid) -> tuple[int, int]:
    L = int(round(grid.L))
    if abs(grid.L - L) > 1e-12 or grid.N % (2 * L):
        raise ValueError(
            f"lattice/grid incommensurability: need integer L and N divisible by 2L "
            f"(got L={grid.L}, N={grid.N})"
        )
    return L, grid.N // (2 * L)


def _lattice_axes(grid: Grid, radii) -> tuple[np.ndarray, np.ndarray]:
    L, M0 = _lattice_params(grid)
    j = np.arange(-L, L)
    m = np.arange(-M0, M0)
    if radii is not None:
        J, M = radii
        j = j[np.abs(j) <= J]
        m = m[np.abs(m) <= M]
        if not len(j) or not len(m):
            raise ValueError(f"empty lattice for radii {radii}")
    return j, m


@dataclass(frozen=True, eq=False)
class GaborCoeffs:
    """``V_w f(j, pi m)`` on the lattice, stored as a :class:`LatticeSeq` with split ``(d, d)``."""

    seq: LatticeSeq
    grid: Grid
    radii: tuple[int, int] | None = None
    window_id: str = "custom"

    @property
    def values(self) -> np.ndarray:
        return self.seq.values

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        d = self.grid.d
        o, s = self.seq.origin, self.seq.values.shape
        return o[0] + np.arange(s[0]), o[d] + np.arange(s[d])


def gabor_coeffs(f: Field, w: Field, radii=None, window_id: str = "custom") -> GaborCoeffs:
    """Sample ``V_w f`` at ``(j, pi m)``; ``radii = (J, M)`` keeps ``|j| <= J``, ``|m| <= M``."""
    g = f.grid
    d = g.d
    j, m = _lattice_axes(g, radii)
    L, M0 = _lattice_params(g)
    rows = (j + L) * M0
    cols = m * L + g.N // 2
    V = stft_values(f, w, rows=[rows] * d)
    if d == 1:
        V = V[:, cols]
    else:
        V = V[:, :, cols[:, None], cols[None, :]]
    origin = (int(j[0]),) * d + (int(m[0]),) * d
    basis = np.array([1.0] * d + [np.pi] * d)
    seq = LatticeSeq(V, origin, (d, d), basis)
    return GaborCoeffs(seq, g, tuple(radii) if radii is not None else None, window_id)


def gabor_synthesize(c: GaborCoeffs, dual: Field) -> Field:
    """``(pi/2)^(d/2) sum_{j, m} c(j, m) dual(x - j) exp(i <x, pi m>)``."""
    g = c.grid
    _same_grid(g, dual.grid)
    d = g.d
    _, M0 = _lattice_params(g)
    j, m = c.axes()
    E = np.exp(1j * np.pi * np.outer(m, g.axis))
    if d == 1:
        S = c.values @ E
        out = np.zeros(g.N, dtype=complex)
        for a, ja in enumerate(j):
            out += S[a] * np.roll(dual.values, ja * M0)
    else:
        S = np.einsum("abmn,mx,ny->abxy", c.values, E, E)
        out = np.zeros(g.shape, dtype=complex)
        for a, ja in enumerate(j):
            for b, jb in enumerate(j):
                out += S[a, b] * np.roll(dual.values, (ja * M0, jb * M0), axis=(0, 1))
    return Field(g, out * (np.pi / 2) ** (d / 2))


# --------------------------------------------------------------------------
# norms


def _warn_weight(weight) -> None:
    if isinstance(weight, Weight) and classify(weight) >= WeightClass.P_E0:
        warnings.warn(
            f"weight {weight} is in {classify(weight)}; lattice norm equivalence "
            "is only established for subexponential weights",
            stacklevel=3,
        )


def mod_norm(
    f: Field,
    p,
    q,
    weight: Weight | None = None,
    flavor: str = "M",
    window: Field | None = None,
    radii=None,
) -> float:
    """Modulation (``flavor="M"``) or ``W`` quasi-norm through lattice coefficients.

    ``M`` takes ``l^p`` over positions then ``l^q`` over frequencies; ``W``
    swaps the nesting.  The weight is evaluated at the lattice points
    ``(j, pi m)``.  The default window is the plateau ``phi`` of
    :func:`make_window_pair`.
    """
    if flavor not in ("M", "W"):
        raise ValueError(f"flavor must be 'M' or 'W', got {flavor!r}")
    _warn_weight(weight)
    if window is None:
        window = make_window_pair(f.grid).phi
    c = gabor_coeffs(f, window, radii)
    variant = "standard" if flavor == "M" else "star"
    return seq_norm(c.seq.with_weight(weight), p, q, variant)


def _cell_overlap(t: np.ndarray, delta: float) -> tuple[np.ndarray, np.ndarray]:
    """Overlap lengths ``|[c, c+1) cap [t_n, t_n + delta)|`` for the unit cells ``c`` met by the samples."""
    cells = np.arange(np.floor(t[0]), np.ceil(t[-1] + delta))
    lo = np.maximum(cells[:, None], t[None, :])
    hi = np.minimum(cells[:, None] + 1, t[None, :] + delta)
    return cells.astype(int), np.clip(hi - lo, 0.0, None)


def _cell_max(G: np.ndarray, masks: list[np.ndarray]) -> np.ndarray:
    out = G
    for ax, M in enumerate(masks):
        out = np.stack([np.take(out, np.flatnonzero(row), axis=ax).max(axis=ax) for row in M], axis=ax)
    return out


def wiener_norm(
    F: PhaseField,
    r,
    p,
    q,
    weight: Weight | None = None,
    variant: str = "standard",
) -> float:
    """Wiener amalgam quasi-norm: local ``L^r`` on unit cells, then ``l^{p,q}``.

    Samples are read as piecewise constant on ``[x_k, x_k + h) x [xi_n, xi_n + dxi)``,
    so each local ``L^r`` integral is exact for that reading and summing over
    cells reproduces the global quadrature.  ``r = inf`` takes the sup over
    samples whose rectangle meets the cell.
    """
    _warn_weight(weight)
    r = as_exponent(r)
    g = F.grid
    d = g.d
    A = np.abs(F.values)
    if weight is not None:
        w = weight(g.phase_points())
        if np.any(~(w > 0)):
            raise ValueError("weight must be positive at every sample")
        A = A * w
    cx, Ox = _cell_overlap(g.axis, g.h)
    cxi, Oxi = _cell_overlap(g.freq_axis, g.dxi)
    overlaps = [Ox] * d + [Oxi] * d
    scale = A.max()
    if scale == 0:
        return 0.0
    A = A / scale
    if r.is_inf:
        a = _cell_max(A, [O > 0 for O in overlaps])
    else:
        rv = float(r.value)
        a = A**rv
        for ax, O in enumerate(overlaps):
            a = np.moveaxis(np.tensordot(O, a, axes=([1], [ax])), 0, ax)
        a = a ** (1.0 / rv)
    origin = (int(cx[0]),) * d + (int(cxi[0]),) * d
    return seq_norm(LatticeSeq(a, origin, (d, d)), p, q, variant) * float(scale)


def projection_bound(F: PhaseField, phi: Field, p, q, variant: str = "standard", r=2,
                     weight: Weight | None = None) -> float:
    """``wiener_norm(P_phi F) / wiener_norm(F)`` with local exponent ``r``.

    With ``r = p = q = 2`` both norms are the ``L^2`` norm, so the ratio is at
    most one.
    """
    from .stft import project

    den = wiener_norm(F, r, p, q, weight, variant)
    if den == 0:
        raise ValueError("zero field")
    return wiener_norm(project(F, phi), r, p, q, weight, variant) / den


# --------------------------------------------------------------------------
# operator matrix


def _kernel_matrix(K, grid: Grid) -> np.ndarray:
    n = grid.size
    vals = K.values if isinstance(K, PhaseField) else np.asarray(K, dtype=complex)
    if vals.size != n * n:
        raise ValueError(f"kernel needs {n * n} entries, got {vals.size}")
    return vals.reshape(n, n)


def operator_gabor_matrix(K, pair: WindowPair, radii=None, allow_large: bool = False) -> np.ndarray:
    """Matrix of the operator ``(T f)(x_k) = sum_l K(x_k, x_l) f(x_l) h^d`` on the lattice.

    Row ``(k, kappa)``, column ``(j, iota)`` holds
    ``(pi/2)^(d/2) V_phi(T(psi(. - j) e^{i <., iota>}))(k, kappa)``, so that
    ``V_phi(T f) = A V_phi f`` on the lattice and ``T f`` is recovered by
    synthesizing ``A c`` with ``psi``.  Indices are flattened in C order over
    ``(j..., m...)``.
    """
    g = pair.grid
    d = g.d
    j, m = _lattice_axes(g, radii)
    _, M0 = _lattice_params(g)
    P = (len(j) * len(m)) ** d
    if P > MAX_MATRIX_POINTS and not allow_large:
        raise SizeLimitError(
            f"Gabor matrix with {P} lattice points exceeds {MAX_MATRIX_POINTS}; "
            "pass allow_large=True to override"
        )
    Km = _kernel_matrix(K, g)
    pts = g.points()
    idx = np.stack(np.meshgrid(*([j] * d + [m] * d), indexing="ij"), axis=-1).reshape(-1, 2 * d)
    A = np.empty((P, P), dtype=complex)
    for col, lam in enumerate(idx):
        shift = tuple(int(s) * M0 for s in lam[:d])
        atom = np.roll(pair.psi.values, shift, axis=tuple(range(d)))
        atom = atom * np.exp(1j * np.pi * (pts @ lam[d:].astype(float)))
        Tatom = (Km @ atom.reshape(-1)) * g.h**d
        c = gabor_coeffs(Field(g, Tatom), pair.phi, radii)
        A[:, col] = c.values.reshape(-1)
    return A * (np.pi / 2) ** (d / 2)


def apply_gabor_matrix(A: np.ndarray, f: Field, pair: WindowPair, radii=None) -> Field:
    """Reconstruct ``T f`` from the Gabor matrix: synthesize ``A V_phi f`` with ``psi``."""
    c = gabor_coeffs(f, pair.phi, radii)
    out = (A @ c.values.reshape(-1)).reshape(c.values.shape)
    seq = LatticeSeq(out, c.seq.origin, c.seq.split, c.seq.basis)
    return gabor_synthesize(GaborCoeffs(seq, c.grid, c.radii), pair.psi)


# --------------------------------------------------------------------------
# multiplication and convolution theorems


def _ones(z):
    return np.ones(np.shape(z)[:-1])


def weight_violations(kind: str, weights, d: int = 1, growth: float = 2.0) -> tuple[list[str], float]:
    """Sampled weight hypothesis check; returns (violations, estimate on the base box).

    The constant is estimated on the box ``[-8, 8]`` and again on ``[-16, 16]``;
    growth by more than ``growth`` is treated as an unbounded ratio.
    """
    if weights is None:
        return [], 1.0
    w0, w1, w2 = (w if w is not None else _ones for w in weights)
    fn = weight_cond_mult if kind == "mult" else weight_cond_conv
    step = 0.5 if d == 1 else 2.0
    c8 = fn(w0, w1, w2, d)
    c16 = fn(w0, w1, w2, d, samples=sample_points(3 * d, half=16.0, step=2 * step))
    if np.isfinite(c8) and np.isfinite(c16) and c16 <= growth * max(c8, 1.0):
        return [], c8
    if kind == "mult":
        name = "w0(x, xi1 + xi2) <= C w1(x, xi1) w2(x, xi2)"
    else:
        name = "w0(x1 + x2, xi) <= C w1(x1, xi) w2(x2, xi)"
    return [name], c8


@dataclass
class TheoremReport:
    """Outcome of one multiplication or convolution check."""

    kind: str
    flavor: str
    p: tuple
    q: tuple
    ratio: float
    norms: tuple[float, float, float]
    identity_rel: float
    extract_rel: float
    weight_constant: float = 1.0
    notes: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "flavor": self.flavor,
            "p": [str(x) for x in self.p],
            "q": [str(x) for x in self.q],
            "ratio": self.ratio,
            "norms": list(self.norms),
            "identity_rel": self.identity_rel,
            "extract_rel": self.extract_rel,
            "weight_constant": self.weight_constant,
            "notes": list(self.notes),
        }


def _rel(a: np.ndarray, b: np.ndarray) -> float:
    nb = np.linalg.norm(b)
    return float(np.linalg.norm(a - b) / nb) if nb else float(np.linalg.norm(a))


def _xi_convolve(F1: PhaseField, F2: PhaseField) -> np.ndarray:
    """``sum_eta F1(x, xi - eta) F2(x, eta) dxi^d`` with periodic frequency wrap."""
    g = F1.grid
    if g.d != 1:
        raise NotImplementedError("frequency convolution check is implemented for d=1")
    S = g.shift_index()  # S[eta, xi] indexes xi - eta
    out = np.empty((g.N, g.N), dtype=complex)
    for k in range(g.N):
        out[k] = F2.values[k] @ F1.values[k][S]
    return out * g.dxi


def _x_convolve(F1: PhaseField, F2: PhaseField) -> np.ndarray:
    """``sum_y F1(x - y, xi) F2(y, xi) h^d`` with periodic position wrap."""
    g = F1.grid
    if g.d != 1:
        raise NotImplementedError("position convolution check is implemented for d=1")
    S = g.shift_index()  # S[y, x] indexes x - y
    out = np.empty((g.N, g.N), dtype=complex)
    for n in range(g.N):
        out[:, n] = F2.values[:, n] @ F1.values[:, n][S]
    return out * g.h


def _theorem(kind, f1, f2, p, q, weights, flavor, phi1, phi2, window):
    g = f1.grid
    _same_grid(g, f2.grid)
    p = tuple(map(as_exponent, p))
    q = tuple(map(as_exponent, q))
    viol = (mult_exponent_violations if kind == "mult" else conv_exponent_violations)(flavor, p, q)
    wviol, wconst = weight_violations(kind, weights, g.d)
    if viol or wviol:
        raise ConditionError(viol + wviol)
    w0, w1, w2 = weights if weights is not None else (None, None, None)
    phi1 = gaussian_window(g) if phi1 is None else phi1
    phi2 = gaussian_window(g) if phi2 is None else phi2
    if window is None:
        window = make_window_pair(g).phi

    if kind == "mult":
        f0 = multiply(f1, f2)
        phi0 = multiply(phi1, phi2) * (2 * np.pi) ** (g.d / 2)
    else:
        f0 = convolve(f1, f2)
        phi0 = convolve(phi1, phi2) * (2 * np.pi) ** (-g.d / 2)
    n1 = mod_norm(f1, p[1], q[1], w1, flavor, window)
    n2 = mod_norm(f2, p[2], q[2], w2, flavor, window)
    n0 = mod_norm(f0, p[0], q[0], w0, flavor, window)

    F1, F2 = stft(f1, phi1), stft(f2, phi2)
    F0 = stft(f0, phi0)
    rhs = _xi_convolve(F1, F2) if kind == "mult" else _x_convolve(F1, F2)
    identity_rel = _rel(F0.values, rhs)
    rec = stft_adjoint(PhaseField(g, rhs), phi0) * (1.0 / l2_norm(phi0) ** 2)
    extract_rel = _rel(rec.values, f0.values)
    return TheoremReport(kind, flavor, p, q, n0 / (n1 * n2), (n0, n1, n2), identity_rel,
                         extract_rel, wconst)


def verify_mult(f1: Field, f2: Field, p, q, weights=None, flavor: str = "M",
                phi1: Field | None = None, phi2: Field | None = None,
                window: Field | None = None) -> TheoremReport:
    """Check ``||f1 f2|| <= C ||f1|| ||f2||`` and the frequency-convolution form of ``V(f1 f2)``.

    With ``phi0 = (2 pi)^(d/2) phi1 phi2`` one has
    ``V_phi0(f1 f2)(x, .) = V_phi1 f1(x, .) * V_phi2 f2(x, .)`` (convolution in
    the frequency variable); ``f1 f2`` is then recovered as
    ``||phi0||^-2 V_phi0^* F0``.  Raises :class:`ConditionError` on inadmissible
    exponents or weights.
    """
    return _theorem("mult", f1, f2, p, q, weights, flavor, phi1, phi2, window)


def verify_conv(f1: Field, f2: Field, p, q, weights=None, flavor: str = "M",
                phi1: Field | None = None, phi2: Field | None = None,
                window: Field | None = None) -> TheoremReport:
    """Convolution analogue of :func:`verify_mult` with ``phi0 = (2 pi)^(-d/2) phi1 * phi2``
    and convolution in the position variable."""
    return _theorem("conv", f1, f2, p, q, weights, flavor, phi1, phi2, window)
