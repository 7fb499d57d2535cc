"""Uniform grids, sampled fields and the unitary Fourier transform.

Functions live on the periodic box ``[-L, L)^d`` sampled at ``N`` points per
axis.  The transform uses the ``(2*pi)^(-d/2)`` normalization and a rectangle
rule, so that the discrete map is exactly unitary and every integral operator
in the package inherits the same quadrature.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .weights import Exponent, Weight, as_exponent

__all__ = [
    "Grid",
    "Field",
    "PhaseField",
    "fourier",
    "inverse_fourier",
    "convolve",
    "multiply",
    "inner",
    "l2_norm",
    "mixed_norm",
    "boundary_magnitude",
]


@dataclass(frozen=True)
class Grid:
    """Uniform sampling ``x_k = -L + k*h`` of ``[-L, L)^d``."""

    d: int
    L: float
    N: int

    def __post_init__(self):
        if self.d not in (1, 2):
            raise ValueError(f"only d=1 or d=2 is supported, got d={self.d}")
        if not self.L > 0:
            raise ValueError(f"half-width must be positive, got L={self.L}")
        if self.N < 8 or self.N % 2:
            raise ValueError(f"N must be even and >= 8, got N={self.N}")

    @property
    def h(self) -> float:
        return 2.0 * self.L / self.N

    @property
    def dxi(self) -> float:
        """Spacing of the dual frequency grid, ``pi / L``."""
        return np.pi / self.L

    @property
    def axis(self) -> np.ndarray:
        return -self.L + self.h * np.arange(self.N)

    @property
    def freq_axis(self) -> np.ndarray:
        return self.dxi * np.arange(-self.N // 2, self.N // 2)

    @property
    def dual(self) -> "Grid":
        # the frequency samples are again a uniform grid, with half-width pi*N/(2L)
        return Grid(self.d, np.pi * self.N / (2.0 * self.L), self.N)

    @property
    def shape(self) -> tuple[int, ...]:
        return (self.N,) * self.d

    @property
    def size(self) -> int:
        return self.N**self.d

    def points(self) -> np.ndarray:
        """Sample points as an array of shape ``(N,)*d + (d,)``."""
        return np.stack(np.meshgrid(*([self.axis] * self.d), indexing="ij"), axis=-1)

    def phase_points(self) -> np.ndarray:
        """(x, xi) pairs as an array of shape ``(N,)*2d + (2d,)``."""
        axes = [self.axis] * self.d + [self.freq_axis] * self.d
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def index_of(self, x: float) -> int:
        """Grid index of the point ``x`` along one axis; raises if ``x`` is off-grid."""
        k = (x + self.L) / self.h
        kr = round(k)
        if abs(k - kr) > 1e-9 or not 0 <= kr < self.N:
            raise ValueError(f"{x} is not a grid point of {self}")
        return int(kr)

    def shift_index(self) -> np.ndarray:
        """``S[k, l]`` is the index of the point ``x_l - x_k`` (periodic)."""
        n = np.arange(self.N)
        return (n[None, :] - n[:, None] + self.N // 2) % self.N


def _check_values(values, grid: Grid, ndim: int, kind: str) -> np.ndarray:
    arr = np.asarray(values, dtype=complex)
    shape = (grid.N,) * ndim
    if arr.shape != shape:
        if arr.size != grid.N**ndim:
            raise ValueError(f"{kind} needs {grid.N**ndim} values, got {arr.size}")
        arr = arr.reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{kind} values must be finite")
    arr = arr.copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class Field:
    """Complex samples of a function on ``grid``."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(self, "values", _check_values(self.values, self.grid, self.grid.d, "Field"))

    @classmethod
    def from_function(cls, grid: Grid, fn) -> "Field":
        pts = grid.points()
        if grid.d == 1:
            return cls(grid, fn(pts[..., 0]))
        return cls(grid, fn(*np.moveaxis(pts, -1, 0)))

    def __add__(self, other: "Field") -> "Field":
        _same_grid(self.grid, other.grid)
        return Field(self.grid, self.values + other.values)

    def __sub__(self, other: "Field") -> "Field":
        _same_grid(self.grid, other.grid)
        return Field(self.grid, self.values - other.values)

    def __mul__(self, c) -> "Field":
        return Field(self.grid, self.values * c)

    __rmul__ = __mul__

    def conj(self) -> "Field":
        return Field(self.grid, self.values.conj())


@dataclass(frozen=True, eq=False)
class PhaseField:
    """Samples on the phase-space grid, x-major: ``values[x..., xi...]``."""

    grid: Grid
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        object.__setattr__(
            self, "values", _check_values(self.values, self.grid, 2 * self.grid.d, "PhaseField")
        )

    @property
    def freq_grid(self) -> Grid:
        return self.grid.dual

    @property
    def cell(self) -> float:
        """Quadrature weight ``(h * dxi)^d`` of one phase-space sample."""
        return (self.grid.h * self.grid.dxi) ** self.grid.d

    def __add__(self, other: "PhaseField") -> "PhaseField":
        _same_grid(self.grid, other.grid)
        return PhaseField(self.grid, self.values + other.values)

    def __sub__(self, other: "PhaseField") -> "PhaseField":
        _same_grid(self.grid, other.grid)
        return PhaseField(self.grid, self.values - other.values)

    def __mul__(self, c) -> "PhaseField":
        return PhaseField(self.grid, self.values * c)

    __rmul__ = __mul__


def _same_grid(a: Grid, b: Grid) -> None:
    if a != b:
        raise ValueError(f"grid mismatch: {a} vs {b}")


def _signs(N: int) -> np.ndarray:
    return np.where(np.arange(N) % 2 == 0, 1.0, -1.0)


def _dft(values: np.ndarray, grid: Grid, axes: Sequence[int], inverse: bool) -> np.ndarray:
    """Rectangle-rule transform between ``grid`` and ``grid.dual`` along ``axes``.

    With ``x_k = -L + k h`` and ``xi_m = -N/2 dxi + m dxi`` the kernel
    ``exp(-i x_k xi_m)`` factors as ``(-1)^(N/2) (-1)^k (-1)^m exp(-2 pi i k m / N)``,
    so one FFT per axis does the job.  The same holds with the roles swapped.
    """
    N = grid.N
    s = _signs(N)
    out = np.asarray(values, dtype=complex)
    for ax in axes:
        shape = [1] * out.ndim
        shape[ax] = N
        sv = s.reshape(shape)
        if inverse:
            out = np.fft.ifft(out * sv, axis=ax) * (N * sv)
        else:
            out = np.fft.fft(out * sv, axis=ax) * sv
    sign = (-1.0) ** ((N // 2) * len(axes))
    return out * sign * (grid.h / np.sqrt(2 * np.pi)) ** len(axes)


def fourier(f: Field) -> Field:
    """``(2 pi)^(-d/2) sum_k f(x_k) exp(-i <x_k, xi_m>) h^d`` on the dual grid."""
    g = f.grid
    return Field(g.dual, _dft(f.values, g, range(g.d), inverse=False))


def inverse_fourier(fhat: Field) -> Field:
    """Inverse of :func:`fourier`; ``fhat`` lives on a dual grid."""
    g = fhat.grid
    return Field(g.dual, _dft(fhat.values, g, range(g.d), inverse=True))


def inner(f: Field, g: Field) -> complex:
    """``(f, g)_{L^2}``, conjugate-linear in the second argument."""
    _same_grid(f.grid, g.grid)
    return complex(np.sum(f.values * g.values.conj()) * f.grid.h**f.grid.d)


def l2_norm(f: Field | PhaseField) -> float:
    if isinstance(f, PhaseField):
        return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * f.cell))
    return float(np.sqrt(np.sum(np.abs(f.values) ** 2) * f.grid.h**f.grid.d))


def multiply(f: Field, g: Field) -> Field:
    _same_grid(f.grid, g.grid)
    return Field(f.grid, f.values * g.values)


def convolve(f: Field, g: Field) -> Field:
    """Periodic ``(f*g)(x) = sum_y f(y) g(x - y) h^d`` by direct summation."""
    _same_grid(f.grid, g.grid)
    grid = f.grid
    S = grid.shift_index()
    # gm[l, k] = g(x_k - y_l)
    if grid.d == 1:
        out = f.values @ g.values[S]
    else:
        G = g.values[S[:, None, :, None], S[None, :, None, :]]  # [l1, l2, k1, k2]
        out = np.tensordot(f.values, G, axes=([0, 1], [0, 1]))
    return Field(grid, out * grid.h**grid.d)


def _reduce(a: np.ndarray, p: Exponent, axes: tuple[int, ...], measure: float) -> np.ndarray:
    if p.is_inf:
        return a.max(axis=axes)
    pv = float(p.value)
    return (np.sum(a**pv, axis=axes) * measure) ** (1.0 / pv)


def mixed_norm(
    F: PhaseField,
    p,
    q,
    weight: Weight | None = None,
    variant: str = "standard",
) -> float:
    """Weighted mixed quasi-norm of a phase-space field.

    ``standard`` takes ``L^p`` in x first and then ``L^q`` in xi; ``star``
    takes ``L^q`` in xi first and then ``L^p`` in x.
    """
    p, q = as_exponent(p), as_exponent(q)
    d = F.grid.d
    a = np.abs(F.values)
    if weight is not None:
        w = weight(F.grid.phase_points())
        if np.any(~(w > 0)):
            raise ValueError("weight must be positive at every sample")
        a = a * w
    scale = a.max()
    if scale == 0:
        return 0.0
    a = a / scale
    xs = tuple(range(d))
    hx, hxi = F.grid.h**d, F.grid.dxi**d
    if variant == "standard":
        inner_ = _reduce(a, p, xs, hx)
        out = _reduce(inner_, q, tuple(range(d)), hxi)
    elif variant == "star":
        inner_ = _reduce(a, q, tuple(range(d, 2 * d)), hxi)
        out = _reduce(inner_, p, xs, hx)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return float(out) * float(scale)


def boundary_magnitude(f: Field | PhaseField) -> float:
    """Largest modulus on the samples adjacent to the box edge in x."""
    v = np.abs(f.values)
    d = f.grid.d
    edge = 0.0
    for ax in range(d):
        edge = max(edge, float(np.take(v, [0, -1], axis=ax).max()))
    return edge
