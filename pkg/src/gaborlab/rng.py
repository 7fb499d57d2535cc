"""Seeded test data.

Every stream is a ``numpy.random.Generator`` over the counter-based Philox
bit generator keyed by ``SeedSequence([seed, stream])``, so one 64-bit seed
fixes all random inputs and independent checks draw from disjoint streams.
"""
from __future__ import annotations

import numpy as np

from .grid import Field, Grid, PhaseField
from .sequences import LatticeSeq

__all__ = [
    "make_rng",
    "wavepacket",
    "random_field",
    "gaussian_chirp",
    "hermite_gaussian",
    "random_phase_field",
    "random_sequence",
]


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(stream)])))


def _complex(rng: np.random.Generator) -> complex:
    return complex(rng.normal(), rng.normal())


def wavepacket(grid: Grid, rng: np.random.Generator) -> Field:
    """``c exp(-|x - a|^2 / (2 s^2) + i <b, x>)`` with ``a`` in ``[-2, 2]^d``, ``s`` in
    ``[0.5, 1.2]`` and ``b`` in ``[-3, 3]^d``."""
    d = grid.d
    a = rng.uniform(-2, 2, d)
    s = rng.uniform(0.5, 1.2)
    b = rng.uniform(-3, 3, d)
    c = _complex(rng)
    pts = grid.points()
    r2 = np.sum((pts - a) ** 2, axis=-1)
    return Field(grid, c * np.exp(-r2 / (2 * s * s) + 1j * (pts @ b)))


def random_field(grid: Grid, rng: np.random.Generator, terms: int = 3) -> Field:
    """Sum of a few wavepackets: smooth, decaying and effectively band-limited."""
    f = wavepacket(grid, rng)
    for _ in range(terms - 1):
        f = f + wavepacket(grid, rng)
    return f


def gaussian_chirp(grid: Grid, rng: np.random.Generator) -> Field:
    """Gaussian envelope times a linear chirp ``exp(i c |x|^2 / 2)``."""
    d = grid.d
    a = rng.uniform(-1.5, 1.5, d)
    s = rng.uniform(0.6, 1.2)
    chirp = rng.uniform(-1, 1)
    b = rng.uniform(-2, 2, d)
    pts = grid.points()
    r2 = np.sum((pts - a) ** 2, axis=-1)
    x2 = np.sum(pts**2, axis=-1)
    return Field(grid, _complex(rng) * np.exp(-r2 / (2 * s * s) + 1j * (chirp * x2 / 2 + pts @ b)))


def hermite_gaussian(grid: Grid, n: int, shift: float = 0.0, scale: float = 1.0) -> Field:
    """Physicists' Hermite function ``H_n(x) exp(-x^2 / 2)`` (first axis), unnormalized."""
    from numpy.polynomial.hermite import hermval

    coef = np.zeros(n + 1)
    coef[n] = 1.0

    def fn(*xs):
        u = (xs[0] - shift) / scale
        env = np.exp(-sum(((x - shift) / scale) ** 2 for x in xs) / 2)
        return hermval(u, coef) * env

    return Field.from_function(grid, fn)


def random_phase_field(grid: Grid, rng: np.random.Generator, bumps: int = 3) -> PhaseField:
    """Sum of Gaussian bumps in phase space with random phases; generally not an STFT."""
    pts = grid.phase_points()
    d = grid.d
    out = np.zeros(pts.shape[:-1], dtype=complex)
    for _ in range(bumps):
        cx = rng.uniform(-2, 2, d)
        cxi = rng.uniform(-3, 3, d)
        s = rng.uniform(0.5, 1.5)
        r2 = np.sum((pts[..., :d] - cx) ** 2, axis=-1) + np.sum((pts[..., d:] - cxi) ** 2, axis=-1)
        tilt = rng.uniform(-2, 2, 2 * d)
        out += _complex(rng) * np.exp(-r2 / (2 * s * s) + 1j * (pts @ tilt))
    return PhaseField(grid, out)


def random_sequence(rng: np.random.Generator, shape: tuple[int, ...], split=None,
                    origin=None, density: float = 0.7) -> LatticeSeq:
    """Complex sequence on a box with roughly ``density`` of its entries non-zero."""
    shape = tuple(shape)
    vals = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    vals *= rng.random(shape) < density
    if origin is None:
        origin = tuple(int(o) for o in rng.integers(-3, 3, len(shape)))
    split = tuple(split) if split is not None else (len(shape), 0)
    return LatticeSeq(vals, origin, split)
