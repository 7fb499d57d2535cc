"""Short-time Fourier transform, its adjoint, the STFT projection and the
twisted convolution on the sampled phase space.

Window translates ``phi(. - x_k)`` are taken periodically on the grid, which
turns the discrete operators into exact analogues of their continuous
counterparts: ``V*V = ||phi||^2 Id`` holds to rounding error.
"""
from __future__ import annotations

import numpy as np

from .grid import Field, Grid, PhaseField, _dft, _same_grid, inner, l2_norm

__all__ = [
    "stft",
    "stft_adjoint",
    "project",
    "twisted_convolve",
    "moyal",
    "window_edge_decay",
    "SizeLimitError",
]

MAX_TWISTED_POINTS = 128


class SizeLimitError(ValueError):
    pass


def _window_matrix(phi: np.ndarray, grid: Grid, rows=None) -> np.ndarray:
    """``W[k..., l...] = phi(x_l - x_k)``, optionally only for the x indices ``rows``."""
    S = grid.shift_index()
    if rows is None:
        rows = [np.arange(grid.N)] * grid.d
    if grid.d == 1:
        return phi[S[rows[0]]]
    r1, r2 = rows
    return phi[S[r1][:, None, :, None], S[r2][None, :, None, :]]


def _check_window(phi: Field) -> None:
    if not np.any(phi.values):
        raise ValueError("zero window")


def stft_values(f: Field, phi: Field, rows=None) -> np.ndarray:
    """Raw STFT samples; ``rows`` restricts x to the given index arrays (one per axis)."""
    _same_grid(f.grid, phi.grid)
    _check_window(phi)
    g = f.grid
    W = _window_matrix(phi.values, g, rows)
    d = g.d
    prod = W.conj() * f.values.reshape((1,) * d + g.shape)
    return _dft(prod, g, range(d, 2 * d), inverse=False)


def stft(f: Field, phi: Field) -> PhaseField:
    """``V_phi f(x, xi) = (2 pi)^(-d/2) sum_y f(y) conj(phi(y - x)) e^{-i<y, xi>} h^d``.

    One FFT of ``f * conj(phi(. - x_k))`` per position ``x_k``.
    """
    return PhaseField(f.grid, stft_values(f, phi))


def stft_adjoint(F: PhaseField, phi: Field) -> Field:
    """``V_phi^* F(x) = (2 pi)^(-d/2) sum_{y,eta} F(y, eta) phi(x - y) e^{i<x, eta>} h^d dxi^d``."""
    _same_grid(F.grid, phi.grid)
    g = F.grid
    d = g.d
    # inverse transform in eta evaluates sum_eta F(y, eta) e^{i<x, eta>} at every grid x
    Finv = _dft(F.values, g.dual, range(d, 2 * d), inverse=True)
    W = _window_matrix(phi.values, g)
    out = np.sum(W * Finv, axis=tuple(range(d))) * g.h**d
    return Field(g, out)


def project(F: PhaseField, phi: Field) -> PhaseField:
    """``P_phi F = ||phi||^-2 V_phi V_phi^* F``."""
    _check_window(phi)
    nrm2 = l2_norm(phi) ** 2
    return stft(stft_adjoint(F, phi), phi) * (1.0 / nrm2)


def _flat_index(grid: Grid) -> np.ndarray:
    """Periodic difference map on flattened points: ``D[a, b]`` indexes ``z_b - z_a``."""
    S = grid.shift_index()
    if grid.d == 1:
        return S
    N = grid.N
    D = S[:, None, :, None] * N + S[None, :, None, :]
    return D.reshape(N * N, N * N)


def _flat_points(axis: np.ndarray, d: int) -> np.ndarray:
    return np.stack(np.meshgrid(*([axis] * d), indexing="ij"), axis=-1).reshape(-1, d)


def twisted_convolve(F: PhaseField, G: PhaseField, allow_large: bool = False) -> PhaseField:
    """Twisted convolution by direct summation with periodic index wrapping.

    ``(F *_V G)(x, xi) = (2 pi)^(-d/2) sum_{y, eta} F(x - y, xi - eta) G(y, eta)
    e^{-i<y, xi - eta>} h^d dxi^d``.  Cost is ``O(N^(4d))``.
    """
    _same_grid(F.grid, G.grid)
    g = F.grid
    d, n = g.d, g.N**g.d
    if n > MAX_TWISTED_POINTS and not allow_large:
        raise SizeLimitError(
            f"twisted convolution with {n} points per axis group exceeds "
            f"{MAX_TWISTED_POINTS}; pass allow_large=True to override"
        )
    D = _flat_index(g)
    xs = _flat_points(g.axis, d)
    xis = _flat_points(g.freq_axis, d)
    Fm = F.values.reshape(n, n)
    Gm = G.values.reshape(n, n)
    out = np.zeros((n, n), dtype=complex)
    for l in range(n):
        y = xs[l]
        Hy = Gm[l] * np.exp(1j * (xis @ y))
        rows = Fm[D[l]]  # rows[k, :] = F(x_k - y, .)
        # sum_j rows[k, D[j, i]] Hy[j]
        acc = np.einsum("kji,j->ki", rows[:, D], Hy)
        out += acc * np.exp(-1j * (xis @ y))[None, :]
    out *= (g.h * g.dxi) ** d / (2 * np.pi) ** (d / 2)
    return PhaseField(g, out.reshape(F.values.shape))


def moyal(f: Field, g: Field, phi: Field, psi: Field) -> tuple[complex, complex]:
    """Both sides of ``(V_phi f, V_psi g) = (psi, phi)(f, g)``."""
    A = stft(f, phi)
    B = stft(g, psi)
    lhs = complex(np.sum(A.values * B.values.conj()) * A.cell)
    rhs = inner(psi, phi) * inner(f, g)
    return lhs, rhs


def window_edge_decay(phi: Field) -> float:
    """Largest ``|phi(x)|`` with some coordinate ``|x_j| >= L/2``, relative to ``max |phi|``.

    Periodic window translates are only faithful when this is negligible.
    """
    g = phi.grid
    pts = g.points()
    far = np.any(np.abs(pts) >= g.L / 2, axis=-1)
    v = np.abs(phi.values)
    top = v.max()
    return float(v[far].max() / top) if top > 0 else 0.0
