"""The Gabor product of phase-space fields and its link to pointwise products.

For windows with ``(phi2, phi1) = 1`` the product turns STFTs of ``f1`` and
``f2`` into the STFT of ``f1 f2``::

    (phi2, phi1) V_phi(f1 f2) = (V_phi1 f1) # (V_conj(phi2) f2)
"""
from __future__ import annotations

import numpy as np

from .grid import Field, PhaseField, _same_grid, fourier, inner, l2_norm, mixed_norm, multiply
from .modspace import mod_norm, weight_violations
from .stft import MAX_TWISTED_POINTS, SizeLimitError, _flat_index, _flat_points, stft
from .weights import ConditionError, as_exponent, mult_exponent_violations

__all__ = ["gabor_product", "involution", "product_bound", "ASSOCIATION"]

# convention for triple products, reported by callers that use one
ASSOCIATION = "left: (F1 # F2) # F3"


def gabor_product(F1: PhaseField, F2: PhaseField, phi: Field, allow_large: bool = False) -> PhaseField:
    """``F1 #_phi F2`` in two stages.

    First ``G(y, zeta) = sum_eta F1(y, eta) F2(y, zeta - eta) dxi^d`` (periodic
    in frequency), then
    ``out(x, xi) = (2 pi)^(-d) e^{-i<x, xi>} sum_{y, zeta} conj(phihat(zeta - xi))
    e^{i<x, zeta>} G(y, zeta) h^d dxi^d``.
    """
    _same_grid(F1.grid, F2.grid)
    _same_grid(F1.grid, phi.grid)
    g = F1.grid
    d, n = g.d, g.size
    if n > MAX_TWISTED_POINTS and not allow_large:
        raise SizeLimitError(
            f"Gabor product with {n} points per axis group exceeds "
            f"{MAX_TWISTED_POINTS}; pass allow_large=True to override"
        )
    D = _flat_index(g)  # D[a, b] indexes z_b - z_a; the same map serves the dual grid
    A = F1.values.reshape(n, n)
    B = F2.values.reshape(n, n)
    G = np.einsum("ye,yez->yz", A, B[:, D])
    S = G.sum(axis=0) * (g.h * g.dxi) ** d
    phihat = fourier(phi).values.reshape(-1)
    K = phihat[D].conj()  # K[xi, zeta] = conj(phihat(zeta - xi))
    xs = _flat_points(g.axis, d)
    xis = _flat_points(g.freq_axis, d)
    phase = xs @ xis.T
    out = np.exp(-1j * phase) * ((np.exp(1j * phase) * S[None, :]) @ K.T)
    out *= g.dxi**d / (2 * np.pi) ** d
    return PhaseField(g, out.reshape(F1.values.shape))


def involution(F: PhaseField) -> PhaseField:
    """``conj(F(x, -xi))``; the frequency ``-N/2 dxi`` is its own reflection."""
    g = F.grid
    d = g.d
    rev = (g.N - np.arange(g.N)) % g.N
    v = F.values
    for ax in range(d, 2 * d):
        v = np.take(v, rev, axis=ax)
    return PhaseField(g, v.conj())


def product_bound(f1: Field, f2: Field, phi: Field, p, q, weights=None) -> dict:
    """Phase-space product bound for ``W`` spaces with ``F_j = V_phi f_j``.

    ``phi`` is normalized to unit norm.  Returns the ratio
    ``||V_phi f1 # V_phi f2||_{L^{p0,q0}_*} / (||f1||_{W^{p1,q1}} ||f2||_{W^{p2,q2}})``
    along with the cross-check against ``||f1 f2||_{W^{p0,q0}}`` and the
    identity error ``V_phi(f1 f2) - V_phi f1 # V_conj(phi) f2``.  Lattice norms
    use ``phi`` as window.
    """
    _same_grid(f1.grid, f2.grid)
    p = tuple(map(as_exponent, p))
    q = tuple(map(as_exponent, q))
    viol = mult_exponent_violations("W", p, q)
    wviol, wconst = weight_violations("mult", weights, f1.grid.d)
    if viol or wviol:
        raise ConditionError(viol + wviol)
    w0, w1, w2 = weights if weights is not None else (None, None, None)
    phi = phi * (1.0 / l2_norm(phi))
    F1 = stft(f1, phi)
    F2 = stft(f2, phi.conj())
    prod = gabor_product(F1, F2, phi)
    direct = stft(multiply(f1, f2), phi) * inner(phi, phi)
    lhs = mixed_norm(prod, p[0], q[0], w0, "star")
    n1 = mod_norm(f1, p[1], q[1], w1, "W", phi)
    n2 = mod_norm(f2, p[2], q[2], w2, "W", phi)
    n0 = mod_norm(multiply(f1, f2), p[0], q[0], w0, "W", phi)
    diff = np.linalg.norm(prod.values - direct.values) / np.linalg.norm(direct.values)
    return {
        "ratio": lhs / (n1 * n2),
        "phase_norm": lhs,
        "norms": [n0, n1, n2],
        "equivalence_ratio": lhs / n0,
        "identity_rel": float(diff),
        "weight_constant": wconst,
    }
