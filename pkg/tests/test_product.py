from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaborlab.grid import Field, Grid, PhaseField, inner, l2_norm, multiply
from gaborlab.modspace import _xi_convolve, gaussian_window
from gaborlab.product import ASSOCIATION, gabor_product, involution, product_bound
from gaborlab.rng import hermite_gaussian, make_rng, random_phase_field
from gaborlab.stft import SizeLimitError, stft, stft_adjoint
from gaborlab.suite import product_cases
from gaborlab.weights import ConditionError, INF, Bracket, Polynomial, Split

G = Grid(1, 8.0, 96)


def rel(a, b):
    return np.linalg.norm(np.ravel(a) - np.ravel(b)) / np.linalg.norm(np.ravel(b))


def gauss(c=0.0, s=1.0):
    return Field.from_function(G, lambda x: np.exp(-((x - c) ** 2) / (2 * s * s)))


def test_zero_product():
    Z = PhaseField(G, np.zeros((G.N, G.N)))
    assert not np.any(gabor_product(Z, Z, gauss()).values)


def test_windowed_product_identity():
    for _, f1, f2, (phi, phi1, phi2) in product_cases(3, 6):
        lhs = stft(multiply(f1, f2), phi) * inner(phi2, phi1)
        rhs = gabor_product(stft(f1, phi1), stft(f2, phi2.conj()), phi)
        assert rel(rhs.values, lhs.values) <= 1e-5


def test_identity_with_complex_windows():
    x = G.axis
    f1 = hermite_gaussian(G, 2, 0.3)
    f2 = gauss(-0.5, 0.8) * np.exp(1.5j * x)
    phi = gauss(0.2, 1.1) * np.exp(0.7j * x)
    phi1 = gauss(-0.3, 0.9) * np.exp(-0.4j * x)
    phi2 = gauss(0.1, 1.2) * np.exp(0.2j * x)
    lhs = stft(multiply(f1, f2), phi) * inner(phi2, phi1)
    rhs = gabor_product(stft(f1, phi1), stft(f2, phi2.conj()), phi)
    assert rel(rhs.values, lhs.values) <= 1e-5


def test_homomorphism():
    phi = gaussian_window(G, 0.9)
    f = hermite_gaussian(G, 1, 0.4) * (1 + 0.5j)
    V = stft(f, phi)
    assert rel(gabor_product(V, V, phi).values, stft(multiply(f, f), phi).values) <= 1e-5


def test_bilinearity():
    rng = make_rng(2)
    phi = gauss()
    F, H, K = (random_phase_field(G, rng) for _ in range(3))
    a, b = 0.7 - 1.1j, 2.0 + 0.5j
    lhs = gabor_product(F * a + H * b, K, phi)
    rhs = gabor_product(F, K, phi) * a + gabor_product(H, K, phi) * b
    assert rel(lhs.values, rhs.values) <= 1e-12
    lhs = gabor_product(K, F * a + H * b, phi)
    rhs = gabor_product(K, F, phi) * a + gabor_product(K, H, phi) * b
    assert rel(lhs.values, rhs.values) <= 1e-12


def test_matches_xi_convolution_route():
    # both routes recover f1 f2 after extraction with the matching window
    f1, f2 = hermite_gaussian(G, 1, -0.2), gauss(0.4, 0.9) * np.exp(0.5j * G.axis)
    phi1, phi2 = gaussian_window(G, 0.9), gaussian_window(G, 1.1)
    phi0 = multiply(phi1, phi2) * np.sqrt(2 * np.pi)
    conv = PhaseField(G, _xi_convolve(stft(f1, phi1), stft(f2, phi2)))
    via_conv = stft_adjoint(conv, phi0) * (1 / l2_norm(phi0) ** 2)
    phi = gaussian_window(G)
    prod = gabor_product(stft(f1, phi1), stft(f2, phi2.conj()), phi)
    via_prod = stft_adjoint(prod, phi) * (1 / (l2_norm(phi) ** 2 * inner(phi2, phi1)))
    target = multiply(f1, f2).values
    assert rel(via_conv.values, target) <= 1e-5
    assert rel(via_prod.values, target) <= 1e-5
    assert rel(via_conv.values, via_prod.values) <= 1e-5


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_involution_is_involutive(seed):
    F = random_phase_field(G, make_rng(seed))
    assert np.array_equal(involution(involution(F)).values, F.values)


def test_involution_examples():
    V = stft(gauss(0.3, 0.8), gauss(-0.2, 1.1))
    assert rel(involution(V).values, V.values) <= 1e-12
    # e^{i xi} is fixed; the Nyquist frequency -6 pi is its own reflection here
    E = PhaseField(G, np.broadcast_to(np.exp(1j * G.freq_axis), (G.N, G.N)))
    assert np.allclose(involution(E).values, E.values, atol=1e-13)


def test_involution_reflects_frequency():
    F = random_phase_field(G, make_rng(5))
    out = involution(F).values
    m = 10
    assert out[7, G.N // 2 + m] == np.conj(F.values[7, G.N // 2 - m])
    assert out[7, 0] == np.conj(F.values[7, 0])


def test_size_guard():
    g = Grid(1, 8.0, 256)
    Z = PhaseField(g, np.zeros((256, 256)))
    with pytest.raises(SizeLimitError):
        gabor_product(Z, Z, Field(g, np.ones(256)))
    with pytest.raises(ValueError):
        gabor_product(Z, PhaseField(G, np.zeros((96, 96))), Field(g, np.ones(256)))


def _pair(seed):
    rng = make_rng(seed, 3)
    f1 = hermite_gaussian(G, int(rng.integers(0, 3)), rng.uniform(-1, 1))
    f2 = gauss(rng.uniform(-1, 1), rng.uniform(0.7, 1.2)) * np.exp(1j * rng.uniform(-2, 2) * G.axis)
    return f1, f2


def test_product_bound_unweighted():
    phi = gauss(0, 1.0)
    ratios = []
    for seed in range(6):
        f1, f2 = _pair(seed)
        r = product_bound(f1, f2, phi, (1, 2, 2), (1, 1, 1))
        assert r["identity_rel"] <= 1e-5
        assert np.isfinite(r["ratio"]) and r["ratio"] > 0
        assert 0.1 < r["equivalence_ratio"] < 10
        ratios.append(r["ratio"])
    assert max(ratios) < 10 * min(ratios)


def test_product_bound_homogeneous():
    phi = gauss()
    f1, f2 = _pair(7)
    a = product_bound(f1, f2, phi, (1, 2, 2), (1, 1, 1))["ratio"]
    b = product_bound(f1, f2 * 1e-3, phi, (1, 2, 2), (1, 1, 1))["ratio"]
    assert b == pytest.approx(a, rel=1e-9)


def test_product_bound_quasi_banach_and_weighted():
    phi = gauss()
    f1, f2 = _pair(8)
    h = Fraction(1, 2)
    r = product_bound(f1, f2, phi, (h, 1, 1), (h, h, h))
    assert np.isfinite(r["ratio"])
    w = Split(Polynomial(0), Bracket(1))
    r = product_bound(f1, f2, phi, (1, 2, 2), (1, 1, 1), weights=(w, w, w))
    assert np.isfinite(r["ratio"]) and r["weight_constant"] <= np.sqrt(2) + 1e-12


def test_product_bound_conditions():
    phi = gauss()
    f1, f2 = _pair(9)
    with pytest.raises(ConditionError) as e:
        product_bound(f1, f2, phi, (1, 2, 2), (Fraction(1, 2), 1, 1))
    assert e.value.conditions == ["1/q0 <= 1/q1 + 1/q2 - max(1, 1/q1, 1/q2)"]
    with pytest.raises(ConditionError):
        product_bound(f1, f2, phi, (Fraction(1, 2), 2, 2), (INF, 2, 2))


def test_association_convention():
    assert ASSOCIATION.startswith("left")
