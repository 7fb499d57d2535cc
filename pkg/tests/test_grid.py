import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaborlab.grid import (
    Field,
    Grid,
    PhaseField,
    boundary_magnitude,
    convolve,
    fourier,
    inner,
    inverse_fourier,
    l2_norm,
    mixed_norm,
    multiply,
)
from gaborlab.io import field_from_json, field_to_json
from gaborlab.rng import make_rng, random_field, random_phase_field
from gaborlab.weights import Bracket, Polynomial, Split

G = Grid(1, 12.0, 256)


def rel(a, b):
    return np.linalg.norm(np.ravel(a) - np.ravel(b)) / np.linalg.norm(np.ravel(b))


def test_grid_geometry():
    assert G.h * G.N == pytest.approx(2 * G.L)
    assert G.h * G.dxi == pytest.approx(2 * np.pi / G.N)
    assert G.axis[0] == -12.0 and G.axis[-1] == pytest.approx(12.0 - G.h)
    assert G.freq_axis[G.N // 2] == 0.0
    assert G.dual.h == pytest.approx(G.dxi)
    assert G.index_of(0.0) == G.N // 2
    with pytest.raises(ValueError):
        G.index_of(0.01)


@pytest.mark.parametrize("d,L,N", [(3, 1.0, 16), (1, 0.0, 16), (1, 1.0, 7), (1, 1.0, 4)])
def test_grid_rejects_bad_parameters(d, L, N):
    with pytest.raises(ValueError):
        Grid(d, L, N)


def test_field_rejects_nonfinite_and_wrong_size():
    with pytest.raises(ValueError):
        Field(G, np.ones(10))
    v = np.ones(G.N)
    v[3] = np.nan
    with pytest.raises(ValueError):
        Field(G, v)


def test_fields_are_read_only():
    f = Field(G, np.ones(G.N))
    with pytest.raises(ValueError):
        f.values[0] = 2


def test_gaussian_is_fixed_point():
    f = Field.from_function(G, lambda x: np.exp(-x**2 / 2))
    fh = fourier(f)
    xi = fh.grid.axis
    assert np.max(np.abs(fh.values - np.exp(-xi**2 / 2))) <= 1e-10
    assert np.allclose(fh.grid.axis, G.freq_axis)


def test_gaussian_fixed_point_2d():
    g = Grid(2, 8.0, 64)
    f = Field.from_function(g, lambda x, y: np.exp(-(x**2 + y**2) / 2))
    xi = g.freq_axis
    expect = np.exp(-(xi[:, None] ** 2 + xi[None, :] ** 2) / 2)
    assert np.max(np.abs(fourier(f).values - expect)) <= 1e-10


@pytest.mark.parametrize("seed", range(5))
def test_inversion_and_parseval(seed):
    f = random_field(G, make_rng(seed))
    fh = fourier(f)
    assert rel(inverse_fourier(fh).values, f.values) <= 1e-12
    assert rel(fourier(inverse_fourier(fh)).values, fh.values) <= 1e-12
    assert abs(l2_norm(fh) - l2_norm(f)) / l2_norm(f) <= 1e-12


def test_convolution_identity():
    rng = make_rng(3)
    f, g = random_field(G, rng), random_field(G, rng)
    lhs = fourier(convolve(f, g)).values
    rhs = np.sqrt(2 * np.pi) * fourier(f).values * fourier(g).values
    assert rel(lhs, rhs) <= 1e-8


def test_convolution_identity_2d():
    g2 = Grid(2, 6.0, 32)
    rng = make_rng(4)
    f, g = random_field(g2, rng), random_field(g2, rng)
    lhs = fourier(convolve(f, g)).values
    rhs = 2 * np.pi * fourier(f).values * fourier(g).values
    assert rel(lhs, rhs) <= 1e-8


def test_gaussian_convolution_closed_form():
    # exp(-x^2/(2a^2)) * exp(-x^2/(2b^2)) = sqrt(2 pi) a b / c exp(-x^2/(2c^2)), c^2 = a^2 + b^2
    a, b = 0.7, 1.3
    c = np.hypot(a, b)
    f = Field.from_function(G, lambda x: np.exp(-x**2 / (2 * a * a)))
    g = Field.from_function(G, lambda x: np.exp(-x**2 / (2 * b * b)))
    expect = np.sqrt(2 * np.pi) * a * b / c * np.exp(-G.axis**2 / (2 * c * c))
    assert np.max(np.abs(convolve(f, g).values - expect)) <= 1e-12


def test_narrow_peak_convolution_shifts():
    delta = np.zeros(G.N)
    k = G.index_of(1.5)
    delta[k] = 1 / G.h
    g = random_field(G, make_rng(8))
    out = convolve(Field(G, delta), g)
    assert np.allclose(out.values, np.roll(g.values, k - G.N // 2), atol=1e-14)


def test_convolve_grid_mismatch():
    with pytest.raises(ValueError):
        convolve(Field(G, np.ones(G.N)), Field(Grid(1, 12.0, 128), np.ones(128)))


def test_inner_is_conjugate_linear_in_second_slot():
    rng = make_rng(2)
    f, g = random_field(G, rng), random_field(G, rng)
    c = 2 - 3j
    assert inner(f, g * c) == pytest.approx(np.conj(c) * inner(f, g), rel=1e-13)
    assert inner(f * c, g) == pytest.approx(c * inner(f, g), rel=1e-13)
    assert inner(f, f).real == pytest.approx(l2_norm(f) ** 2)


def test_multiply_pointwise():
    rng = make_rng(5)
    f, g = random_field(G, rng), random_field(G, rng)
    assert np.array_equal(multiply(f, g).values, f.values * g.values)


def test_mixed_norm_constant_field():
    g = Grid(1, 1.0, 16)
    F = PhaseField(g, np.ones((16, 16)))
    # the sampled frequency band has length N dxi = 16 pi
    assert mixed_norm(F, 1, 1) == pytest.approx(2 * g.L * g.N * g.dxi, rel=1e-14)
    assert mixed_norm(F, "inf", "inf") == 1.0


def test_mixed_norm_l2_matches_flat_sum():
    F = random_phase_field(Grid(1, 6.0, 64), make_rng(1))
    flat = np.sqrt(np.sum(np.abs(F.values) ** 2) * F.cell)
    assert mixed_norm(F, 2, 2) == pytest.approx(flat, rel=1e-13)
    assert mixed_norm(F, 2, 2, variant="star") == pytest.approx(flat, rel=1e-13)
    assert l2_norm(F) == pytest.approx(flat, rel=1e-13)


def _brute_mixed(F, p, q, w, star):
    g = F.grid
    A = np.abs(F.values) * w
    N = g.N
    out = 0.0
    if not star:
        for m in range(N):
            s = sum(A[k, m] ** p * g.h for k in range(N)) ** (1 / p)
            out += s**q * g.dxi
        return out ** (1 / q)
    for k in range(N):
        s = sum(A[k, m] ** q * g.dxi for m in range(N)) ** (1 / q)
        out += s**p * g.h
    return out ** (1 / p)


@pytest.mark.parametrize("p,q", [(1, 2), (2, 1), (0.5, 3), (3, 0.5)])
@pytest.mark.parametrize("star", [False, True])
def test_mixed_norm_against_nested_loops(p, q, star):
    g = Grid(1, 3.0, 16)
    F = random_phase_field(g, make_rng(11))
    w = Split(Polynomial(1.0), Bracket(2.0))
    ref = _brute_mixed(F, p, q, w(g.phase_points()), star)
    got = mixed_norm(F, p, q, w, "star" if star else "standard")
    assert got == pytest.approx(ref, rel=1e-12)


def test_mixed_norm_factorizes_for_tensor_fields():
    g = Grid(1, 4.0, 32)
    a = np.exp(-g.axis**2) * (1 + 0.5j)
    b = np.exp(-(g.freq_axis - 1) ** 2 / 3)
    F = PhaseField(g, np.outer(a, b))
    wu, wv = Polynomial(1.0), Bracket(1.0)
    w = Split(wu, wv)
    na = np.sum((np.abs(a) * wu(g.axis[:, None])) ** 3 * g.h) ** (1 / 3)
    nb = np.sum((np.abs(b) * wv(g.freq_axis[:, None])) ** 1.5 * g.dxi) ** (1 / 1.5)
    for variant in ("standard", "star"):
        assert mixed_norm(F, 3, 1.5, w, variant) == pytest.approx(na * nb, rel=1e-12)


def test_mixed_norm_rejects_nonpositive_weight():
    F = random_phase_field(Grid(1, 3.0, 16), make_rng(0))
    with pytest.raises(ValueError):
        mixed_norm(F, 2, 2, weight=lambda z: np.zeros(z.shape[:-1]))


exps = st.sampled_from([0.5, 2 / 3, 1, 1.5, 2, 4])


@settings(max_examples=30, deadline=None)
@given(p=exps, q=exps, c=st.complex_numbers(min_magnitude=1e-3, max_magnitude=1e3),
       seed=st.integers(0, 2**32 - 1))
def test_mixed_norm_homogeneous(p, q, c, seed):
    F = random_phase_field(Grid(1, 3.0, 16), make_rng(seed))
    assert mixed_norm(F * c, p, q) == pytest.approx(abs(c) * mixed_norm(F, p, q), rel=1e-12)


@settings(max_examples=30, deadline=None)
@given(p=st.sampled_from([1, 1.5, 2, 4, "inf"]), q=st.sampled_from([1, 2, 3, "inf"]),
       seed=st.integers(0, 2**32 - 1), variant=st.sampled_from(["standard", "star"]))
def test_mixed_norm_triangle_inequality(p, q, seed, variant):
    rng = make_rng(seed)
    g = Grid(1, 3.0, 16)
    F, H = random_phase_field(g, rng), random_phase_field(g, rng)
    lhs = mixed_norm(F + H, p, q, variant=variant)
    assert lhs <= mixed_norm(F, p, q, variant=variant) + mixed_norm(H, p, q, variant=variant) + 1e-12 * lhs


def test_boundary_magnitude():
    f = Field.from_function(G, lambda x: np.exp(-x**2 / 2))
    assert boundary_magnitude(f) == pytest.approx(np.exp(-72))
    v = np.zeros(G.N)
    v[-1] = 0.5
    assert boundary_magnitude(Field(G, v)) == 0.5


def test_fld_json_roundtrip():
    f = random_field(G, make_rng(1))
    back = field_from_json(field_to_json(f))
    assert back.grid == f.grid and np.array_equal(back.values, f.values)
    F = random_phase_field(Grid(1, 3.0, 16), make_rng(1))
    doc = field_to_json(F)
    assert doc["format"] == "fld-json/1" and doc["kind"] == "phasefield"
    back = field_from_json(doc)
    assert isinstance(back, PhaseField) and np.array_equal(back.values, F.values)
    with pytest.raises(ValueError):
        field_from_json({**doc, "format": "other"})
