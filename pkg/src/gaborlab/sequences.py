"""Weighted mixed-norm sequence spaces on lattices, and the discrete Hölder and
Young inequalities including their quasi-Banach branches."""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np
from scipy import signal

from .weights import ConditionError, Weight, as_exponent, holder_ok, young_ok

__all__ = [
    "LatticeSeq",
    "seq_norm",
    "seq_convolve",
    "seq_mul",
    "verify_holder",
    "verify_young",
]

_SLACK = 1e-12


@dataclass(frozen=True, eq=False)
class LatticeSeq:
    """Finitely supported sequence on ``Z^d1 x Z^d2`` stored on an index box.

    ``values[i...]`` is the entry at integer index ``origin + i``.  The real
    lattice point of an index ``n`` is ``basis @ n``; it is only used to
    evaluate ``weight``.
    """

    values: np.ndarray = field(repr=False)
    origin: tuple[int, ...]
    split: tuple[int, int]
    basis: np.ndarray | None = field(default=None, repr=False)
    weight: Weight | None = None

    def __post_init__(self):
        v = np.array(self.values, dtype=complex)
        m = sum(self.split)
        if v.ndim != m or len(self.origin) != m:
            raise ValueError(f"values must have {m} axes and origin {m} entries")
        if not np.all(np.isfinite(v)):
            raise ValueError("sequence entries must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "origin", tuple(int(o) for o in self.origin))
        if self.basis is not None:
            b = np.asarray(self.basis, dtype=float)
            if b.ndim == 1:
                b = np.diag(b)
            if b.shape != (m, m):
                raise ValueError(f"basis must be {m}x{m}")
            object.__setattr__(self, "basis", b)

    @classmethod
    def from_entries(cls, indices, values, split=None, **kw) -> "LatticeSeq":
        """Build from explicit ``(index, value)`` pairs; the box is their bounding box."""
        idx = np.atleast_2d(np.asarray(indices, dtype=int))
        vals = np.asarray(values, dtype=complex).ravel()
        if len(idx) != len(vals):
            raise ValueError("indices and values differ in length")
        m = idx.shape[1]
        split = tuple(split) if split is not None else (m, 0)
        lo = idx.min(axis=0)
        box = np.zeros(tuple(idx.max(axis=0) - lo + 1), dtype=complex)
        np.add.at(box, tuple((idx - lo).T), vals)
        return cls(box, tuple(lo), split, **kw)

    @property
    def ndim(self) -> int:
        return sum(self.split)

    def indices(self) -> np.ndarray:
        axes = [o + np.arange(n) for o, n in zip(self.origin, self.values.shape)]
        return np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)

    def points(self) -> np.ndarray:
        n = self.indices().astype(float)
        return n if self.basis is None else n @ self.basis.T

    def weight_values(self, weight: Weight | None = None) -> np.ndarray:
        w = self.weight if weight is None else weight
        if w is None:
            return np.ones(self.values.shape)
        return np.asarray(w(self.points()), dtype=float)

    def with_weight(self, weight: Weight | None) -> "LatticeSeq":
        return replace(self, weight=weight)

    def entries(self) -> tuple[np.ndarray, np.ndarray]:
        """Nonzero entries as ``(indices, values)``."""
        mask = self.values != 0
        return self.indices()[mask], self.values[mask]


def _reduce(a: np.ndarray, p, axes: tuple[int, ...]) -> np.ndarray:
    if not axes:
        return a
    if p.is_inf:
        return a.max(axis=axes)
    pv = float(p.value)
    return np.sum(a**pv, axis=axes) ** (1.0 / pv)


def seq_norm(a: LatticeSeq, p, q=None, variant: str = "standard") -> float:
    """Weighted ``l^{p,q}`` quasi-norm (``variant="star"`` swaps the nesting).

    The first index group carries ``p`` and the second ``q``; with ``q``
    omitted the flat weighted ``l^p`` quasi-norm over all indices is returned.
    """
    p = as_exponent(p)
    q = p if q is None else as_exponent(q)
    d1, d2 = a.split
    g1, g2 = tuple(range(d1)), tuple(range(d1, d1 + d2))
    w = a.weight_values()
    if np.any(~(w > 0)):
        raise ValueError("weight must be positive on the sequence box")
    x = np.abs(a.values) * w
    if x.size == 0:
        return 0.0
    scale = x.max()
    if scale == 0:
        return 0.0
    x = x / scale
    if variant == "standard":
        # inner over the first group leaves the second group on axes 0..d2-1
        out = _reduce(_reduce(x, p, g1), q, tuple(range(d2)))
    elif variant == "star":
        out = _reduce(_reduce(x, q, g2), p, g1)
    else:
        raise ValueError(f"unknown variant {variant!r}")
    return float(out) * float(scale)


def _compatible(a: LatticeSeq, b: LatticeSeq) -> None:
    if a.split != b.split:
        raise ValueError(f"lattice mismatch: split {a.split} vs {b.split}")
    if (a.basis is None) != (b.basis is None) or (
        a.basis is not None and not np.array_equal(a.basis, b.basis)
    ):
        raise ValueError("lattice mismatch: different bases")


def seq_convolve(a: LatticeSeq, b: LatticeSeq) -> LatticeSeq:
    """Full discrete convolution; the index box grows to the Minkowski sum."""
    _compatible(a, b)
    v = signal.convolve(a.values, b.values, mode="full", method="direct")
    origin = tuple(x + y for x, y in zip(a.origin, b.origin))
    return LatticeSeq(v, origin, a.split, a.basis)


def _embed(a: LatticeSeq, lo: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    out = np.zeros(shape, dtype=complex)
    off = np.asarray(a.origin) - lo
    sl = tuple(slice(o, o + n) for o, n in zip(off, a.values.shape))
    out[sl] = a.values
    return out


def seq_mul(a: LatticeSeq, b: LatticeSeq) -> LatticeSeq:
    """Pointwise product on the union of the two index boxes."""
    _compatible(a, b)
    lo = np.minimum(a.origin, b.origin)
    hi = np.maximum(np.add(a.origin, a.values.shape), np.add(b.origin, b.values.shape))
    shape = tuple(int(s) for s in hi - lo)
    v = _embed(a, lo, shape) * _embed(b, lo, shape)
    return LatticeSeq(v, tuple(lo), a.split, a.basis)


def _weights3(weights):
    if weights is None:
        return (None, None, None)
    if len(weights) != 3:
        raise ValueError("need three weights (w0, w1, w2)")
    return tuple(weights)


def _ones(z):
    return np.ones(np.shape(z)[:-1])


def verify_holder(a1: LatticeSeq, a2: LatticeSeq, q, weights=None) -> float:
    """``||a1 a2||_{q0, w0} / (||a1||_{q1, w1} ||a2||_{q2, w2})``; bounded by 1.

    Raises :class:`ConditionError` unless ``1/q0 <= 1/q1 + 1/q2`` and
    ``w0 <= w1 w2`` on the union box.
    """
    q0, q1, q2 = map(as_exponent, q)
    w0, w1, w2 = _weights3(weights)
    bad = []
    if not holder_ok(q0, q1, q2):
        bad.append("1/q0 <= 1/q1 + 1/q2")
    prod = seq_mul(a1, a2)
    pts = prod.points()
    e0, e1, e2 = ((w or _ones)(pts) for w in (w0, w1, w2))
    if np.any(e0 > e1 * e2 * (1 + _SLACK)):
        bad.append("w0(j) <= w1(j) w2(j)")
    if bad:
        raise ConditionError(bad)
    num = seq_norm(prod.with_weight(w0), q0)
    den = seq_norm(a1.with_weight(w1), q1) * seq_norm(a2.with_weight(w2), q2)
    return num / den


def verify_young(a1: LatticeSeq, a2: LatticeSeq, p, weights=None) -> float:
    """``||a1 * a2||_{p0, w0} / (||a1||_{p1, w1} ||a2||_{p2, w2})``; bounded by 1.

    Raises :class:`ConditionError` unless the Young exponent condition holds
    and ``w0(j1 + j2) <= w1(j1) w2(j2)`` for ``j1, j2`` in the two boxes.
    """
    p0, p1, p2 = map(as_exponent, p)
    w0, w1, w2 = _weights3(weights)
    bad = []
    if not young_ok(p0, p1, p2):
        bad.append("1/p0 <= 1/p1 + 1/p2 - max(1, 1/p1, 1/p2)")
    x1 = a1.points().reshape(-1, a1.ndim)
    x2 = a2.points().reshape(-1, a2.ndim)
    s = x1[:, None, :] + x2[None, :, :]
    lhs = (w0 or _ones)(s)
    rhs = (w1 or _ones)(x1)[:, None] * (w2 or _ones)(x2)[None, :]
    if np.any(lhs > rhs * (1 + _SLACK)):
        bad.append("w0(j1 + j2) <= w1(j1) w2(j2)")
    if bad:
        raise ConditionError(bad)
    num = seq_norm(seq_convolve(a1, a2).with_weight(w0), p0)
    den = seq_norm(a1.with_weight(w1), p1) * seq_norm(a2.with_weight(w2), p2)
    return num / den
