"""Lebesgue exponents, moderate weights and the admissibility predicates.

Exponents live in ``(0, inf]`` and are stored through their reciprocal, which
is kept as an exact :class:`fractions.Fraction` whenever the input allows it.
Weights are small symbolic trees (``poly:2``, ``split(poly:0;bracket:1)``, ...)
that can be evaluated on arrays of points and classified by growth.
"""
from __future__ import annotations

import enum
import math
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, NamedTuple

import numpy as np
from scipy.stats import qmc

__all__ = [
    "Exponent",
    "as_exponent",
    "INF",
    "WeightClass",
    "Weight",
    "Polynomial",
    "Bracket",
    "Subexp",
    "Exp",
    "LogExp",
    "Split",
    "Product",
    "Power",
    "Reciprocal",
    "parse_weight",
    "classify",
    "check_moderate",
    "grs_probe",
    "beurling_domar_probe",
    "holder_ok",
    "young_ok",
    "mult_exponents_ok",
    "conv_exponents_ok",
    "mult_exponent_violations",
    "conv_exponent_violations",
    "intro_solve",
    "IntroSolution",
    "NoAdmissibleExponent",
    "ConditionError",
    "weight_cond_mult",
    "weight_cond_conv",
    "sample_points",
]

_TOL = 1e-12


# --------------------------------------------------------------------------
# exponents


@dataclass(frozen=True)
class Exponent:
    """A Lebesgue exponent ``p`` in ``(0, inf]``, stored as ``1/p``."""

    recip: Fraction | float

    def __post_init__(self):
        if not self.recip >= 0 or (isinstance(self.recip, float) and not math.isfinite(self.recip)):
            raise ValueError(f"exponent must lie in (0, inf], got 1/p = {self.recip}")

    @classmethod
    def of(cls, value) -> "Exponent":
        return as_exponent(value)

    @property
    def is_inf(self) -> bool:
        return self.recip == 0

    @property
    def value(self) -> Fraction | float:
        if self.is_inf:
            return math.inf
        if isinstance(self.recip, Fraction):
            return 1 / self.recip
        return 1.0 / self.recip

    @property
    def exact(self) -> bool:
        return isinstance(self.recip, Fraction)

    def __float__(self) -> float:
        return float(self.value)

    def __str__(self) -> str:
        if self.is_inf:
            return "inf"
        v = self.value
        if isinstance(v, Fraction) and v.denominator == 1:
            return str(v.numerator)
        return str(v)

    def __repr__(self) -> str:
        return f"Exponent({self})"

    def __eq__(self, other) -> bool:
        try:
            other = as_exponent(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self.recip == other.recip

    def __hash__(self) -> int:
        return hash(self.recip)


INF = Exponent(Fraction(0))


def _from_recip(r) -> Exponent:
    if isinstance(r, Fraction) or isinstance(r, int):
        return Exponent(Fraction(r))
    return Exponent(float(r))


def as_exponent(x) -> Exponent:
    """Coerce ``x`` (Exponent, int, float, ``"inf"``, ``"1/2"``, ``"0.5"``) to an Exponent."""
    if isinstance(x, Exponent):
        return x
    if isinstance(x, str):
        s = x.strip().lower()
        if s in ("inf", "infinity", "∞"):
            return INF
        try:
            v = Fraction(s)
        except ValueError as exc:
            raise ValueError(f"cannot parse exponent {x!r}") from exc
        if v <= 0:
            raise ValueError(f"exponent must be positive, got {x!r}")
        return Exponent(1 / v)
    if isinstance(x, (int, Fraction)) and not isinstance(x, bool):
        if x <= 0:
            raise ValueError(f"exponent must be positive, got {x}")
        return Exponent(Fraction(1) / Fraction(x))
    xf = float(x)
    if math.isinf(xf) and xf > 0:
        return INF
    if not xf > 0:
        raise ValueError(f"exponent must be positive, got {x}")
    if xf.is_integer():
        return Exponent(Fraction(1, int(xf)))
    return Exponent(1.0 / xf)


def _le(a, b) -> bool:
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return a <= b
    return float(a) <= float(b) + _TOL


# --------------------------------------------------------------------------
# weights


class WeightClass(enum.IntEnum):
    """Weight classes ordered by inclusion, ``P < P_BD < P_E0 < P_E``."""

    P = 0
    P_BD = 1
    P_E0 = 2
    P_E = 3

    def __str__(self) -> str:
        return self.name


def _norm(z: np.ndarray) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    return np.sqrt(np.sum(z * z, axis=-1))


class Weight:
    """Base class: a positive function of points ``z`` with shape ``(..., m)``."""

    def __call__(self, z) -> np.ndarray:
        raise NotImplementedError

    @property
    def parts(self) -> tuple["Weight", ...]:
        return ()

    def __mul__(self, other: "Weight") -> "Weight":
        return Product(self, other)

    def __pow__(self, t: float) -> "Weight":
        return Power(self, t)

    def reciprocal(self) -> "Weight":
        return Reciprocal(self)


@dataclass(frozen=True)
class Polynomial(Weight):
    r: float

    def __call__(self, z):
        return (1.0 + _norm(z)) ** self.r

    def __str__(self):
        return f"poly:{self.r:g}"


@dataclass(frozen=True)
class Bracket(Weight):
    s: float

    def __call__(self, z):
        n = _norm(z)
        return (1.0 + n * n) ** (self.s / 2)

    def __str__(self):
        return f"bracket:{self.s:g}"


@dataclass(frozen=True)
class Subexp(Weight):
    r: float
    theta: float

    def __post_init__(self):
        if not 0 < self.theta < 1:
            raise ValueError(f"subexp needs theta in (0, 1), got {self.theta}")

    def __call__(self, z):
        return np.exp(self.r * _norm(z) ** self.theta)

    def __str__(self):
        return f"subexp:{self.r:g},{self.theta:g}"


@dataclass(frozen=True)
class Exp(Weight):
    r: float

    def __call__(self, z):
        return np.exp(self.r * _norm(z))

    def __str__(self):
        return f"exp:{self.r:g}"


@dataclass(frozen=True)
class LogExp(Weight):
    r: float

    def __call__(self, z):
        n = _norm(z)
        return np.exp(self.r * n / np.log(np.e + n))

    def __str__(self):
        return f"logexp:{self.r:g}"


@dataclass(frozen=True)
class Split(Weight):
    """``u(x) * v(xi)`` on points ``(x, xi)``; the last axis is cut in half."""

    u: Weight
    v: Weight

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        m = z.shape[-1]
        if m % 2:
            raise ValueError("split weights need an even number of coordinates")
        return self.u(z[..., : m // 2]) * self.v(z[..., m // 2 :])

    @property
    def parts(self):
        return (self.u, self.v)

    def __str__(self):
        return f"split({self.u};{self.v})"


@dataclass(frozen=True)
class Product(Weight):
    a: Weight
    b: Weight

    def __call__(self, z):
        return self.a(z) * self.b(z)

    @property
    def parts(self):
        return (self.a, self.b)

    def __str__(self):
        return f"prod({self.a},{self.b})"


@dataclass(frozen=True)
class Power(Weight):
    w: Weight
    t: float

    def __call__(self, z):
        return self.w(z) ** self.t

    @property
    def parts(self):
        return (self.w,)

    def __str__(self):
        return f"pow({self.w},{self.t:g})"


@dataclass(frozen=True)
class Reciprocal(Weight):
    w: Weight

    def __call__(self, z):
        return 1.0 / self.w(z)

    @property
    def parts(self):
        return (self.w,)

    def __str__(self):
        return f"recip({self.w})"


_LEAF_CLASS = {
    Polynomial: WeightClass.P,
    Bracket: WeightClass.P,
    Subexp: WeightClass.P_BD,
    LogExp: WeightClass.P_E0,
    Exp: WeightClass.P_E,
}


def classify(w: Weight) -> WeightClass:
    """Class by family; composite weights take the weakest class of their parts."""
    cls = _LEAF_CLASS.get(type(w))
    if cls is not None:
        return cls
    if isinstance(w, (Split, Product, Power, Reciprocal)):
        return max(classify(p) for p in w.parts)
    raise ValueError(f"unknown weight family: {w!r}")


def _split_top(s: str, sep: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in s:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [t.strip() for t in out]


_NUM = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")


def parse_weight(text: str) -> Weight:
    """Parse the weight literal grammar used on the command line.

    ``poly:r``, ``bracket:s``, ``subexp:r,theta``, ``exp:r``, ``logexp:r``,
    ``split(WX;WXI)``, ``recip(W)``, ``prod(W1,W2)`` and ``pow(W,t)``.
    """
    s = text.strip()
    m = re.match(r"^(split|recip|prod|pow)\((.*)\)$", s)
    if m:
        head, body = m.groups()
        if head == "split":
            args = _split_top(body, ";")
            if len(args) != 2:
                raise ValueError(f"split needs two weights: {text!r}")
            return Split(parse_weight(args[0]), parse_weight(args[1]))
        if head == "recip":
            return Reciprocal(parse_weight(body))
        if head == "pow":
            inner_, _, t = body.rpartition(",")
            return Power(parse_weight(inner_), float(t))
        # commas also separate subexp parameters, so glue numeric tokens back on
        toks: list[str] = []
        for t in _split_top(body, ","):
            if toks and _NUM.match(t):
                toks[-1] = f"{toks[-1]},{t}"
            else:
                toks.append(t)
        if len(toks) < 2:
            raise ValueError(f"prod needs at least two weights: {text!r}")
        w = parse_weight(toks[0])
        for t in toks[1:]:
            w = Product(w, parse_weight(t))
        return w
    name, _, params = s.partition(":")
    try:
        vals = [float(v) for v in params.split(",")] if params else []
    except ValueError as exc:
        raise ValueError(f"bad weight parameters in {text!r}") from exc
    families = {"poly": (Polynomial, 1), "bracket": (Bracket, 1), "subexp": (Subexp, 2),
                "exp": (Exp, 1), "logexp": (LogExp, 1)}
    if name not in families:
        raise ValueError(f"unknown weight family {name!r} in {text!r}")
    cls, nargs = families[name]
    if len(vals) != nargs:
        raise ValueError(f"{name} takes {nargs} parameter(s), got {text!r}")
    return cls(*vals)


# --------------------------------------------------------------------------
# sampled weight checks


def sample_points(dim: int, half: float = 8.0, step: float = 0.5, n_random: int = 1000,
                  seed: int = 0) -> np.ndarray:
    """Deterministic lattice on ``[-half, half]^dim`` plus seeded Halton points."""
    axis = np.arange(-half, half + step / 2, step)
    lattice = np.stack(np.meshgrid(*([axis] * dim), indexing="ij"), axis=-1).reshape(-1, dim)
    if n_random:
        h = qmc.Halton(d=dim, scramble=True, seed=seed).random(n_random)
        lattice = np.concatenate([lattice, qmc.scale(h, -half, half)])
    return lattice


def check_moderate(omega: Callable, v: Callable, points: np.ndarray) -> float:
    """Largest sampled ``omega(x+y) / (omega(x) v(y))`` over all pairs of ``points``."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim == 1:
        pts = pts[:, None]
    wx = omega(pts)
    vy = v(pts)
    best = 0.0
    for i in range(0, len(pts), 256):
        x = pts[i : i + 256]
        s = x[:, None, :] + pts[None, :, :]
        with np.errstate(over="ignore"):
            r = omega(s) / (wx[i : i + 256, None] * vy[None, :])
        best = max(best, float(np.max(r)))
    return best


def _directions(m: int, count: int = 16) -> np.ndarray:
    if m == 1:
        return np.array([[1.0], [-1.0]])
    t = np.linspace(0, 2 * np.pi, count, endpoint=False)
    base = np.stack([np.cos(t), np.sin(t)], axis=-1)
    return np.concatenate([base, np.zeros((count, m - 2))], axis=1)


def grs_probe(v: Callable, m: int = 1, n: int = 10_000) -> float:
    """``max_x log v(n x) / n`` over unit directions; tends to 0 iff GRS holds."""
    dirs = _directions(m)
    with np.errstate(over="ignore"):
        return float(np.max(np.log(v(n * dirs)) / n))


def beurling_domar_probe(v: Callable, m: int = 1, n_max: int = 10_000) -> np.ndarray:
    """Partial sums of ``sum_n log v(n x) / n^2`` (max over unit directions)."""
    n = np.arange(1, n_max + 1, dtype=float)
    dirs = _directions(m)
    with np.errstate(over="ignore"):
        terms = np.stack([np.log(v(n[:, None] * dvec[None, :])) for dvec in dirs]) / n**2
    return np.max(np.cumsum(terms, axis=1), axis=0)


def weight_cond_mult(w0: Callable, w1: Callable, w2: Callable, d: int = 1,
                     samples: np.ndarray | None = None) -> float:
    """Largest sampled ``w0(x, xi1+xi2) / (w1(x, xi1) w2(x, xi2))``."""
    if samples is None:
        samples = sample_points(3 * d, step=0.5 if d == 1 else 2.0)
    x, a, b = samples[:, :d], samples[:, d : 2 * d], samples[:, 2 * d :]
    cat = np.concatenate
    with np.errstate(over="ignore"):
        r = w0(cat([x, a + b], 1)) / (w1(cat([x, a], 1)) * w2(cat([x, b], 1)))
    return float(np.max(r))


def weight_cond_conv(w0: Callable, w1: Callable, w2: Callable, d: int = 1,
                     samples: np.ndarray | None = None) -> float:
    """Largest sampled ``w0(x1+x2, xi) / (w1(x1, xi) w2(x2, xi))``."""
    if samples is None:
        samples = sample_points(3 * d, step=0.5 if d == 1 else 2.0)
    x1, x2, xi = samples[:, :d], samples[:, d : 2 * d], samples[:, 2 * d :]
    cat = np.concatenate
    with np.errstate(over="ignore"):
        r = w0(cat([x1 + x2, xi], 1)) / (w1(cat([x1, xi], 1)) * w2(cat([x2, xi], 1)))
    return float(np.max(r))


# --------------------------------------------------------------------------
# exponent conditions


def holder_ok(q0, q1, q2) -> bool:
    q0, q1, q2 = map(as_exponent, (q0, q1, q2))
    return _le(q0.recip, q1.recip + q2.recip)


def young_ok(p0, p1, p2) -> bool:
    p0, p1, p2 = map(as_exponent, (p0, p1, p2))
    return _le(p0.recip, p1.recip + p2.recip - max(1, p1.recip, p2.recip))


def _six(p, q):
    p = tuple(map(as_exponent, p))
    q = tuple(map(as_exponent, q))
    if len(p) != 3 or len(q) != 3:
        raise ValueError("need (p0, p1, p2) and (q0, q1, q2)")
    return p, q


def mult_exponent_violations(variant: str, p, q) -> list[str]:
    """Names of the violated multiplication conditions (empty when admissible)."""
    (p0, p1, p2), (q0, q1, q2) = _six(p, q)
    bad = []
    if not _le(p0.recip, p1.recip + p2.recip):
        bad.append("1/p0 <= 1/p1 + 1/p2")
    if variant == "M":
        theta = max(1, p0.recip, q1.recip, q2.recip)
        if not _le(q0.recip, q1.recip + q2.recip - theta):
            bad.append("1/q0 <= 1/q1 + 1/q2 - max(1, 1/p0, 1/q1, 1/q2)")
    elif variant == "W":
        theta = max(1, q1.recip, q2.recip)
        if not _le(q0.recip, q1.recip + q2.recip - theta):
            bad.append("1/q0 <= 1/q1 + 1/q2 - max(1, 1/q1, 1/q2)")
    else:
        raise ValueError(f"variant must be 'M' or 'W', got {variant!r}")
    return bad


def conv_exponent_violations(variant: str, p, q) -> list[str]:
    """Names of the violated convolution conditions (empty when admissible)."""
    (p0, p1, p2), (q0, q1, q2) = _six(p, q)
    bad = []
    if variant == "M":
        theta = max(1, p1.recip, p2.recip)
        if not _le(p0.recip, p1.recip + p2.recip - theta):
            bad.append("1/p0 <= 1/p1 + 1/p2 - max(1, 1/p1, 1/p2)")
    elif variant == "W":
        theta = max(1, q0.recip, p1.recip, p2.recip)
        if not _le(p0.recip, p1.recip + p2.recip - theta):
            bad.append("1/p0 <= 1/p1 + 1/p2 - max(1, 1/q0, 1/p1, 1/p2)")
    else:
        raise ValueError(f"variant must be 'M' or 'W', got {variant!r}")
    if not _le(q0.recip, q1.recip + q2.recip):
        bad.append("1/q0 <= 1/q1 + 1/q2")
    return bad


def mult_exponents_ok(variant: str, p, q) -> bool:
    return not mult_exponent_violations(variant, p, q)


def conv_exponents_ok(variant: str, p, q) -> bool:
    return not conv_exponent_violations(variant, p, q)


def _as_frac(x):
    return Fraction(x) if isinstance(x, int) else x


class NoAdmissibleExponent(ValueError):
    pass


class ConditionError(ValueError):
    """Raised when exponent or weight hypotheses fail; ``conditions`` names them."""

    def __init__(self, conditions: list[str]):
        self.conditions = list(conditions)
        super().__init__("conditions not satisfied: " + "; ".join(self.conditions))


class IntroSolution(NamedTuple):
    mult: tuple[Exponent, Exponent]
    conv: tuple[Exponent, Exponent]
    theta1: Fraction | float
    theta2: Fraction | float


def _solve_recip(r, what: str) -> Exponent:
    if (r < 0) if isinstance(r, Fraction) else (r < -_TOL):
        raise NoAdmissibleExponent(f"no admissible exponent: {what} has 1/p = {r} < 0")
    return _from_recip(max(r, 0) if isinstance(r, Fraction) else max(float(r), 0.0))


def intro_solve(p1, q1, p2, q2) -> IntroSolution:
    """Target exponents of the unweighted multiplication/convolution rules.

    Multiplication: ``1/p0 = 1/p1 + 1/p2`` and ``1/q1 + 1/q2 = theta1 + 1/q0``
    with ``theta1 = max(1, 1/p0, 1/q1, 1/q2)``.  Convolution:
    ``1/p1 + 1/p2 = theta2 + 1/p0`` with ``theta2 = max(1, 1/p1, 1/p2)`` and
    ``1/q0 = 1/q1 + 1/q2``.
    """
    p1, q1, p2, q2 = map(as_exponent, (p1, q1, p2, q2))
    mp0 = p1.recip + p2.recip
    theta1 = max(1, mp0, q1.recip, q2.recip)
    mq0 = q1.recip + q2.recip - theta1
    theta2 = max(1, p1.recip, p2.recip)
    cp0 = p1.recip + p2.recip - theta2
    cq0 = q1.recip + q2.recip
    theta1, theta2 = _as_frac(theta1), _as_frac(theta2)
    mult = (_solve_recip(mp0, "multiplication p0"), _solve_recip(mq0, "multiplication q0"))
    conv = (_solve_recip(cp0, "convolution p0"), _solve_recip(cq0, "convolution q0"))
    return IntroSolution(mult, conv, theta1, theta2)
