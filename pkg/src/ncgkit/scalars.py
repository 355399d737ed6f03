"""Exact and sampled scalar coefficient rings.

Three scalar backends are used throughout the toolkit:

* ``QQi`` -- Gaussian rationals a + b*i with ``Fraction`` components.
  All algebraic identities are decided with zero tolerance over this ring.
* ``PolyScalar`` -- multivariate polynomial (affine variables) or Laurent
  polynomial (periodic variables, monomials are integer powers of
  e^{i*x_j}) with QQi coefficients over a fixed ``Chart``.
* ``JetScalar`` -- complex sample grids over quadrature nodes together
  with analytically supplied first derivatives, so that differentiation
  never falls back to finite differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Union

import numpy as np

RationalLike = Union[int, Fraction]

from math import gcd as _gcd


def _as_fraction(x: RationalLike) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    raise TypeError(f"expected int or Fraction, got {type(x).__name__}")


def _qqi_raw(a: int, b: int, d: int) -> "QQi":
    """Construct from an already-reduced triple (no gcd pass)."""
    q = QQi.__new__(QQi)
    q.a = a
    q.b = b
    q.d = d
    return q


def _qqi(a: int, b: int, d: int) -> "QQi":
    if d < 0:
        a, b, d = -a, -b, -d
    g = _gcd(_gcd(a if a >= 0 else -a, b if b >= 0 else -b), d)
    if g > 1:
        a //= g
        b //= g
        d //= g
    q = QQi.__new__(QQi)
    q.a = a
    q.b = b
    q.d = d
    return q


class QQi:
    """Gaussian rational number, stored as (a + b*i)/d with gcd-reduced ints.

    The integer-triple layout keeps the hot arithmetic paths to plain int
    operations with a single gcd per result.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, re: RationalLike = 0, im: RationalLike = 0):
        re = _as_fraction(re)
        im = _as_fraction(im)
        d = re.denominator * im.denominator // _gcd(re.denominator, im.denominator)
        a = re.numerator * (d // re.denominator)
        b = im.numerator * (d // im.denominator)
        g = _gcd(_gcd(abs(a), abs(b)), d)
        if g > 1:
            a //= g
            b //= g
            d //= g
        self.a = a
        self.b = b
        self.d = d

    @property
    def re(self) -> Fraction:
        return Fraction(self.a, self.d)

    @property
    def im(self) -> Fraction:
        return Fraction(self.b, self.d)

    @staticmethod
    def coerce(x) -> "QQi":
        if isinstance(x, QQi):
            return x
        if isinstance(x, int):
            return _qqi_raw(x, 0, 1)
        if isinstance(x, Fraction):
            return _qqi_raw(x.numerator, 0, x.denominator)
        raise TypeError(f"cannot coerce {type(x).__name__} to QQi")

    def __add__(self, other):
        if isinstance(other, QQi):
            a2, b2, d2 = other.a, other.b, other.d
        elif isinstance(other, int):
            a2, b2, d2 = other, 0, 1
        elif isinstance(other, Fraction):
            a2, b2, d2 = other.numerator, 0, other.denominator
        else:
            return NotImplemented
        return _qqi(self.a * d2 + a2 * self.d, self.b * d2 + b2 * self.d,
                    self.d * d2)

    __radd__ = __add__

    def __neg__(self):
        return _qqi_raw(-self.a, -self.b, self.d)

    def __sub__(self, other):
        return self + (-QQi.coerce(other))

    def __rsub__(self, other):
        return QQi.coerce(other) + (-self)

    def __mul__(self, other):
        if isinstance(other, QQi):
            a2, b2, d2 = other.a, other.b, other.d
        elif isinstance(other, int):
            a2, b2, d2 = other, 0, 1
        elif isinstance(other, Fraction):
            a2, b2, d2 = other.numerator, 0, other.denominator
        else:
            return NotImplemented
        a1, b1, d1 = self.a, self.b, self.d
        return _qqi(a1 * a2 - b1 * b2, a1 * b2 + b1 * a2, d1 * d2)

    __rmul__ = __mul__

    def inverse(self) -> "QQi":
        n = self.a * self.a + self.b * self.b
        if n == 0:
            raise ZeroDivisionError("QQi division by zero")
        return _qqi(self.d * self.a, -self.d * self.b, n)

    def __truediv__(self, other):
        return self * QQi.coerce(other).inverse()

    def __rtruediv__(self, other):
        return QQi.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = QQI_ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conj(self) -> "QQi":
        return _qqi_raw(self.a, -self.b, self.d)

    def abs2(self) -> Fraction:
        return Fraction(self.a * self.a + self.b * self.b, self.d * self.d)

    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def is_real(self) -> bool:
        return self.b == 0

    def __eq__(self, other):
        if isinstance(other, int):
            return self.d == 1 and self.b == 0 and self.a == other
        if isinstance(other, Fraction):
            return self.b == 0 and self.re == other
        if not isinstance(other, QQi):
            return NotImplemented
        return self.a == other.a and self.b == other.b and self.d == other.d

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def __complex__(self):
        return (self.a + 1j * self.b) / self.d

    def __repr__(self):
        return f"QQi({self.re!r}, {self.im!r})"

    def __str__(self):
        if self.im == 0:
            return str(self.re)
        im = "i" if self.im == 1 else ("-i" if self.im == -1 else f"{self.im}i")
        if self.re == 0:
            return im
        sign = "+" if self.im > 0 else ""
        return f"{self.re}{sign}{im}"

    @staticmethod
    def parse(text: str) -> "QQi":
        """Parse strings like ``"3/2"``, ``"-i"``, ``"1/2+3/4i"``."""
        s = text.strip().replace(" ", "")
        if not s:
            raise ValueError("empty scalar string")
        if not s.endswith("i"):
            return QQi(Fraction(s))
        body = s[:-1]
        # split off a real part if one precedes the imaginary term
        for k in range(len(body) - 1, 0, -1):
            if body[k] in "+-" and body[k - 1] not in "+-/":
                re_part, im_part = body[:k], body[k:]
                break
        else:
            re_part, im_part = "", body
        if im_part in ("", "+"):
            im = Fraction(1)
        elif im_part == "-":
            im = Fraction(-1)
        else:
            im = Fraction(im_part)
        re = Fraction(re_part) if re_part else Fraction(0)
        return QQi(re, im)


QQI_ZERO = QQi(0)
QQI_ONE = QQi(1)
QQI_I = QQi(0, 1)

AFFINE = "affine"
PERIODIC = "periodic"


@dataclass(frozen=True)
class Chart:
    """A coordinate chart: dimension plus the kind of each coordinate.

    Affine coordinates are real polynomial variables; periodic coordinates
    are angles, represented through integer powers of e^{i*x_j}.
    """

    kinds: tuple

    def __post_init__(self):
        for k in self.kinds:
            if k not in (AFFINE, PERIODIC):
                raise ValueError(f"unknown coordinate kind {k!r}")

    @property
    def dim(self) -> int:
        return len(self.kinds)

    @staticmethod
    def affine(dim: int) -> "Chart":
        return Chart((AFFINE,) * dim)

    @staticmethod
    def torus(dim: int) -> "Chart":
        return Chart((PERIODIC,) * dim)

    @staticmethod
    def point() -> "Chart":
        return Chart(())


class PolyScalar:
    """Polynomial / trigonometric-polynomial function on a chart.

    Monomials are exponent tuples; affine coordinates require nonnegative
    exponents, periodic ones allow any integer (Laurent) exponent.
    Coefficients are Gaussian rationals, so every identity test is exact.
    """

    __slots__ = ("chart", "coeffs", "_hash")

    def __init__(self, chart: Chart, coeffs: Optional[dict] = None):
        self.chart = chart
        clean = {}
        if coeffs:
            for mono, c in coeffs.items():
                c = QQi.coerce(c)
                if c.is_zero():
                    continue
                if len(mono) != chart.dim:
                    raise ValueError("monomial arity does not match chart")
                for e, kind in zip(mono, chart.kinds):
                    if kind == AFFINE and e < 0:
                        raise ValueError("negative power of an affine coordinate")
                clean[tuple(mono)] = c
        self.coeffs = clean
        self._hash = None

    # -- constructors -------------------------------------------------

    @classmethod
    def _raw(cls, chart: Chart, coeffs: dict) -> "PolyScalar":
        """Internal constructor: coefficients already canonical and nonzero."""
        p = cls.__new__(cls)
        p.chart = chart
        p.coeffs = coeffs
        p._hash = None
        return p

    @staticmethod
    def const(chart: Chart, c) -> "PolyScalar":
        c = QQi.coerce(c)
        zero = (0,) * chart.dim
        return PolyScalar(chart, {zero: c})

    @staticmethod
    def coordinate(chart: Chart, j: int, power: int = 1) -> "PolyScalar":
        """x_j**power (affine) or e^{i*power*x_j} (periodic)."""
        mono = [0] * chart.dim
        mono[j] = power
        return PolyScalar(chart, {tuple(mono): QQI_ONE})

    @staticmethod
    def cos(chart: Chart, j: int, freq: int = 1) -> "PolyScalar":
        z = PolyScalar.coordinate(chart, j, freq)
        zbar = PolyScalar.coordinate(chart, j, -freq)
        return (z + zbar) * Fraction(1, 2)

    @staticmethod
    def sin(chart: Chart, j: int, freq: int = 1) -> "PolyScalar":
        z = PolyScalar.coordinate(chart, j, freq)
        zbar = PolyScalar.coordinate(chart, j, -freq)
        return (z - zbar) * QQi(0, Fraction(-1, 2))

    # -- ring operations ----------------------------------------------

    def _check(self, other: "PolyScalar"):
        if self.chart != other.chart:
            raise ValueError("scalars live on different charts")

    def __add__(self, other):
        if not isinstance(other, PolyScalar):
            other = PolyScalar.const(self.chart, other)
        self._check(other)
        out = dict(self.coeffs)
        for mono, c in other.coeffs.items():
            s = out.get(mono)
            s = c if s is None else s + c
            if s.a == 0 and s.b == 0:
                out.pop(mono, None)
            else:
                out[mono] = s
        return PolyScalar._raw(self.chart, out)

    __radd__ = __add__

    def __neg__(self):
        return PolyScalar._raw(self.chart, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other):
        if not isinstance(other, PolyScalar):
            other = PolyScalar.const(self.chart, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, PolyScalar):
            c = QQi.coerce(other)
            if c.is_zero():
                return PolyScalar._raw(self.chart, {})
            return PolyScalar._raw(
                self.chart, {m: a * c for m, a in self.coeffs.items()}
            )
        self._check(other)
        out: dict = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                m = tuple(a + b for a, b in zip(m1, m2))
                s = out.get(m)
                p = c1 * c2
                s = p if s is None else s + p
                if s.a == 0 and s.b == 0:
                    out.pop(m, None)
                else:
                    out[m] = s
        return PolyScalar._raw(self.chart, out)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("negative powers of PolyScalar are not supported")
        out = PolyScalar.const(self.chart, 1)
        for _ in range(k):
            out = out * self
        return out

    # -- calculus ------------------------------------------------------

    def diff(self, j: int) -> "PolyScalar":
        """Partial derivative along coordinate j.

        For a periodic coordinate this is d/dx_j acting on e^{i*k*x_j},
        which multiplies the monomial by i*k.
        """
        kind = self.chart.kinds[j]
        out: dict = {}
        for mono, c in self.coeffs.items():
            e = mono[j]
            if kind == AFFINE:
                if e == 0:
                    continue
                m = list(mono)
                m[j] = e - 1
                nc = c * e
            else:
                if e == 0:
                    continue
                m = list(mono)
                nc = c * QQi(0, e)
            m = tuple(m)
            s = out.get(m)
            s = nc if s is None else s + nc
            if s.a == 0 and s.b == 0:
                out.pop(m, None)
            else:
                out[m] = s
        return PolyScalar._raw(self.chart, out)

    def conj(self) -> "PolyScalar":
        """Complex conjugate; affine coordinates are real, periodic exponents flip."""
        out: dict = {}
        for mono, c in self.coeffs.items():
            m = tuple(
                -e if kind == PERIODIC else e
                for e, kind in zip(mono, self.chart.kinds)
            )
            s = out.get(m)
            s = c.conj() if s is None else s + c.conj()
            out[m] = s
        return PolyScalar._raw(self.chart, {m: c for m, c in out.items() if not (c.a == 0 and c.b == 0)})

    def mean_value(self) -> QQi:
        """Coefficient of the constant monomial.

        For an all-periodic chart this equals the average over the torus,
        so the exact integral is ``mean_value() * (2*pi)**dim``.
        """
        return self.coeffs.get((0,) * self.chart.dim, QQI_ZERO)

    # -- predicates and interop ----------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_constant(self) -> bool:
        return all(all(e == 0 for e in m) for m in self.coeffs)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            other = PolyScalar.const(self.chart, other)
        if not isinstance(other, PolyScalar):
            return NotImplemented
        return self.chart == other.chart and self.coeffs == other.coeffs

    def __hash__(self):
        if self._hash is None:
            key = tuple(sorted(self.coeffs.items(), key=lambda kv: kv[0]))
            self._hash = hash((self.chart, key))
        return self._hash

    def key(self):
        return tuple(sorted(self.coeffs.items(), key=lambda kv: kv[0]))

    def eval_numeric(self, point: Iterable[float]) -> complex:
        pt = list(point)
        total = 0j
        for mono, c in self.coeffs.items():
            term = complex(c)
            for e, kind, x in zip(mono, self.chart.kinds, pt):
                if kind == AFFINE:
                    term *= x ** e
                else:
                    term *= np.exp(1j * e * x)
            total += term
        return total

    def __repr__(self):
        if not self.coeffs:
            return "PolyScalar<0>"
        parts = []
        for mono, c in sorted(self.coeffs.items()):
            vars_part = "".join(
                f"*{'z' if k == PERIODIC else 'x'}{j}^{e}"
                for j, (e, k) in enumerate(zip(mono, self.chart.kinds))
                if e
            )
            parts.append(f"({c}){vars_part}")
        return "PolyScalar<" + " + ".join(parts) + ">"


class JetScalar:
    """Complex samples on quadrature nodes plus analytic first derivatives.

    ``values`` has shape (n_nodes,); ``grads`` has shape (dim, n_nodes) or is
    None when no derivative data was supplied (after one differentiation,
    for instance).  Products propagate derivatives by the Leibniz rule;
    nothing is ever differentiated numerically.
    """

    __slots__ = ("chart", "values", "grads")

    def __init__(self, chart: Chart, values, grads=None):
        self.chart = chart
        self.values = np.asarray(values, dtype=complex)
        if grads is not None:
            grads = np.asarray(grads, dtype=complex)
            if grads.shape != (chart.dim,) + self.values.shape:
                raise ValueError("gradient shape mismatch")
        self.grads = grads

    @staticmethod
    def const(chart: Chart, c, n_nodes: int) -> "JetScalar":
        v = np.full(n_nodes, complex(c), dtype=complex)
        g = np.zeros((chart.dim, n_nodes), dtype=complex)
        return JetScalar(chart, v, g)

    def _check(self, other: "JetScalar"):
        if self.chart != other.chart or self.values.shape != other.values.shape:
            raise ValueError("jet grids are incompatible")

    def __add__(self, other):
        if not isinstance(other, JetScalar):
            other = JetScalar.const(self.chart, complex(other), len(self.values))
        self._check(other)
        g = None
        if self.grads is not None and other.grads is not None:
            g = self.grads + other.grads
        return JetScalar(self.chart, self.values + other.values, g)

    __radd__ = __add__

    def __neg__(self):
        g = None if self.grads is None else -self.grads
        return JetScalar(self.chart, -self.values, g)

    def __sub__(self, other):
        if not isinstance(other, JetScalar):
            other = JetScalar.const(self.chart, complex(other), len(self.values))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, JetScalar):
            c = complex(other)
            g = None if self.grads is None else self.grads * c
            return JetScalar(self.chart, self.values * c, g)
        self._check(other)
        g = None
        if self.grads is not None and other.grads is not None:
            g = self.grads * other.values[None, :] + self.values[None, :] * other.grads
        return JetScalar(self.chart, self.values * other.values, g)

    __rmul__ = __mul__

    def diff(self, j: int) -> "JetScalar":
        if self.grads is None:
            raise ValueError("no derivative data left (second derivatives unavailable)")
        return JetScalar(self.chart, self.grads[j], None)

    def conj(self) -> "JetScalar":
        g = None if self.grads is None else np.conj(self.grads)
        return JetScalar(self.chart, np.conj(self.values), g)

    def is_zero(self) -> bool:
        return bool(np.all(self.values == 0))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.values))) if self.values.size else 0.0

    def __repr__(self):
        return f"JetScalar<n={self.values.size}, max={self.max_abs():.3e}>"


def scalar_const(chart: Chart, c, like):
    """Constant scalar matching the backend of ``like``."""
    if isinstance(like, PolyScalar):
        return PolyScalar.const(chart, c)
    if isinstance(like, JetScalar):
        return JetScalar.const(chart, complex(c), len(like.values))
    raise TypeError(f"unknown scalar backend {type(like).__name__}")
