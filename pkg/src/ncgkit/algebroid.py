"""Derivations of a matrix-form algebra and their cochain complex.

A derivation is a constant-coefficient vector field lifted through the
gauge connection plus an inner part ad(beta).  Constant anchors commute,
so the bracket of two derivations is purely inner, with the curvature
contribution omega(c, c') entering the inner part.

The Chevalley-Eilenberg differential acts on alternating multilinear
cochains valued in scalar functions; cochains are evaluation closures
since the derivation space is infinite dimensional over a chart.

``derivation_character`` maps cyclic chains to such cochains by the
signed permutation sum of traces, normalized by 1/k! so that it
intertwines the cyclic suspension with the cochain differential.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from typing import Callable, List, Sequence, Tuple

from .cyclic import Chain
from .forms import Connection, MatrixForm
from .scalars import PolyScalar, QQi


def perm_sign(perm: Sequence[int]) -> int:
    inv = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inv += 1
    return -1 if inv % 2 else 1


def form_scalar(a: MatrixForm) -> PolyScalar:
    """Extract the scalar of a 1 x 1 degree-0 form."""
    if a.m != 1 or a.degrees() not in ([], [0]):
        raise ValueError("expected a scalar degree-0 form")
    if a.is_zero():
        return PolyScalar.const(a.chart, 0)
    return a.comps[()][0][0]


class Derivation:
    """X = sum_j c_j (d_j + ad theta_j) + ad beta acting on matrix forms."""

    __slots__ = ("conn", "vector", "beta", "_key")

    def __init__(self, conn: Connection, vector: Sequence = (),
                 beta: MatrixForm = None):
        self.conn = conn
        vec = tuple(QQi.coerce(v) for v in vector) if vector else ()
        if vec and len(vec) != conn.chart.dim:
            raise ValueError("vector part arity must match the chart")
        if not vec:
            vec = tuple(QQi(0) for _ in range(conn.chart.dim))
        self.vector = vec
        if beta is None:
            beta = MatrixForm.zero(conn.chart, conn.m)
        if beta.degrees() not in ([], [0]) or beta.m != conn.m:
            raise ValueError("inner part must be a degree-0 algebra element")
        self.beta = beta
        self._key = None

    @staticmethod
    def inner(conn: Connection, beta: MatrixForm) -> "Derivation":
        return Derivation(conn, (), beta)

    @staticmethod
    def lifted_field(conn: Connection, vector: Sequence) -> "Derivation":
        return Derivation(conn, vector, None)

    def key(self):
        if self._key is None:
            self._key = (self.vector, hash(self.beta))
        return self._key

    def _theta_component(self, j: int) -> MatrixForm:
        mat = self.conn.theta.component((j,))
        return MatrixForm(self.conn.chart, self.conn.m, {(): mat},
                          self.conn.theta.backend, self.conn.theta.nodes)

    def apply(self, a: MatrixForm) -> MatrixForm:
        """Leibniz action on a degree-0 algebra element."""
        if a.degrees() not in ([], [0]):
            raise ValueError("derivations act on degree-0 elements")
        chart = self.conn.chart
        out = MatrixForm.zero(chart, self.conn.m, a.backend, a.nodes)
        for j, c in enumerate(self.vector):
            if c.is_zero():
                continue
            mat = a.component(())
            d_mat = tuple(tuple(x.diff(j) for x in row) for row in mat)
            dj = MatrixForm(chart, a.m, {(): d_mat}, a.backend, a.nodes)
            th = self._theta_component(j)
            out = out + (dj + th * a - a * th).scale(c)
        out = out + self.beta * a - a * self.beta
        return out

    def anchor(self, f: PolyScalar) -> PolyScalar:
        """Action on the scalar center (the underlying vector field)."""
        out = PolyScalar.const(f.chart, 0)
        for j, c in enumerate(self.vector):
            if not c.is_zero():
                out = out + f.diff(j) * c
        return out

    def bracket(self, other: "Derivation") -> "Derivation":
        """[X, Y]: inner since constant anchors commute; includes curvature."""
        conn = self.conn
        gamma = MatrixForm.zero(conn.chart, conn.m)
        x_vec = Derivation(conn, self.vector, None)
        y_vec = Derivation(conn, other.vector, None)
        gamma = gamma + x_vec.apply(other.beta) - y_vec.apply(self.beta)
        gamma = gamma + self.beta * other.beta - other.beta * self.beta
        # curvature term omega(c, c')
        for (i, j), mat in conn.omega.comps.items():
            coef = self.vector[i] * other.vector[j] - self.vector[j] * other.vector[i]
            if coef.is_zero():
                continue
            omega_ij = MatrixForm(conn.chart, conn.m, {(): mat},
                                  conn.theta.backend, conn.theta.nodes)
            gamma = gamma + omega_ij.scale(coef)
        return Derivation(conn, (), gamma)


def leibniz_defect(x: Derivation, a: MatrixForm, b: MatrixForm) -> MatrixForm:
    return x.apply(a * b) - x.apply(a) * b - a * x.apply(b)


class AlternatingForm:
    """Degree-p alternating multilinear cochain valued in scalar functions."""

    def __init__(self, degree: int, evaluate: Callable[..., PolyScalar]):
        self.degree = degree
        self._evaluate = evaluate
        self._cache = {}

    def __call__(self, *xs: Derivation) -> PolyScalar:
        if len(xs) != self.degree:
            raise ValueError(
                f"cochain of degree {self.degree} evaluated on {len(xs)} arguments"
            )
        key = tuple(x.key() for x in xs)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._evaluate(*xs)
            self._cache[key] = hit
        return hit

    @staticmethod
    def from_scalar(f: PolyScalar) -> "AlternatingForm":
        return AlternatingForm(0, lambda: f)

    @staticmethod
    def alternating_from_seeds(seeds: List[Tuple[MatrixForm, MatrixForm]]) -> "AlternatingForm":
        """Antisymmetrized product of trace pairings, one per argument."""
        p = len(seeds)

        def evaluate(*xs: Derivation) -> PolyScalar:
            chart = seeds[0][0].chart
            total = PolyScalar.const(chart, 0)
            for perm in itertools.permutations(range(p)):
                sgn = perm_sign(perm)
                prod = PolyScalar.const(chart, 1)
                for (b, b2), idx in zip(seeds, perm):
                    prod = prod * form_scalar((b * xs[idx].apply(b2)).trace())
                total = total + (prod if sgn > 0 else -prod)
            return total

        return AlternatingForm(p, evaluate)


def ce_differential(omega: AlternatingForm, *xs: Derivation) -> PolyScalar:
    """(d omega)(X_0, ..., X_p) by the Cartan formula.

    Arguments act on values through their anchors; bracket terms use the
    derivation bracket with its curvature contribution.
    """
    p = omega.degree
    if len(xs) != p + 1:
        raise ValueError("argument count must be degree + 1")
    chart = xs[0].conn.chart
    total = PolyScalar.const(chart, 0)
    for i, x in enumerate(xs):
        rest = xs[:i] + xs[i + 1:]
        val = x.anchor(omega(*rest))
        total = total + (val if i % 2 == 0 else -val)
    for i in range(p + 1):
        for j in range(i + 1, p + 1):
            rest = tuple(
                xs[t] for t in range(p + 1) if t != i and t != j
            )
            val = omega(xs[i].bracket(xs[j]), *rest)
            total = total + (-val if (i + j) % 2 else val)
    return total


def ce_d(omega: AlternatingForm) -> AlternatingForm:
    return AlternatingForm(
        omega.degree + 1, lambda *xs: ce_differential(omega, *xs)
    )


def derivation_character(ch: Chain, xs: Sequence[Derivation]) -> PolyScalar:
    """Signed permutation-sum character of a chain on derivation tuples.

    (1/k!) sum_sigma sgn(sigma) tr(b_0 X_{sigma(1)}(b_1) ... X_{sigma(k)}(b_k)).
    The 1/k! normalization makes this intertwine the cyclic suspension
    with the cochain differential exactly.
    """
    k = ch.degree
    if len(xs) != k:
        raise ValueError(f"chain degree {k} needs {k} derivations")
    if not ch.terms:
        probe_chart = xs[0].conn.chart if xs else None
        if probe_chart is None:
            raise ValueError("cannot infer chart from an empty chain with no arguments")
        return PolyScalar.const(probe_chart, 0)
    chart = ch.terms[0][1][0].chart
    total = PolyScalar.const(chart, 0)
    for coef, t in ch.terms:
        acc = PolyScalar.const(chart, 0)
        for perm in itertools.permutations(range(k)):
            sgn = perm_sign(perm)
            prod = t[0]
            for pos in range(k):
                prod = prod * xs[perm[pos]].apply(t[pos + 1])
            val = form_scalar(prod.trace())
            acc = acc + (val if sgn > 0 else -val)
        total = total + acc * (coef * Fraction(1, _factorial(k)))
    return total


def chain_cochain(ch: Chain) -> AlternatingForm:
    return AlternatingForm(ch.degree, lambda *xs: derivation_character(ch, xs))


def _factorial(k: int) -> int:
    out = 1
    for i in range(2, k + 1):
        out *= i
    return out
