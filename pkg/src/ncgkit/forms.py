"""Graded algebra of matrix-valued differential forms on a chart.

A ``MatrixForm`` stores, for each sorted coordinate index tuple I, an
m x m matrix of scalar coefficients (exact ``PolyScalar`` or sampled
``JetScalar``).  The product carries the Koszul sign on form indices
only; matrices multiply without extra signs.

On top of that sit gauge connections: theta is a matrix 1-form, the
curvature is omega = d theta + theta^theta, and the traceless lift
sigma = omega - (tr omega / m) Id.  The covariant derivative acts as the
graded commutator nabla a = da + theta^a - (-1)^|a| a^theta, which is
the unique graded-derivation extension compatible with tr o nabla =
d o tr.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Tuple

import numpy as np

from . import linalg
from .scalars import (
    AFFINE,
    PERIODIC,
    Chart,
    JetScalar,
    PolyScalar,
    QQi,
    scalar_const,
)

IdxTuple = Tuple[int, ...]


class ShapeMismatch(ValueError):
    pass


def merge_sign(i_tuple: IdxTuple, j_tuple: IdxTuple) -> int:
    inv = 0
    for i in i_tuple:
        for j in j_tuple:
            if i > j:
                inv += 1
    return -1 if inv % 2 else 1


class MatrixForm:
    """Mixed-degree matrix-valued differential form on a chart."""

    __slots__ = ("chart", "m", "backend", "nodes", "comps", "_hash")

    def __init__(self, chart: Chart, m: int, comps: Dict[IdxTuple, tuple],
                 backend: str = "exact", nodes: Optional[int] = None):
        self.chart = chart
        self.m = m
        self.backend = backend
        self.nodes = nodes
        clean: Dict[IdxTuple, tuple] = {}
        for idx, mat in (comps or {}).items():
            idx = tuple(idx)
            if len(set(idx)) != len(idx) or tuple(sorted(idx)) != idx:
                raise ValueError(f"index tuple {idx} is not strictly increasing")
            if any(not (0 <= i < chart.dim) for i in idx):
                raise ValueError(f"index tuple {idx} outside chart")
            if linalg.mat_shape(mat) != (m, m):
                raise ShapeMismatch("component matrix has wrong shape")
            if not linalg.mat_is_zero(mat):
                clean[idx] = mat
        self.comps = clean
        self._hash = None

    # -- constructors ---------------------------------------------------

    @staticmethod
    def zero(chart: Chart, m: int, backend: str = "exact",
             nodes: Optional[int] = None) -> "MatrixForm":
        return MatrixForm(chart, m, {}, backend, nodes)

    @staticmethod
    def identity(chart: Chart, m: int, backend: str = "exact",
                 nodes: Optional[int] = None) -> "MatrixForm":
        return MatrixForm.const_matrix(
            chart,
            linalg.mat_eye(m, QQi(0), QQi(1)),
            backend,
            nodes,
        )

    @staticmethod
    def const_matrix(chart: Chart, mat, backend: str = "exact",
                     nodes: Optional[int] = None) -> "MatrixForm":
        """Degree-0 form with constant matrix entries (QQi-valued input)."""
        m = len(mat)
        if backend == "exact":
            rows = tuple(
                tuple(PolyScalar.const(chart, QQi.coerce(x)) for x in row)
                for row in mat
            )
        else:
            if nodes is None:
                raise ValueError("numeric backend needs the node count")
            rows = tuple(
                tuple(JetScalar.const(chart, complex(x), nodes) for x in row)
                for row in mat
            )
        return MatrixForm(chart, m, {(): rows}, backend, nodes)

    @staticmethod
    def from_scalar(s, m: int = 1, idx: IdxTuple = ()) -> "MatrixForm":
        """Wrap one scalar coefficient as an m x m multiple of the identity."""
        chart = s.chart
        backend = "exact" if isinstance(s, PolyScalar) else "jet"
        nodes = None if backend == "exact" else len(s.values)
        zero = scalar_const(chart, 0, s)
        mat = tuple(
            tuple(s if i == j else zero for j in range(m)) for i in range(m)
        )
        return MatrixForm(chart, m, {tuple(idx): mat}, backend, nodes)

    @staticmethod
    def from_entries(chart: Chart, idx: IdxTuple, entries) -> "MatrixForm":
        entries = tuple(tuple(row) for row in entries)
        probe = entries[0][0]
        backend = "exact" if isinstance(probe, PolyScalar) else "jet"
        nodes = None if backend == "exact" else len(probe.values)
        return MatrixForm(chart, len(entries), {tuple(idx): entries}, backend, nodes)

    # -- structure ------------------------------------------------------

    def _zero_scalar(self):
        if self.backend == "exact":
            return PolyScalar.const(self.chart, 0)
        return JetScalar.const(self.chart, 0.0, self.nodes)

    def _check(self, other: "MatrixForm"):
        if self.chart != other.chart or self.backend != other.backend:
            raise ShapeMismatch("forms live on different charts or backends")
        if self.backend == "jet" and self.nodes != other.nodes:
            raise ShapeMismatch("sample grids differ")

    def degrees(self) -> List[int]:
        return sorted({len(i) for i in self.comps})

    def degree_part(self, k: int) -> "MatrixForm":
        comps = {i: m for i, m in self.comps.items() if len(i) == k}
        return MatrixForm(self.chart, self.m, comps, self.backend, self.nodes)

    def is_homogeneous(self) -> bool:
        return len(self.degrees()) <= 1

    def is_zero(self) -> bool:
        return not self.comps

    def component(self, idx: IdxTuple):
        z = self._zero_scalar()
        return self.comps.get(
            tuple(idx), linalg.mat_zero(self.m, self.m, z)
        )

    # -- ring operations --------------------------------------------------

    def __add__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            other = MatrixForm.const_matrix(
                self.chart,
                linalg.mat_scale(QQi.coerce(other), linalg.mat_eye(self.m, QQi(0), QQi(1))),
                self.backend,
                self.nodes,
            )
        self._check(other)
        if self.m != other.m:
            raise ShapeMismatch(f"matrix sizes differ: {self.m} vs {other.m}")
        out = dict(self.comps)
        for idx, mat in other.comps.items():
            if idx in out:
                out[idx] = linalg.mat_add(out[idx], mat)
            else:
                out[idx] = mat
        return MatrixForm(self.chart, self.m, out, self.backend, self.nodes)

    __radd__ = __add__

    def __neg__(self):
        return MatrixForm(
            self.chart,
            self.m,
            {i: linalg.mat_neg(m) for i, m in self.comps.items()},
            self.backend,
            self.nodes,
        )

    def __sub__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            return self + (-QQi.coerce(other))
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "MatrixForm":
        if self.backend == "jet" and isinstance(c, (QQi, Fraction)):
            c = complex(c)
        return MatrixForm(
            self.chart,
            self.m,
            {i: linalg.mat_scale(c, m) for i, m in self.comps.items()},
            self.backend,
            self.nodes,
        )

    def __mul__(self, other):
        """Graded product; a 1 x 1 factor acts as a scalar form."""
        if isinstance(other, (int, Fraction, QQi)):
            return self.scale(QQi.coerce(other) if self.backend == "exact" else complex(QQi.coerce(other)))
        if isinstance(other, (PolyScalar, JetScalar)):
            other = MatrixForm.from_scalar(other, 1)
        self._check(other)
        if self.m != other.m and 1 not in (self.m, other.m):
            raise ShapeMismatch(f"matrix sizes differ: {self.m} vs {other.m}")
        m_out = max(self.m, other.m)
        out: Dict[IdxTuple, tuple] = {}
        for i_idx, a in self.comps.items():
            i_set = set(i_idx)
            for j_idx, b in other.comps.items():
                if i_set & set(j_idx):
                    continue
                if len(i_idx) + len(j_idx) > self.chart.dim:
                    continue
                sign = merge_sign(i_idx, j_idx)
                if self.m == other.m:
                    mat = linalg.mat_mul(a, b)
                elif self.m == 1:
                    mat = linalg.mat_scale(a[0][0], b)
                else:
                    mat = linalg.mat_scale(b[0][0], a)
                if sign < 0:
                    mat = linalg.mat_neg(mat)
                k = tuple(sorted(i_idx + j_idx))
                if k in out:
                    out[k] = linalg.mat_add(out[k], mat)
                else:
                    out[k] = mat
        return MatrixForm(self.chart, m_out, out, self.backend, self.nodes)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            return self * other
        if isinstance(other, (PolyScalar, JetScalar)):
            return MatrixForm.from_scalar(other, 1) * self
        return NotImplemented

    def trace(self) -> "MatrixForm":
        out = {}
        for idx, mat in self.comps.items():
            out[idx] = ((linalg.mat_trace(mat),),)
        return MatrixForm(self.chart, 1, out, self.backend, self.nodes)

    def conj_transpose(self) -> "MatrixForm":
        """Entrywise conjugate transpose per component (degree-0 adjoint)."""
        out = {
            idx: linalg.mat_conj_transpose(mat) for idx, mat in self.comps.items()
        }
        return MatrixForm(self.chart, self.m, out, self.backend, self.nodes)

    def amplify(self, s: int) -> "MatrixForm":
        """Block-diagonal amplification Id_s (x) A."""
        z = self._zero_scalar()
        out = {}
        for idx, mat in self.comps.items():
            big = [[z] * (s * self.m) for _ in range(s * self.m)]
            for b in range(s):
                for i in range(self.m):
                    for j in range(self.m):
                        big[b * self.m + i][b * self.m + j] = mat[i][j]
            out[idx] = tuple(tuple(row) for row in big)
        return MatrixForm(self.chart, s * self.m, out, self.backend, self.nodes)

    def block(self, i: int, j: int, mb: int) -> "MatrixForm":
        """The (i, j) block of size mb when the form is s*mb x s*mb."""
        out = {}
        for idx, mat in self.comps.items():
            sub = tuple(
                tuple(mat[i * mb + a][j * mb + b] for b in range(mb))
                for a in range(mb)
            )
            out[idx] = sub
        return MatrixForm(self.chart, mb, out, self.backend, self.nodes)

    @staticmethod
    def from_blocks(blocks) -> "MatrixForm":
        """Assemble an s x s grid of equal-size forms into one form."""
        s = len(blocks)
        probe = blocks[0][0]
        mb = probe.m
        chart, backend, nodes = probe.chart, probe.backend, probe.nodes
        z = probe._zero_scalar()
        idxs = set()
        for row in blocks:
            for blk in row:
                idxs |= set(blk.comps)
        out = {}
        for idx in idxs:
            big = [[z] * (s * mb) for _ in range(s * mb)]
            for bi, row in enumerate(blocks):
                for bj, blk in enumerate(row):
                    mat = blk.comps.get(idx)
                    if mat is None:
                        continue
                    for a in range(mb):
                        for b in range(mb):
                            big[bi * mb + a][bj * mb + b] = mat[a][b]
            out[idx] = tuple(tuple(r) for r in big)
        return MatrixForm(chart, s * mb, out, backend, nodes)

    # -- predicates -------------------------------------------------------

    def __eq__(self, other):
        if not isinstance(other, MatrixForm):
            return NotImplemented
        if (self.chart, self.m, self.backend) != (other.chart, other.m, other.backend):
            return False
        if self.backend == "jet":
            return self.approx_eq(other, 0.0)
        return set(self.comps) == set(other.comps) and all(
            linalg.mat_eq(self.comps[i], other.comps[i]) for i in self.comps
        )

    def __hash__(self):
        if self.backend != "exact":
            raise TypeError("numeric forms are not hashable")
        if self._hash is None:
            key = tuple(
                (idx, tuple(tuple(x.key() for x in row) for row in mat))
                for idx, mat in sorted(self.comps.items())
            )
            self._hash = hash((self.chart, self.m, key))
        return self._hash

    def max_abs(self) -> float:
        """Largest sample magnitude over all components (numeric backend)."""
        best = 0.0
        for mat in self.comps.values():
            for row in mat:
                for x in row:
                    if isinstance(x, JetScalar):
                        best = max(best, x.max_abs())
                    else:
                        for c in x.coeffs.values():
                            best = max(best, abs(complex(c)))
        return best

    def approx_eq(self, other: "MatrixForm", tol: float = 1e-12) -> bool:
        return (self - other).max_abs() <= tol

    def is_scalar_multiple_of_identity(self) -> bool:
        """Degree-0 test: equals lambda * Id for a constant lambda."""
        if self.is_zero():
            return True
        if self.degrees() != [0]:
            return False
        mat = self.comps[()]
        diag = mat[0][0]
        if self.backend == "exact":
            if not diag.is_constant():
                return False
        else:
            v = diag.values
            if v.size and float(np.max(np.abs(v - v.flat[0]))) > 1e-12:
                return False
        for i in range(self.m):
            for j in range(self.m):
                want = diag if i == j else self._zero_scalar()
                if self.backend == "exact":
                    if not (mat[i][j] - want).is_zero():
                        return False
                else:
                    if (mat[i][j] - want).max_abs() > 1e-12:
                        return False
        return True

    def __repr__(self):
        degs = ",".join(map(str, self.degrees())) or "-"
        return f"MatrixForm<m={self.m}, deg={degs}, {self.backend}>"


def wedge(a: MatrixForm, b: MatrixForm) -> MatrixForm:
    """Graded product (A dx_I)(B dx_J) = (A B) dx_I^dx_J."""
    return a * b


def exterior_d(a: MatrixForm) -> MatrixForm:
    """Exterior differential, entrywise on coefficients."""
    out: Dict[IdxTuple, tuple] = {}
    for idx, mat in a.comps.items():
        for j in range(a.chart.dim):
            if j in idx:
                continue
            sign = -1 if sum(1 for i in idx if i < j) % 2 else 1
            d_mat = tuple(tuple(x.diff(j) for x in row) for row in mat)
            if sign < 0:
                d_mat = linalg.mat_neg(d_mat)
            k = tuple(sorted(idx + (j,)))
            if k in out:
                out[k] = linalg.mat_add(out[k], d_mat)
            else:
                out[k] = d_mat
    return MatrixForm(a.chart, a.m, out, a.backend, a.nodes)


class Connection:
    """Gauge data on a chart: lift 1-form, curvature, traceless lift.

    ``sigma`` is the unique traceless matrix 2-form with the same
    curvature action as omega; nabla is the graded commutator with theta
    on top of d.
    """

    def __init__(self, theta: MatrixForm, sigma: Optional[MatrixForm] = None):
        if theta.degrees() not in ([], [1]):
            raise ValueError("connection lift must be a 1-form")
        self.chart = theta.chart
        self.m = theta.m
        self.theta = theta
        self.omega = exterior_d(theta) + theta * theta
        if sigma is None:
            residue = self.omega.trace().scale(Fraction(1, self.m))
            sigma = self.omega - residue * MatrixForm.identity(
                theta.chart, theta.m, theta.backend, theta.nodes
            )
        self.sigma = sigma

    @staticmethod
    def flat(chart: Chart, m: int, backend: str = "exact",
             nodes: Optional[int] = None) -> "Connection":
        return Connection(MatrixForm.zero(chart, m, backend, nodes))

    @staticmethod
    def with_sigma(sigma: MatrixForm) -> "Connection":
        """Connection with zero gauge 1-form and an external curvature lift.

        Used for geometries whose sigma acts trivially on the registered
        algebra (scalar-entried sections), where nabla reduces to d.
        """
        conn = Connection(
            MatrixForm.zero(sigma.chart, sigma.m, sigma.backend, sigma.nodes)
        )
        conn.sigma = sigma
        return conn

    def scalar_residue(self) -> MatrixForm:
        return self.omega.trace().scale(Fraction(1, self.m))

    def nabla(self, a: MatrixForm) -> MatrixForm:
        """Graded covariant derivative da + theta^a - (-1)^|a| a^theta."""
        if a.m != self.m:
            raise ShapeMismatch("form size does not match connection")
        out = exterior_d(a)
        for k in a.degrees():
            ak = a.degree_part(k)
            out = out + self.theta * ak
            ta = ak * self.theta
            if k % 2 == 0:
                out = out - ta
            else:
                out = out + ta
        return out

    def amplify(self, s: int) -> "Connection":
        conn = Connection(self.theta.amplify(s))
        conn.sigma = self.sigma.amplify(s)
        return conn


def curvature_and_lift(theta: MatrixForm) -> Connection:
    """Curvature omega = d theta + theta^theta and its traceless lift."""
    return Connection(theta)


def dd_representative(conn: Connection, beta: Optional[MatrixForm] = None,
                      check: bool = True) -> MatrixForm:
    """Closed scalar 3-form representing the obstruction class of a lift.

    The traceless-lift contribution vanishes identically (flatness of
    sigma under nabla, verified when ``check``); what remains is the
    differential of the declared scalar discrepancy 2-form ``beta``,
    whose 2*pi*i normalization cancels exactly.  On a single chart with
    no declared discrepancy the representative is zero.
    """
    if check:
        defect = conn.nabla(conn.sigma)
        if not (defect.is_zero() or defect.max_abs() <= 1e-10):
            raise ValueError("traceless lift fails its flatness identity")
    if beta is None:
        return MatrixForm.zero(conn.chart, 1, conn.theta.backend, conn.theta.nodes)
    if beta.m != 1 or beta.degrees() not in ([], [2]):
        raise ValueError("declared discrepancy must be a scalar 2-form")
    return exterior_d(beta)


def twisted_d(c: MatrixForm, w: MatrixForm) -> MatrixForm:
    """Twisted differential d_c w = dw + c^w for a closed scalar 3-form c."""
    if c.m != 1:
        raise ValueError("twist must be a scalar form")
    if not c.is_zero() and c.degrees() != [3]:
        raise ValueError("twist must be homogeneous of degree 3")
    if not exterior_d(c).is_zero():
        raise ValueError("twist form is not closed")
    return exterior_d(w) + c * w


def exp_form(beta: MatrixForm) -> MatrixForm:
    """exp(beta) as a finite sum; nilpotency in form degree truncates it."""
    out = MatrixForm.identity(beta.chart, beta.m, beta.backend, beta.nodes)
    power = out
    k = 1
    while True:
        power = power * beta
        if power.is_zero():
            break
        out = out + power.scale(Fraction(1, factorial(k)))
        k += 1
        if k > beta.chart.dim + 1:
            break
    return out


def exp_beta_intertwiner(beta: MatrixForm, w: MatrixForm) -> MatrixForm:
    """Chain map w -> w ^ exp(beta) between twisted complexes.

    Satisfies d_{c2}(w ^ exp beta) = (d_{c1} w) ^ exp beta whenever
    c1 = c2 + d beta.
    """
    if beta.m != 1 or (not beta.is_zero() and beta.degrees() != [2]):
        raise ValueError("shift must be a scalar 2-form")
    return w * exp_form(beta)


# -- serialization ------------------------------------------------------

_KIND_CODE = {AFFINE: "a", PERIODIC: "p"}
_CODE_KIND = {v: k for k, v in _KIND_CODE.items()}


def matrixform_to_text(a: MatrixForm) -> str:
    """Stable text rendering of an exact form for golden-file comparison."""
    if a.backend != "exact":
        raise ValueError("only exact forms serialize to text")
    lines = ["matrixform v1"]
    lines.append("chart " + ",".join(_KIND_CODE[k] for k in a.chart.kinds))
    lines.append(f"m {a.m}")
    for idx in sorted(a.comps):
        lines.append("comp " + (",".join(map(str, idx)) if idx else "-"))
        mat = a.comps[idx]
        for i in range(a.m):
            for j in range(a.m):
                entry = mat[i][j]
                if entry.is_zero():
                    continue
                terms = " ; ".join(
                    "(" + ",".join(map(str, mono)) + ")=" + str(c)
                    for mono, c in sorted(entry.coeffs.items())
                )
                lines.append(f"e {i} {j} : {terms}")
    return "\n".join(lines) + "\n"


def matrixform_from_text(text: str) -> MatrixForm:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "matrixform v1":
        raise ValueError("not a matrixform v1 document")
    chart = Chart(tuple(_CODE_KIND[c] for c in lines[1].split()[1].split(",")))
    m = int(lines[2].split()[1])
    comps: Dict[IdxTuple, list] = {}
    idx: IdxTuple = ()
    for ln in lines[3:]:
        if ln.startswith("comp"):
            tok = ln.split()[1]
            idx = () if tok == "-" else tuple(int(x) for x in tok.split(","))
            comps[idx] = [
                [PolyScalar.const(chart, 0) for _ in range(m)] for _ in range(m)
            ]
        elif ln.startswith("e "):
            head, terms = ln.split(":", 1)
            _, i, j = head.split()
            coeffs = {}
            for term in terms.split(";"):
                term = term.strip()
                if not term:
                    continue
                mono_s, c_s = term.split("=")
                mono = tuple(
                    int(x) for x in mono_s.strip()[1:-1].split(",") if x != ""
                )
                if not mono:
                    mono = ()
                coeffs[mono] = QQi.parse(c_s)
            comps[idx][int(i)][int(j)] = PolyScalar(chart, coeffs)
    final = {
        k: tuple(tuple(row) for row in v) for k, v in comps.items()
    }
    return MatrixForm(chart, m, final, "exact", None)
