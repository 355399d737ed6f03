"""Reduced Hochschild/cyclic chains over a matrix-form algebra.

A chain of degree k is a formal linear combination of elementary tensors
(a_0, ..., a_k) of degree-0 matrix forms.  Slots i >= 1 live in the
algebra modulo constant scalars: any tensor whose interior slot equals a
constant multiple of the identity is annihilated at canonicalization
time, which realizes the normalized (reduced) complex.

The boundary b, the normalized cyclic suspension B, Chern-character
cycles of projections, and the module pushforward of chains all operate
term by term and merge like terms exactly on the exact backend.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, List, Optional, Sequence, Tuple

from . import linalg
from .forms import MatrixForm
from .scalars import QQi


class Chain:
    """Formal linear combination of elementary tensors of algebra elements."""

    __slots__ = ("degree", "terms")

    def __init__(self, degree: int, terms: Sequence[Tuple[QQi, Tuple[MatrixForm, ...]]] = ()):
        self.degree = degree
        merged = {}
        order: List[Tuple[MatrixForm, ...]] = []
        exact = True
        raw = []
        for coef, tensor in terms:
            coef = QQi.coerce(coef)
            tensor = tuple(tensor)
            if len(tensor) != degree + 1:
                raise ValueError("tensor arity does not match chain degree")
            for a in tensor:
                if a.degrees() not in ([], [0]):
                    raise ValueError("chain entries must be degree-0 forms")
                if a.backend != "exact":
                    exact = False
            if coef.is_zero():
                continue
            if any(a.is_zero() for a in tensor):
                continue
            # reduced normalization: interior scalar slots annihilate
            if any(a.is_scalar_multiple_of_identity() for a in tensor[1:]):
                continue
            raw.append((coef, tensor))
        if exact:
            for coef, tensor in raw:
                if tensor in merged:
                    merged[tensor] = merged[tensor] + coef
                else:
                    merged[tensor] = coef
                    order.append(tensor)
            self.terms = tuple(
                (merged[t], t) for t in order if not merged[t].is_zero()
            )
        else:
            self.terms = tuple(raw)

    @staticmethod
    def of(*entries: MatrixForm) -> "Chain":
        return Chain(len(entries) - 1, [(QQi(1), tuple(entries))])

    def __add__(self, other: "Chain") -> "Chain":
        if self.degree != other.degree:
            raise ValueError("cannot add chains of different degree")
        return Chain(self.degree, list(self.terms) + list(other.terms))

    def __neg__(self) -> "Chain":
        return Chain(self.degree, [(-c, t) for c, t in self.terms])

    def __sub__(self, other: "Chain") -> "Chain":
        return self + (-other)

    def scale(self, c) -> "Chain":
        c = QQi.coerce(c)
        return Chain(self.degree, [(c * x, t) for x, t in self.terms])

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, Chain):
            return NotImplemented
        return (self - other).is_zero()

    def __repr__(self):
        return f"Chain<deg={self.degree}, terms={len(self.terms)}>"


def hochschild_b(ch: Chain) -> Chain:
    """Boundary b: alternating contraction of neighbors, wrap-around last."""
    k = ch.degree
    if k < 1:
        return Chain(max(k - 1, 0), [])
    out = []
    for coef, t in ch.terms:
        for i in range(k):
            sign = -1 if i % 2 else 1
            merged = t[:i] + (t[i] * t[i + 1],) + t[i + 2:]
            out.append((coef * sign, merged))
        sign = -1 if k % 2 else 1
        out.append((coef * sign, (t[k] * t[0],) + t[1:k]))
    return Chain(k - 1, out)


def connes_B(ch: Chain) -> Chain:
    """Normalized cyclic suspension B on the reduced complex."""
    k = ch.degree
    out = []
    for coef, t in ch.terms:
        probe = t[0]
        one = MatrixForm.identity(probe.chart, probe.m, probe.backend, probe.nodes)
        for i in range(k + 1):
            sign = -1 if (k * i) % 2 else 1
            rotated = t[i:] + t[:i]
            out.append((coef * sign, (one,) + rotated))
    return Chain(k + 1, out)


def cyclic_permute(ch: Chain) -> Chain:
    """Signed cyclic rotation lambda(a_0,...,a_k) = (-1)^k (a_k, a_0, ...)."""
    k = ch.degree
    sign = QQi(-1 if k % 2 else 1)
    return Chain(k, [(c * sign, (t[-1],) + t[:-1]) for c, t in ch.terms])


def cyclic_project(ch: Chain) -> Chain:
    """Average over signed cyclic rotations.

    This is the projection onto lambda-invariants along the image of
    (1 - lambda); a chain vanishes in the cyclic quotient complex exactly
    when its projection is zero.
    """
    out = ch
    rotated = ch
    for _ in range(ch.degree):
        rotated = cyclic_permute(rotated)
        out = out + rotated
    return out.scale(Fraction(1, ch.degree + 1))


def _form_coordinates(a: MatrixForm) -> dict:
    """Finite QQi-coordinate vector of an exact degree-0 form."""
    out = {}
    for idx, mat in a.comps.items():
        for i, row in enumerate(mat):
            for j, entry in enumerate(row):
                for mono, c in entry.coeffs.items():
                    out[(idx, i, j, mono)] = c
    return out


def _span_basis(vectors: List[dict]) -> List[dict]:
    """Reduced basis of the span of sparse QQi vectors (exact elimination)."""
    basis: List[dict] = []
    pivots: List[tuple] = []
    for v in vectors:
        v = dict(v)
        for b, piv in zip(basis, pivots):
            c = v.get(piv)
            if c is not None and not c.is_zero():
                for k2, x in b.items():
                    nv = v.get(k2, QQi(0)) - c * x
                    if nv.is_zero():
                        v.pop(k2, None)
                    else:
                        v[k2] = nv
        v = {k2: x for k2, x in v.items() if not x.is_zero()}
        if v:
            piv = min(v)
            inv = v[piv].inverse()
            v = {k2: inv * x for k2, x in v.items()}
            basis.append(v)
            pivots.append(piv)
    return basis


def _coords_in_basis(v: dict, basis: List[dict]) -> List[QQi]:
    v = dict(v)
    coords = []
    for b in basis:
        piv = min(b)
        c = v.get(piv, QQi(0))
        coords.append(c)
        if not c.is_zero():
            for k2, x in b.items():
                nv = v.get(k2, QQi(0)) - c * x
                if nv.is_zero():
                    v.pop(k2, None)
                else:
                    v[k2] = nv
    if any(not x.is_zero() for x in v.values()):
        raise ValueError("vector not in span of basis")
    return coords


def tensor_is_zero(ch: Chain) -> bool:
    """Zero test in the reduced tensor product.

    The free-module representation of chains does not merge tensors that
    agree only after expanding slots linearly; this test expands every
    slot over an exact basis of the values appearing at that position.
    Interior slots (position >= 1) are expanded modulo the constant
    identity, matching the normalized complex.
    """
    if not ch.terms:
        return True
    k = ch.degree
    probe = ch.terms[0][1][0]
    id_vec = _form_coordinates(
        MatrixForm.identity(probe.chart, probe.m, probe.backend, probe.nodes)
    )
    slot_vectors = [[] for _ in range(k + 1)]
    for _, t in ch.terms:
        for pos, a in enumerate(t):
            slot_vectors[pos].append(_form_coordinates(a))
    bases = []
    for pos, vs in enumerate(slot_vectors):
        if pos == 0:
            bases.append(_span_basis(vs))
        else:
            # identity first so its coordinate can be discarded (quotient)
            bases.append(_span_basis([id_vec] + vs))
    cells: dict = {}
    for coef, t in ch.terms:
        coords = []
        for pos, a in enumerate(t):
            c_full = _coords_in_basis(_form_coordinates(a), bases[pos])
            if pos >= 1:
                c_full = c_full[1:]  # drop the identity direction
            coords.append(c_full)
        # distribute the multilinear expansion over basis cells
        stack = [((), coef)]
        for pos in range(k + 1):
            nxt = []
            for cell, c in stack:
                for bi, x in enumerate(coords[pos]):
                    if x.is_zero():
                        continue
                    nxt.append((cell + (bi,), c * x))
            stack = nxt
        for cell, c in stack:
            s = cells.get(cell, QQi(0)) + c
            if s.is_zero():
                cells.pop(cell, None)
            else:
                cells[cell] = s
    return not cells


def tensor_eq(a: Chain, b: Chain) -> bool:
    return tensor_is_zero(a - b)


class Projection:
    """Hermitian idempotent matrix over the degree-0 algebra.

    ``form`` is the full (blocks*base_m) x (blocks*base_m) matrix form;
    ``blocks`` is the auxiliary matrix factor traced out by the partial
    trace, ``base_m`` the size of the underlying algebra.
    """

    def __init__(self, form: MatrixForm, blocks: int, base_m: int,
                 tol: float = 1e-12, check: bool = True):
        if form.m != blocks * base_m:
            raise ValueError("projection size does not factor as blocks*base_m")
        if form.degrees() not in ([], [0]):
            raise ValueError("projection must be a degree-0 form")
        if check:
            idem = form * form - form
            herm = form - form.conj_transpose()
            if form.backend == "exact":
                if not idem.is_zero():
                    raise ValueError("matrix is not idempotent")
                if not herm.is_zero():
                    raise ValueError("matrix is not Hermitian")
            else:
                if idem.max_abs() > tol or herm.max_abs() > tol:
                    raise ValueError("matrix is not a projection to tolerance")
        self.form = form
        self.blocks = blocks
        self.base_m = base_m

    def block(self, i: int, j: int) -> MatrixForm:
        return self.form.block(i, j, self.base_m)


def _partial_trace_tensor(blocks_entries, s: int, scale: QQi) -> List[Tuple[QQi, tuple]]:
    """All index cycles (i0 i1, i1 i2, ..., ik i0) of a block matrix power."""
    import itertools

    k = len(blocks_entries) - 1
    out = []
    for idx in itertools.product(range(s), repeat=k + 1):
        tensor = tuple(
            blocks_entries[t][idx[t]][idx[(t + 1) % (k + 1)]]
            for t in range(k + 1)
        )
        out.append((scale, tensor))
    return out


def chern_cyclic(p: Projection, m: int) -> Chain:
    """Cyclic Chern cycle of degree 2m: (-1)^m (2m)!/m! tr(p tensor 2m+1).

    tr is the partial trace over the auxiliary block factor, producing a
    chain over the base algebra.
    """
    coef = QQi(Fraction((-1) ** m * factorial(2 * m), factorial(m)))
    s = p.blocks
    blocks = [
        [[p.block(i, j) for j in range(s)] for i in range(s)]
        for _ in range(2 * m + 1)
    ]
    return Chain(2 * m, _partial_trace_tensor(blocks, s, coef))


def chern_bB(p: Projection, m: int) -> Chain:
    """Normalized mixed-complex cycle: first slot carries p - 1/2."""
    coef = QQi(Fraction((-1) ** m * factorial(2 * m), factorial(m)))
    s = p.blocks
    probe = p.form
    half_id = MatrixForm.identity(
        probe.chart, p.base_m, probe.backend, probe.nodes
    ).scale(Fraction(1, 2))
    first = [
        [
            p.block(i, j) - half_id if i == j else p.block(i, j)
            for j in range(s)
        ]
        for i in range(s)
    ]
    rest = [[[p.block(i, j) for j in range(s)] for i in range(s)]
            for _ in range(2 * m)]
    return Chain(2 * m, _partial_trace_tensor([first] + rest, s, coef))


class BlockMap:
    """Algebra morphism alpha: B -> p M_s(A) p given by a matrix of images.

    ``apply`` sends a source element to an (s*target_m) matrix form.  The
    unit must land on the corner projection p.
    """

    def __init__(self, apply: Callable[[MatrixForm], MatrixForm], s: int,
                 target_m: int, unit_source: MatrixForm,
                 corner: MatrixForm):
        self.apply = apply
        self.s = s
        self.target_m = target_m
        image_of_unit = apply(unit_source)
        if image_of_unit.backend == "exact":
            ok = image_of_unit == corner
        else:
            ok = image_of_unit.approx_eq(corner, 1e-10)
        if not ok:
            raise ValueError("morphism is not unital onto the corner projection")
        self.corner = corner

    @staticmethod
    def corner_embedding(s: int, slot: int, unit_source: MatrixForm) -> "BlockMap":
        """b -> diag(0, ..., b, ..., 0) with the unit in one slot."""
        chart = unit_source.chart
        mb = unit_source.m

        def apply(b: MatrixForm) -> MatrixForm:
            zero = MatrixForm.zero(chart, mb, b.backend, b.nodes)
            rows = [
                [b if (i == slot and j == slot) else zero for j in range(s)]
                for i in range(s)
            ]
            return MatrixForm.from_blocks(rows)

        return BlockMap(apply, s, mb, unit_source, apply(unit_source))

    def conjugate(self, u) -> "BlockMap":
        """Compose with conjugation by a constant exact unitary u (s*m)."""
        u_form = self._unitary_form(u)
        u_inv = u_form.conj_transpose()
        inner = self.apply

        def apply(b: MatrixForm) -> MatrixForm:
            return u_form * inner(b) * u_inv

        new = object.__new__(BlockMap)
        new.apply = apply
        new.s = self.s
        new.target_m = self.target_m
        new.corner = u_form * self.corner * u_inv
        return new

    def _unitary_form(self, u) -> MatrixForm:
        probe = self.corner
        return MatrixForm.const_matrix(probe.chart, u, probe.backend, probe.nodes)


def pushforward_chain(alpha: BlockMap, ch: Chain) -> Chain:
    """Image chain sum over index cycles of the block entries."""
    out = []
    s = alpha.s
    for coef, t in ch.terms:
        images = [alpha.apply(a) for a in t]
        blocks = [
            [[img.block(i, j, alpha.target_m) for j in range(s)] for i in range(s)]
            for img in images
        ]
        out.extend(_partial_trace_tensor(blocks, s, coef))
    return Chain(ch.degree, out)


def find_boundary_witness(target: Chain,
                          candidates: Sequence[Tuple[MatrixForm, ...]]) -> Optional[Chain]:
    """Search an exact chain w supported on ``candidates`` with b(w) = target.

    Solves the linear system over the Gaussian rationals spanned by the
    boundaries of the candidate tensors; returns the witness chain or
    None when the target is not a combination of those boundaries.
    """
    if not candidates:
        return None if not target.is_zero() else Chain(target.degree + 1, [])
    cand_chains = [Chain(target.degree + 1, [(QQi(1), tuple(t))]) for t in candidates]
    boundaries = [hochschild_b(c) for c in cand_chains]
    basis: List[tuple] = []
    index = {}

    def key_of(tensor):
        return tuple(hash(a) for a in tensor), tensor

    for b in boundaries + [target]:
        for _, tensor in b.terms:
            k = key_of(tensor)[0]
            if k not in index:
                index[k] = len(basis)
                basis.append(tensor)
    rows = len(basis)
    a_mat = [[QQi(0)] * len(boundaries) for _ in range(rows)]
    for cidx, b in enumerate(boundaries):
        for coef, tensor in b.terms:
            a_mat[index[key_of(tensor)[0]]][cidx] = coef
    rhs = [QQi(0)] * rows
    for coef, tensor in target.terms:
        rhs[index[key_of(tensor)[0]]] = coef
    x = linalg.qq_solve(a_mat, rhs)
    if x is None:
        return None
    return Chain(
        target.degree + 1,
        [(xi, tuple(t)) for xi, t in zip(x, candidates)],
    )


def chain_to_text(ch: Chain) -> str:
    """Stable text rendering for golden-file tests (exact backend)."""
    from .forms import matrixform_to_text

    lines = [f"chain v1 degree {ch.degree} terms {len(ch.terms)}"]
    rendered = []
    for coef, tensor in ch.terms:
        body = "|".join(
            matrixform_to_text(a).replace("\n", "~") for a in tensor
        )
        rendered.append(f"term {coef} : {body}")
    lines.extend(sorted(rendered))
    return "\n".join(lines) + "\n"
