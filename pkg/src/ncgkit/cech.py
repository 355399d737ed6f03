"""Finite-nerve transition-cocycle machinery.

Unitary lifts of projective transition data live on the edges of a
nerve; the scalar defects of triple products give a phase 2-cochain mu,
a real logarithm branch nu in [0,1), and an integer 3-cochain delta
whose class in H^3 of the nerve obstructs global de-projectivization.

Certification is two-step: the multiplicative cocycle identity for mu
is checked exactly (Gaussian-rational backend), which forces the
coboundary of nu to be integer-valued; floating point then only has to
identify which integer, with a residual far below one half.

Integer simplicial cohomology is computed by Smith normal form with
deterministic pivoting, including explicit witness cochains for the
rank-n torsion relation n*[delta] = 0.
"""

from __future__ import annotations

import cmath
import json
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import intlinalg, linalg
from .scalars import QQi

Simplex = Tuple[int, ...]


class NotProjectiveCocycle(ValueError):
    pass


class Nerve:
    """Abstract simplicial complex, face-closed, oriented by vertex order."""

    def __init__(self, simplices: Sequence[Sequence[int]]):
        closed = set()
        for s in simplices:
            s = tuple(sorted(set(s)))
            if not s:
                continue
            for mask in range(1, 1 << len(s)):
                face = tuple(v for i, v in enumerate(s) if mask >> i & 1)
                closed.add(face)
        self.simplices = closed
        self.vertices = sorted({v for s in closed for v in s})

    def k_simplices(self, k: int) -> List[Simplex]:
        return sorted(s for s in self.simplices if len(s) == k + 1)

    def coboundary_matrix(self, k: int) -> List[List[int]]:
        """Matrix of the coboundary C^k -> C^{k+1} in sorted-simplex bases."""
        rows = self.k_simplices(k + 1)
        cols = {s: i for i, s in enumerate(self.k_simplices(k))}
        out = [[0] * len(cols) for _ in rows]
        for r, s in enumerate(rows):
            for j in range(len(s)):
                face = s[:j] + s[j + 1:]
                out[r][cols[face]] += (-1) ** j
        return out

    def __repr__(self):
        counts = {}
        for s in self.simplices:
            counts[len(s) - 1] = counts.get(len(s) - 1, 0) + 1
        return f"Nerve<{dict(sorted(counts.items()))}>"


def simplex_boundary_check(nerve: Nerve) -> bool:
    """Coboundary of coboundary vanishes on every degree present."""
    top = max((len(s) - 1 for s in nerve.simplices), default=0)
    for k in range(top - 1):
        d1 = nerve.coboundary_matrix(k)
        d2 = nerve.coboundary_matrix(k + 1)
        n = len(d1)
        m = len(d1[0]) if d1 else 0
        for j in range(m):
            col = [d1[i][j] for i in range(n)]
            image = [sum(d2[r][i] * col[i] for i in range(n)) for r in range(len(d2))]
            if any(image):
                return False
    return True


class TransitionData:
    """Unitary matrices on nerve edges with inverse symmetry across flips.

    Exact backend: entries are Gaussian rationals and unitarity holds
    exactly; numeric backend: complex entries, unitarity to 1e-10.
    """

    def __init__(self, nerve: Nerve, rank: int,
                 edges: Dict[Tuple[int, int], tuple], exact: bool = True):
        self.nerve = nerve
        self.rank = rank
        self.exact = exact
        self.edges = {}
        for (i, j), mat in edges.items():
            if i > j:
                i, j = j, i
                mat = self._inverse(mat)
            if (i, j) not in {tuple(s) for s in nerve.k_simplices(1)}:
                raise ValueError(f"edge ({i},{j}) not in the nerve")
            self._check_unitary(mat)
            self.edges[(i, j)] = mat
        for s in nerve.k_simplices(1):
            if tuple(s) not in self.edges:
                raise ValueError(f"missing transition data on edge {s}")

    def _check_unitary(self, mat):
        n = self.rank
        if linalg.mat_shape(mat) != (n, n):
            raise ValueError("transition matrix has wrong size")
        prod = linalg.mat_mul(mat, linalg.mat_conj_transpose(mat))
        if self.exact:
            if not linalg.mat_eq(prod, linalg.mat_eye(n, QQi(0), QQi(1))):
                raise ValueError("transition matrix is not unitary")
        else:
            for i in range(n):
                for j in range(n):
                    want = 1.0 if i == j else 0.0
                    if abs(complex(prod[i][j]) - want) > 1e-10:
                        raise ValueError("transition matrix is not unitary")

    def _inverse(self, mat):
        return linalg.mat_conj_transpose(mat)

    def g(self, i: int, j: int):
        """Lift on the ordered edge (i, j); reversal inverts."""
        if i < j:
            return self.edges[(i, j)]
        return self._inverse(self.edges[(j, i)])

    def rephased(self, phases: Dict[Tuple[int, int], QQi]) -> "TransitionData":
        """Multiply each edge lift by a unit-modulus scalar."""
        new_edges = {}
        for (i, j), mat in self.edges.items():
            lam = phases.get((i, j))
            if lam is None:
                lam_inv = phases.get((j, i))
                lam = lam_inv.inverse() if lam_inv is not None else QQi(1)
            if not self.exact:
                lam = complex(lam)
                new_edges[(i, j)] = tuple(
                    tuple(lam * complex(x) for x in row) for row in mat
                )
            else:
                if lam.abs2() != 1:
                    raise ValueError("rephasing must have unit modulus")
                new_edges[(i, j)] = linalg.mat_scale(lam, mat)
        return TransitionData(self.nerve, self.rank, new_edges, self.exact)


class PhaseCocycle:
    """Derived cochains: mu on triangles, nu its log branch, delta = d nu."""

    def __init__(self, mu: Dict[Simplex, QQi], nu: Dict[Simplex, float],
                 delta: Dict[Simplex, int], nerve: Nerve,
                 residual: float):
        self.mu = mu
        self.nu = nu
        self.delta = delta
        self.nerve = nerve
        self.residual = residual

    def delta_vector(self) -> List[int]:
        return [self.delta[s] for s in self.nerve.k_simplices(3)]


def _scalar_of(mat, exact: bool, rank: int):
    """Extract lambda when mat = lambda * Id, else raise."""
    lam = mat[0][0]
    for i in range(rank):
        for j in range(rank):
            want = lam if i == j else (QQi(0) if exact else 0.0)
            if exact:
                if not (mat[i][j] - want).is_zero():
                    raise NotProjectiveCocycle(
                        "transition data is not a projective cocycle"
                    )
            else:
                if abs(complex(mat[i][j]) - complex(want)) > 1e-9:
                    raise NotProjectiveCocycle(
                        "transition data is not a projective cocycle"
                    )
    return lam


def phase_cocycle(data: TransitionData) -> PhaseCocycle:
    """Scalar check and derived cochains mu, nu, delta.

    mu lives on sorted triangles; its multiplicative coboundary is
    verified to be 1; nu uses the principal branch in [0,1); the integer
    certification of delta reports the worst rounding residual.
    """
    nerve = data.nerve
    mu: Dict[Simplex, QQi] = {}
    nu: Dict[Simplex, float] = {}
    for tri in nerve.k_simplices(2):
        i, j, k = tri
        prod = linalg.mat_mul(data.g(i, j), linalg.mat_mul(data.g(j, k), data.g(k, i)))
        lam = _scalar_of(prod, data.exact, data.rank)
        if data.exact and lam.abs2() != 1:
            raise NotProjectiveCocycle("triple-product scalar is not unit modulus")
        mu[tri] = lam
        angle = cmath.phase(complex(lam)) / (2 * cmath.pi)
        if angle < 0:
            angle += 1.0
        if angle >= 1.0:
            angle -= 1.0
        nu[tri] = angle
    # multiplicative cocycle identity for mu on every tetrahedron
    worst = 0.0
    delta: Dict[Simplex, int] = {}
    for tet in nerve.k_simplices(3):
        prod_exact = QQi(1)
        prod_num = 1 + 0j
        val = 0.0
        for j in range(4):
            face = tet[:j] + tet[j + 1:]
            if data.exact:
                f = mu[face]
                prod_exact = prod_exact * (f if j % 2 == 0 else f.inverse())
            else:
                f = complex(mu[face])
                prod_num = prod_num * (f if j % 2 == 0 else 1 / f)
            val += nu[face] if j % 2 == 0 else -nu[face]
        if data.exact:
            if prod_exact != QQi(1):
                raise NotProjectiveCocycle("mu fails the cocycle identity")
        else:
            if abs(prod_num - 1) > 1e-9:
                raise NotProjectiveCocycle("mu fails the cocycle identity")
        rounded = round(val)
        worst = max(worst, abs(val - rounded))
        delta[tet] = int(rounded)
    if worst > 1e-6:
        raise NotProjectiveCocycle(
            f"integer certification residual too large: {worst}"
        )
    # closedness of delta
    d3 = data.nerve.coboundary_matrix(3)
    cols = data.nerve.k_simplices(3)
    vec = [delta[s] for s in cols]
    for row in d3:
        if sum(a * b for a, b in zip(row, vec)):
            raise NotProjectiveCocycle("delta is not closed")
    return PhaseCocycle(mu, nu, delta, nerve, worst)


class ClassDescriptor:
    """H^3 class in invariant-factor coordinates.

    ``invariants`` lists the torsion orders (> 1) followed by one 0 per
    free factor; ``coordinates`` are the matching reduced coordinates.
    """

    def __init__(self, invariants: List[int], coordinates: List[int]):
        self.invariants = invariants
        self.coordinates = coordinates

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coordinates)

    def __eq__(self, other):
        return (
            isinstance(other, ClassDescriptor)
            and self.invariants == other.invariants
            and self.coordinates == other.coordinates
        )

    def __repr__(self):
        return f"ClassDescriptor<inv={self.invariants}, coords={self.coordinates}>"


def h3_class(delta_vec: Sequence[int], nerve: Nerve) -> ClassDescriptor:
    """Class of an integer 3-cocycle in H^3(nerve; Z) via Smith normal form."""
    d3 = nerve.coboundary_matrix(3)
    n3 = len(nerve.k_simplices(3))
    delta_vec = list(map(int, delta_vec))
    if len(delta_vec) != n3:
        raise ValueError("cochain length does not match the 3-skeleton")
    for row in d3:
        if sum(a * b for a, b in zip(row, delta_vec)):
            raise ValueError("input 3-cochain is not a cocycle")
    kernel = intlinalg.integer_kernel_basis(d3) if d3 else [
        [1 if i == j else 0 for i in range(n3)] for j in range(n3)
    ]
    r = len(kernel)
    k_mat = [[kernel[b][i] for b in range(r)] for i in range(n3)]
    y = intlinalg.solve_integer(k_mat, delta_vec)
    if y is None:
        raise ValueError("cocycle failed to express in the kernel lattice")
    d2 = nerve.coboundary_matrix(2)
    n2 = len(nerve.k_simplices(2))
    gens = []
    for j in range(n2):
        col = [d2[i][j] for i in range(n3)]
        yj = intlinalg.solve_integer(k_mat, col)
        if yj is None:
            raise ValueError("coboundary image escaped the cocycle lattice")
        gens.append(yj)
    m_mat = [[gens[j][i] for j in range(n2)] for i in range(r)]
    u, s, _ = intlinalg.smith_normal_form(m_mat) if n2 else (
        intlinalg._identity(r), [[0] * 0 for _ in range(r)], [],
    )
    diag = intlinalg.snf_diagonal(s) if n2 else []
    z = [sum(u[i][k] * y[k] for k in range(r)) for i in range(r)]
    invariants = []
    coordinates = []
    for i in range(r):
        d = diag[i] if i < len(diag) else 0
        if d == 1:
            continue
        invariants.append(d)
        coordinates.append(z[i] % d if d else z[i])
    return ClassDescriptor(invariants, coordinates)


def torsion_witness(cocycle: PhaseCocycle, n: int) -> Optional[List[int]]:
    """Integer 2-cochain w with coboundary(w) = n * delta, when one exists."""
    nerve = cocycle.nerve
    d2 = nerve.coboundary_matrix(2)
    target = [n * v for v in cocycle.delta_vector()]
    if not d2:
        return [0] * len(nerve.k_simplices(2)) if not any(target) else None
    return intlinalg.solve_integer(d2, target)


def _det_exact(mat) -> QQi:
    n = len(mat)
    if n == 1:
        return mat[0][0]
    out = QQi(0)
    for j in range(n):
        minor = tuple(row[:j] + row[j + 1:] for row in mat[1:])
        term = mat[0][j] * _det_exact(minor)
        out = out + (term if j % 2 == 0 else -term)
    return out


_SNAP_DENOMS = tuple(range(1, 66))


def _snap_unit(z: complex) -> Optional[QQi]:
    """Try to express a unit-modulus complex as an exact Gaussian rational."""
    for d in _SNAP_DENOMS:
        a = round(z.real * d)
        b = round(z.imag * d)
        if abs(z.real - a / d) < 1e-9 and abs(z.imag - b / d) < 1e-9:
            cand = QQi(Fraction(a, d), Fraction(b, d))
            if cand.abs2() == 1:
                return cand
    return None


def normalize_determinant(data: TransitionData) -> TransitionData:
    """Rescale each edge lift to unit determinant.

    After this lift the triangle scalars take values in rank-th roots of
    unity, which makes the torsion of the class manifest.  Roots that
    snap to exact Gaussian rationals keep the exact backend; otherwise
    the result degrades to the numeric backend.
    """
    import numpy as _np

    n = data.rank
    new_edges = {}
    all_exact = data.exact
    for (i, j), mat in data.edges.items():
        if data.exact:
            det = _det_exact(mat)
            root_num = complex(det) ** (1.0 / n)
            root = _snap_unit(root_num)
            if root is not None and root ** n == det:
                new_edges[(i, j)] = linalg.mat_scale(root.inverse(), mat)
                continue
            all_exact = False
            new_edges[(i, j)] = tuple(
                tuple(_np.complex128(complex(x) / root_num) for x in row)
                for row in mat
            )
        else:
            work = [list(map(complex, row)) for row in mat]
            det = complex(_np.linalg.det(_np.array(work)))
            root_num = det ** (1.0 / n)
            new_edges[(i, j)] = tuple(
                tuple(_np.complex128(complex(x) / root_num) for x in row)
                for row in mat
            )
    if all_exact:
        return TransitionData(data.nerve, n, new_edges, True)
    converted = {
        e: tuple(tuple(_np.complex128(complex(x)) for x in row) for row in m)
        for e, m in new_edges.items()
    }
    return TransitionData(data.nerve, n, converted, False)


# -- scenario files -----------------------------------------------------


def pauli_triangle() -> TransitionData:
    """One triangle with the three Pauli matrices as edge lifts."""
    sx = linalg.mat_from_rows([[QQi(0), QQi(1)], [QQi(1), QQi(0)]])
    sy = linalg.mat_from_rows([[QQi(0), QQi(0, -1)], [QQi(0, 1), QQi(0)]])
    sz = linalg.mat_from_rows([[QQi(1), QQi(0)], [QQi(0), QQi(-1)]])
    nerve = Nerve([(0, 1, 2)])
    # g(2,0) = sz means g(0,2) = sz^{-1} = sz
    return TransitionData(nerve, 2, {(0, 1): sx, (1, 2): sy, (0, 2): sz})


def boundary_of_4_simplex() -> Nerve:
    """The 3-sphere triangulation: all proper faces of the 4-simplex."""
    import itertools

    faces = list(itertools.combinations(range(5), 4))
    return Nerve(faces)


def transition_data_from_json(text: str) -> TransitionData:
    doc = json.loads(text)
    nerve = Nerve([tuple(s) for s in doc["simplices"]])
    rank = int(doc["rank"])
    edges = {}
    for key, rows in doc["edges"].items():
        i, j = (int(x) for x in key.split("-"))
        mat = linalg.mat_from_rows(
            [[QQi.parse(x) for x in row] for row in rows]
        )
        edges[(i, j)] = mat
    return TransitionData(nerve, rank, edges, True)


def transition_data_to_json(data: TransitionData) -> str:
    doc = {
        "simplices": sorted(map(list, data.nerve.simplices)),
        "rank": data.rank,
        "edges": {
            f"{i}-{j}": [[str(x) for x in row] for row in mat]
            for (i, j), mat in sorted(data.edges.items())
        },
    }
    return json.dumps(doc, indent=1, sort_keys=True)
