"""The two twisted character chain maps and their machine checks.

``psi`` expands the partition forms: all decompositions of an ordered
tuple (a_1, ..., a_k) into singleton blocks nabla(a_i) and adjacent-pair
blocks a_j sigma a_{j+1}; the number of summands is the Fibonacci number
F(k+1).  ``rho`` pairs a chain with these forms, giving a homogeneous
degree-k scalar form.

``simplex_character`` is the heat-kernel-style map: exponentials of the
curvature lift integrated over the standard simplex.  Because sigma has
form degree 2, the exponential series terminates by degree counting and
the simplex moments integrate exactly via
integral of prod s_i^{m_i} = prod m_i! / (k + sum m_i)!.

Both maps induce the same classes; ``compare_class_integrals`` checks
the matching-degree integrals over a closed geometry after the factorial
renormalization between the cyclic and mixed-complex conventions.
"""

from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Callable, List, Optional, Sequence, Tuple

from .cyclic import Chain, Projection, chern_cyclic
from .forms import Connection, MatrixForm, exterior_d
from .scalars import QQi


class NonTorsionTwist(ValueError):
    pass


def require_torsion_twist(declaration: str) -> None:
    """Gate for checks that assume a flat or torsion twist class."""
    if declaration not in ("flat", "torsion"):
        raise NonTorsionTwist(
            f"declared twist {declaration!r} is not flat or torsion; "
            "the character comparison is only defined for torsion twists"
        )


def block_compositions(k: int) -> List[Tuple[int, ...]]:
    """Ordered compositions of k into parts 1 and 2 (F(k+1) of them)."""
    if k == 0:
        return [()]
    if k == 1:
        return [(1,)]
    out = [(1,) + c for c in block_compositions(k - 1)]
    out += [(2,) + c for c in block_compositions(k - 2)]
    return out


class PartitionExpansion:
    """Partition terms of psi_k plus their assembled sum."""

    def __init__(self, k: int, terms: List[MatrixForm], total: MatrixForm):
        self.k = k
        self.terms = terms
        self.total = total

    @property
    def term_count(self) -> int:
        return len(self.terms)


def psi(conn: Connection, a_list: Sequence[MatrixForm]) -> PartitionExpansion:
    """Partition-enumeration construction of psi_k(a_1, ..., a_k)."""
    k = len(a_list)
    probe_chart, m = conn.chart, conn.m
    backend = conn.theta.backend
    nodes = conn.theta.nodes
    one = MatrixForm.identity(probe_chart, m, backend, nodes)
    terms = []
    total = MatrixForm.zero(probe_chart, m, backend, nodes)
    for comp in block_compositions(k):
        term = one
        pos = 0
        for c in comp:
            if c == 1:
                term = term * conn.nabla(a_list[pos])
                pos += 1
            else:
                term = term * (a_list[pos] * conn.sigma * a_list[pos + 1])
                pos += 2
        terms.append(term)
        total = total + term
    return PartitionExpansion(k, terms, total)


def psi_recursive(conn: Connection, a_list: Sequence[MatrixForm]) -> MatrixForm:
    """Recursion psi_k = (nabla a_1) psi_{k-1} + a_1 sigma a_2 psi_{k-2}."""
    k = len(a_list)
    one = MatrixForm.identity(
        conn.chart, conn.m, conn.theta.backend, conn.theta.nodes
    )
    if k == 0:
        return one
    if k == 1:
        return conn.nabla(a_list[0])
    head1 = conn.nabla(a_list[0]) * psi_recursive(conn, a_list[1:])
    head2 = (a_list[0] * conn.sigma * a_list[1]) * psi_recursive(conn, a_list[2:])
    return head1 + head2


def rho(conn: Connection, ch: Chain) -> MatrixForm:
    """Chain character rho_k(a_0, ..., a_k) = tr(a_0 psi_k(a_1, ..., a_k)).

    Linear over the chain; lands in scalar forms of pure degree k (every
    partition block contributes its size in form degree).  Degrees above
    the chart dimension vanish identically.
    """
    out = MatrixForm.zero(conn.chart, 1, conn.theta.backend, conn.theta.nodes)
    for coef, t in ch.terms:
        val = (t[0] * psi(conn, t[1:]).total).trace()
        out = out + val.scale(coef if out.backend == "exact" else complex(coef))
    return out


def induction_defect(conn: Connection,
                     a_list: Sequence[MatrixForm]) -> MatrixForm:
    """Residual of the inductive identity behind the chain-map property.

    (-1)^(k-1) a_0 psi_k(a_1..a_k) + psi_k(a_0..a_{k-1}) a_k
        - nabla(a_0 psi_{k-1}(a_1..a_{k-1}) a_k)
    must vanish identically; the convention psi_{-1} = 0 settles k = 0.
    """
    k = len(a_list) - 1
    if k < 0:
        raise ValueError("need at least a_0")
    a0, ak = a_list[0], a_list[-1]
    sign = -1 if (k - 1) % 2 else 1
    lhs = (a0 * psi(conn, a_list[1:]).total).scale(sign)
    lhs = lhs + psi(conn, a_list[:-1]).total * ak
    if k == 0:
        rhs = MatrixForm.zero(conn.chart, conn.m, conn.theta.backend, conn.theta.nodes)
    else:
        rhs = conn.nabla(a0 * psi(conn, a_list[1:-1]).total * ak)
    return lhs - rhs


def verify_induction_identity(conn: Connection,
                              a_list: Sequence[MatrixForm]) -> Tuple[bool, MatrixForm]:
    defect = induction_defect(conn, a_list)
    if defect.backend == "exact":
        return defect.is_zero(), defect
    return defect.max_abs() <= 1e-10, defect


def cyclic_defect(conn: Connection,
                  a_list: Sequence[MatrixForm]) -> MatrixForm:
    """Residual of the cyclic-quotient defect identity for rho.

    (-1)^(k-1) rho_k(a_0..a_k) + rho_k(a_k, a_0..a_{k-1})
        - d tr(a_0 psi_{k-1}(a_1..a_{k-1}) a_k)
    """
    k = len(a_list) - 1
    ch = Chain(k, [(QQi(1), tuple(a_list))])
    rot = Chain(k, [(QQi(1), (a_list[-1],) + tuple(a_list[:-1]))])
    sign = -1 if (k - 1) % 2 else 1
    lhs = rho(conn, ch).scale(sign) + rho(conn, rot)
    if k == 0:
        return lhs
    inner = (a_list[0] * psi(conn, a_list[1:-1]).total * a_list[-1]).trace()
    return lhs - exterior_d(inner)


# -- simplex-integrated exponential character ---------------------------


def simplex_moment(powers: Sequence[int]) -> Fraction:
    """Exact moment of the standard simplex: prod m_i! / (k + sum m_i)!."""
    k = len(powers) - 1
    total = sum(powers)
    num = 1
    for m in powers:
        num *= factorial(m)
    return Fraction(num, factorial(k + total))


def _moment_tuples(slots: int, budget: int):
    if slots == 0:
        yield ()
        return
    for first in range(budget + 1):
        for rest in _moment_tuples(slots - 1, budget - first):
            yield (first,) + rest


def simplex_character(conn: Connection, ch: Chain) -> MatrixForm:
    """Simplex-integrated exponential character of a chain.

    Expands tr(a_0 e^{-s_0 sigma} nabla a_1 e^{-s_1 sigma} ... ) with the
    exponentials truncated by form degree and the simplex integrals done
    exactly through ``simplex_moment``.  The result has mixed degree
    k, k+2, ... up to the chart dimension.
    """
    chart = conn.chart
    out = MatrixForm.zero(chart, 1, conn.theta.backend, conn.theta.nodes)
    sigma = conn.sigma
    for coef, t in ch.terms:
        k = len(t) - 1
        if k > chart.dim:
            continue
        nablas = [conn.nabla(a) for a in t[1:]]
        budget = (chart.dim - k) // 2
        sigma_pows = [MatrixForm.identity(chart, conn.m, conn.theta.backend, conn.theta.nodes)]
        for _ in range(budget):
            sigma_pows.append(sigma_pows[-1] * sigma)
        for powers in _moment_tuples(k + 1, budget):
            weight = simplex_moment(powers) * ((-1) ** sum(powers))
            term = t[0] * sigma_pows[powers[0]]
            for i in range(k):
                term = term * nablas[i] * sigma_pows[powers[i + 1]]
            if term.is_zero():
                continue
            val = term.trace().scale(
                QQi(weight) * coef if out.backend == "exact"
                else float(weight) * complex(coef)
            )
            out = out + val
    return out


def chern_total_chain(p: Projection, max_m: int) -> List[Chain]:
    return [chern_cyclic(p, m) for m in range(max_m + 1)]


def compare_class_integrals(conn: Connection, p: Projection,
                            integrate: Callable[[MatrixForm, int], complex],
                            twist: str = "torsion",
                            max_degree: Optional[int] = None) -> dict:
    """Matching-degree integrals of the two character maps on ch(p).

    The simplex character uses the mixed-complex normalization, the chain
    character the cyclic one; degree-k integrals are compared after the
    factorial rescaling 1/k!.  Agreement is up to exact forms, hence
    integrals over a closed geometry are what is compared.
    """
    require_torsion_twist(twist)
    chart = conn.chart
    if max_degree is None:
        max_degree = chart.dim
    if p.base_m != conn.m:
        raise ValueError("projection base algebra does not match connection")
    chains = chern_total_chain(p, max_degree // 2)
    report = {"degrees": {}, "twist": twist}
    jlo_total = MatrixForm.zero(chart, 1, conn.theta.backend, conn.theta.nodes)
    rho_total = MatrixForm.zero(chart, 1, conn.theta.backend, conn.theta.nodes)
    for chn in chains:
        jlo_total = jlo_total + simplex_character(conn, chn)
        rho_total = rho_total + rho(conn, chn)
    agree = True
    for k in range(0, max_degree + 1, 2):
        lhs = integrate(jlo_total, k)
        rhs = integrate(rho_total, k)
        rhs_scaled = rhs / factorial(k)
        delta = abs(lhs - rhs_scaled)
        scale = max(abs(lhs), abs(rhs_scaled), 1.0)
        ok = delta <= 1e-8 * scale
        agree = agree and ok
        report["degrees"][k] = {
            "simplex": lhs,
            "chain_over_kfact": rhs_scaled,
            "difference": delta,
            "ok": ok,
        }
    report["agree"] = agree
    return report
