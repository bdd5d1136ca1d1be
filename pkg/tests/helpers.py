"""Shared oracles and builders for the test suite.

Everything here is deliberately naive: cofactor determinants, textbook row
reduction, explicit derivatives.  The point is an independent code path from
the library, so agreement means something.
"""

from __future__ import annotations

import itertools
import random
from math import comb
from typing import Iterator, List, Sequence, Tuple

from npl import (
    AffineForm,
    Circuit,
    CircuitBuilder,
    MonomialIndex,
    PolySpace,
    PrimeField,
    SparsePoly,
)

SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 101)


def cofactor_det(entries: Sequence[Sequence[SparsePoly]]) -> SparsePoly:
    """Laplace expansion along the first row.  Exponential; n <= 4 only."""
    n = len(entries)
    first = entries[0][0]
    if n == 1:
        return first
    acc = SparsePoly.zero(first.field, first.v)
    for j in range(n):
        minor = [list(row[:j]) + list(row[j + 1 :]) for row in entries[1:]]
        term = entries[0][j] * cofactor_det(minor)
        acc = acc + term if j % 2 == 0 else acc - term
    return acc


def int_cofactor_det(rows: Sequence[Sequence[int]], p: int) -> int:
    n = len(rows)
    if n == 1:
        return rows[0][0] % p
    total = 0
    for j in range(n):
        minor = [list(r[:j]) + list(r[j + 1 :]) for r in rows[1:]]
        term = rows[0][j] * int_cofactor_det(minor, p)
        total += term if j % 2 == 0 else -term
    return total % p


def row_rank(rows: Sequence[Sequence[int]], p: int) -> int:
    """Textbook Gaussian elimination over F_p, written from scratch."""
    m = [[x % p for x in r] for r in rows]
    if not m:
        return 0
    rank = 0
    cols = len(m[0])
    for c in range(cols):
        piv = next((r for r in range(rank, len(m)) if m[r][c]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][c], p - 2, p)
        m[rank] = [(x * inv) % p for x in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][c]:
                f = m[r][c]
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


def poly_derivative(f: SparsePoly, i: int) -> SparsePoly:
    terms = {}
    for e, c in f.terms.items():
        if e[i] == 0:
            continue
        ne = e[:i] + (e[i] - 1,) + e[i + 1 :]
        terms[ne] = terms.get(ne, 0) + c * e[i]
    return SparsePoly(f.field, f.v, terms)


def poly_derivative_order(f: SparsePoly, alpha: Sequence[int]) -> SparsePoly:
    g = f
    for i, a in enumerate(alpha):
        for _ in range(a):
            g = poly_derivative(g, i)
    return g


def exponents_of_degree(v: int, d: int) -> List[Tuple[int, ...]]:
    out = []
    for combo in itertools.combinations_with_replacement(range(v), d):
        e = [0] * v
        for i in combo:
            e[i] += 1
        out.append(tuple(e))
    out.sort(reverse=True)
    return out


def random_dense_poly(
    rng: random.Random, field: PrimeField, v: int, d: int
) -> SparsePoly:
    """Uniform coefficients on every degree-d monomial, resampled if zero."""
    exps = exponents_of_degree(v, d)
    while True:
        terms = {e: rng.randrange(field.p) for e in exps}
        f = SparsePoly(field, v, terms)
        if not f.is_zero:
            return f


def random_linear_form(rng: random.Random, field: PrimeField, v: int) -> SparsePoly:
    while True:
        terms = {}
        for i in range(v):
            c = rng.randrange(field.p)
            if c:
                e = tuple(1 if j == i else 0 for j in range(v))
                terms[e] = c
        if terms:
            return SparsePoly(field, v, terms)


def random_product_of_linear_forms(
    rng: random.Random, field: PrimeField, v: int, d: int
) -> SparsePoly:
    f = SparsePoly.constant(field, v, 1)
    for _ in range(d):
        f = f * random_linear_form(rng, field, v)
    return f


def random_circuit(
    rng: random.Random,
    field: PrimeField,
    v: int,
    max_extra_gates: int,
    degree_cap: int,
) -> Circuit:
    """Random DAG respecting a formal-degree cap on every gate."""
    b = CircuitBuilder(field, v)
    degrees: List[int] = []
    for i in range(v):
        b.inp(i)
        degrees.append(1)
    for _ in range(rng.randrange(max_extra_gates + 1)):
        op = rng.choice(("const", "add", "mul", "mul"))
        if op == "const":
            b.const(rng.randrange(field.p))
            degrees.append(0)
            continue
        a = rng.randrange(len(degrees))
        c = rng.randrange(len(degrees))
        if op == "mul":
            if degrees[a] + degrees[c] > degree_cap:
                b.add(a, c)
                degrees.append(max(degrees[a], degrees[c]))
            else:
                b.mul(a, c)
                degrees.append(degrees[a] + degrees[c])
        else:
            b.add(a, c)
            degrees.append(max(degrees[a], degrees[c]))
    return b.build(rng.randrange(len(degrees)))


def truth_assignments(n: int) -> Iterator[Tuple[int, ...]]:
    return itertools.product((0, 1), repeat=n)


def clause_satisfied(clause: Sequence[int], assignment: Sequence[int]) -> bool:
    for lit in clause:
        val = assignment[abs(lit) - 1]
        if (lit > 0 and val == 1) or (lit < 0 and val == 0):
            return True
    return False


def cnf_satisfied(clauses: Sequence[Sequence[int]], assignment: Sequence[int]) -> bool:
    return all(clause_satisfied(c, assignment) for c in clauses)


def space_index(space: PolySpace) -> MonomialIndex:
    return MonomialIndex(space)


def binom(n: int, k: int) -> int:
    return comb(n, k)


def affine_from_coeffs(
    field: PrimeField, coeffs: Sequence[int], const: int = 0
) -> AffineForm:
    return AffineForm(field, tuple(field.canon(c) for c in coeffs), field.canon(const))
