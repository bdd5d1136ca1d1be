"""Meta-polynomials: polynomial functions of coefficient vectors.

The rank methods live here.  For a homogeneous f of degree d in v variables,
the order-k partial-derivative matrix has one row per derivative operator
of order k and one column per monomial of degree d-k; the entry at
(alpha, m) is the coefficient of m in the alpha-derivative of f, that is
coeff(f, alpha+m) times the falling-factorial factor prod_i
(m_i+1)(m_i+2)...(m_i+alpha_i).  True derivatives carry those multinomial
factors, which is why the field characteristic must exceed d.

Every entry is therefore a scalar multiple of a single coefficient of f.
That makes each entry a linear form in the N meta-variables, and every
(r+1) x (r+1) minor a meta-polynomial of degree at most r+1.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import List, Mapping, Optional, Sequence, Tuple

from .algebra import (
    Exponents,
    MonomialIndex,
    PolySpace,
    PrimeField,
    SparsePoly,
)
from .circuits import Circuit, CircuitBuilder
from .errors import (
    ArityMismatch,
    CharacteristicTooSmall,
    DimensionCapExceeded,
    MinorOutOfRange,
    OrderOutOfRange,
    SpaceMismatch,
)

DEFAULT_DIMENSION_CAP = 4096

# symbolic entries are materialized only for spaces this small
SYMBOLIC_SPACE_CAP = 512


def _derivative_factor(alpha: Exponents, tail: Exponents, p: int) -> int:
    # coefficient picked up by d^alpha acting on x^(alpha+tail)
    f = 1
    for a, c in zip(alpha, tail):
        for t in range(c + 1, c + a + 1):
            f = f * t % p
    return f


@dataclass
class CoeffMatrix:
    """A matrix whose entries are linear in the coefficients of f.

    ``entries`` is the numeric instantiation at a concrete f.  ``symbolic``
    (present for small spaces) gives each entry as a map
    {meta_variable_rank: scalar}; instantiating it at a coefficient vector
    must reproduce ``entries``.
    """

    field: PrimeField
    row_labels: Tuple
    col_labels: Tuple[Exponents, ...]
    entries: Tuple[Tuple[int, ...], ...]
    symbolic: Optional[Tuple[Tuple[Mapping[int, int], ...], ...]] = None

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.row_labels), len(self.col_labels))

    def symbolic_value_at(self, cv: Sequence[int]) -> Tuple[Tuple[int, ...], ...]:
        if self.symbolic is None:
            raise ValueError("matrix carries no symbolic form")
        p = self.field.p
        return tuple(
            tuple(
                sum(c * cv[i] for i, c in cell.items()) % p for cell in row
            )
            for row in self.symbolic
        )


def _space_for(f: SparsePoly, space: Optional[PolySpace]) -> PolySpace:
    if space is not None:
        if not f.fits_space(space):
            raise SpaceMismatch(f"polynomial does not fit {space}")
        if not space.homogeneous:
            raise SpaceMismatch("derivative matrices need a homogeneous space")
        return space
    if f.is_zero:
        raise SpaceMismatch("zero polynomial: pass the space explicitly")
    if not f.is_homogeneous():
        raise SpaceMismatch("polynomial is not homogeneous")
    return PolySpace(f.v, f.degree, True)


def _check_partials_preconditions(space: PolySpace, k: int, shift: int, p: int) -> None:
    if not 0 <= k <= space.d:
        raise OrderOutOfRange(f"derivative order {k} outside [0, {space.d}]")
    if shift < 0:
        raise OrderOutOfRange("negative shift")
    if p <= space.d:
        raise CharacteristicTooSmall(
            f"characteristic {p} must exceed degree {space.d}"
        )


def _shifted_labels(
    space: PolySpace, k: int, shift: int, dimension_cap: int
) -> Tuple[Tuple, Tuple[Exponents, ...]]:
    v, d = space.v, space.d
    rows_n = MonomialIndex(PolySpace(v, k, True)).dimension
    cols_space = PolySpace(v, d - k + shift, True)
    cols_n = cols_space.dimension
    if shift:
        rows_n *= MonomialIndex(PolySpace(v, shift, True)).dimension
    if rows_n > dimension_cap or cols_n > dimension_cap:
        raise DimensionCapExceeded(
            f"matrix of shape ({rows_n}, {cols_n}) exceeds cap {dimension_cap}"
        )
    derivs = tuple(MonomialIndex(PolySpace(v, k, True)).monomials())
    cols = tuple(MonomialIndex(cols_space).monomials())
    if shift:
        shifts = tuple(MonomialIndex(PolySpace(v, shift, True)).monomials())
        rows = tuple((b, a) for b in shifts for a in derivs)
    else:
        rows = derivs
    return rows, cols


def _build_matrix(
    f: SparsePoly,
    space: PolySpace,
    k: int,
    shift: int,
    dimension_cap: int,
) -> CoeffMatrix:
    p = f.field.p
    _check_partials_preconditions(space, k, shift, p)
    rows, cols = _shifted_labels(space, k, shift, dimension_cap)
    index = MonomialIndex(space)
    want_symbolic = space.dimension <= SYMBOLIC_SPACE_CAP

    num_rows: List[Tuple[int, ...]] = []
    sym_rows: List[Tuple[Mapping[int, int], ...]] = []
    for label in rows:
        if shift:
            beta, alpha = label
        else:
            beta, alpha = (0,) * space.v, label
        num_row: List[int] = []
        sym_row: List[Mapping[int, int]] = []
        for m in cols:
            tail = tuple(mi - bi for mi, bi in zip(m, beta))
            if any(t < 0 for t in tail):
                num_row.append(0)
                if want_symbolic:
                    sym_row.append({})
                continue
            source = tuple(a + t for a, t in zip(alpha, tail))
            factor = _derivative_factor(alpha, tail, p)
            num_row.append(factor * f.coefficient(source) % p)
            if want_symbolic:
                sym_row.append({index.rank(source): factor} if factor else {})
        num_rows.append(tuple(num_row))
        if want_symbolic:
            sym_rows.append(tuple(sym_row))
    return CoeffMatrix(
        field=f.field,
        row_labels=rows,
        col_labels=cols,
        entries=tuple(num_rows),
        symbolic=tuple(sym_rows) if want_symbolic else None,
    )


def partials_matrix(
    f: SparsePoly,
    k: int,
    space: Optional[PolySpace] = None,
    dimension_cap: int = DEFAULT_DIMENSION_CAP,
) -> CoeffMatrix:
    """Order-k partial-derivative matrix of a homogeneous polynomial."""
    sp = _space_for(f, space)
    return _build_matrix(f, sp, k, 0, dimension_cap)


def shifted_partials_matrix(
    f: SparsePoly,
    k: int,
    shift: int,
    space: Optional[PolySpace] = None,
    dimension_cap: int = DEFAULT_DIMENSION_CAP,
) -> CoeffMatrix:
    """Rows are (shift monomial, order-k derivative) pairs; with shift 0 this
    coincides with the plain partials matrix."""
    sp = _space_for(f, space)
    return _build_matrix(f, sp, k, shift, dimension_cap)


def matrix_rank(rows: Sequence[Sequence[int]], p: int) -> int:
    """Exact rank over F_p by Gaussian elimination."""
    m = [list(r) for r in rows]
    if not m:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    rank = 0
    for col in range(n_cols):
        pivot = None
        for r in range(rank, n_rows):
            if m[r][col] % p:
                pivot = r
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        inv = pow(m[rank][col], p - 2, p)
        m[rank] = [x * inv % p for x in m[rank]]
        for r in range(n_rows):
            if r != rank and m[r][col] % p:
                c = m[r][col] % p
                m[r] = [(x - c * y) % p for x, y in zip(m[r], m[rank])]
        rank += 1
        if rank == n_rows:
            break
    return rank


def matrix_det(rows: Sequence[Sequence[int]], p: int) -> int:
    m = [list(r) for r in rows]
    n = len(m)
    if any(len(r) != n for r in m):
        raise ValueError("determinant of a non-square matrix")
    det = 1
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if m[r][col] % p:
                pivot = r
                break
        if pivot is None:
            return 0
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det = det * m[col][col] % p
        inv = pow(m[col][col], p - 2, p)
        for r in range(col + 1, n):
            if m[r][col] % p:
                c = m[r][col] * inv % p
                m[r] = [(x - c * y) % p for x, y in zip(m[r], m[col])]
    return det % p


def rank_mod_p(matrix: CoeffMatrix) -> int:
    return matrix_rank(matrix.entries, matrix.field.p)


@dataclass(frozen=True)
class MinorSelection:
    kind: str  # "leading" | "explicit" | "random"
    size: int
    rows: Optional[Tuple[int, ...]] = None
    cols: Optional[Tuple[int, ...]] = None
    seed: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in ("leading", "explicit", "random"):
            raise ValueError(f"unknown minor kind {self.kind!r}")
        if self.size < 1:
            raise MinorOutOfRange("minor size must be positive")
        if self.kind == "explicit" and (self.rows is None or self.cols is None):
            raise ValueError("explicit minor needs row and column lists")
        if self.kind == "random" and self.seed is None:
            raise ValueError("random minor needs a seed")

    def to_json(self) -> dict:
        out: dict = {"kind": self.kind, "size": self.size}
        if self.rows is not None:
            out["rows"] = list(self.rows)
        if self.cols is not None:
            out["cols"] = list(self.cols)
        if self.seed is not None:
            out["seed"] = self.seed
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "MinorSelection":
        rows = data.get("rows")
        cols = data.get("cols")
        return cls(
            kind=data["kind"],
            size=int(data["size"]),
            rows=tuple(rows) if rows is not None else None,
            cols=tuple(cols) if cols is not None else None,
            seed=data.get("seed"),
        )


@dataclass(frozen=True)
class RankMethodSpec:
    method: str  # "partials" | "shifted"
    k: int
    shift: int
    minor: MinorSelection

    def __post_init__(self) -> None:
        if self.method not in ("partials", "shifted"):
            raise ValueError(f"unknown rank method {self.method!r}")
        if self.method == "partials" and self.shift != 0:
            raise ValueError("plain partials carries no shift")

    def to_json(self) -> dict:
        return {
            "method": self.method,
            "k": self.k,
            "shift": self.shift,
            "minor": self.minor.to_json(),
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "RankMethodSpec":
        return cls(
            method=data["method"],
            k=int(data["k"]),
            shift=int(data.get("shift", 0)),
            minor=MinorSelection.from_json(data["minor"]),
        )


def _select_indices(
    sel: MinorSelection, n_rows: int, n_cols: int
) -> Tuple[Tuple[int, ...], Tuple[int, ...]]:
    size = sel.size
    if size > n_rows or size > n_cols:
        raise MinorOutOfRange(
            f"minor of size {size} in a ({n_rows}, {n_cols}) matrix"
        )
    if sel.kind == "leading":
        return tuple(range(size)), tuple(range(size))
    if sel.kind == "explicit":
        rows, cols = tuple(sel.rows), tuple(sel.cols)  # type: ignore[arg-type]
        if len(rows) != size or len(cols) != size:
            raise MinorOutOfRange("explicit index lists must match the minor size")
        if len(set(rows)) != size or len(set(cols)) != size:
            raise MinorOutOfRange("explicit indices must be distinct")
        if any(not 0 <= r < n_rows for r in rows) or any(
            not 0 <= c < n_cols for c in cols
        ):
            raise MinorOutOfRange("explicit index outside the matrix")
        return rows, cols
    rng = random.Random(sel.seed)
    rows = tuple(sorted(rng.sample(range(n_rows), size)))
    cols = tuple(sorted(rng.sample(range(n_cols), size)))
    return rows, cols


class MinorMeta:
    """Meta-polynomial evaluating one minor of a derivative matrix.

    The symbolic structure of the selected submatrix is precomputed, so a
    single evaluation touches only size^2 coefficients of the input vector
    and one small exact determinant.
    """

    def __init__(self, spec: RankMethodSpec, space: PolySpace, field: PrimeField):
        if not space.homogeneous:
            raise SpaceMismatch("rank methods operate on homogeneous spaces")
        shift = spec.shift if spec.method == "shifted" else 0
        _check_partials_preconditions(space, spec.k, shift, field.p)
        rows, cols = _shifted_labels(space, spec.k, shift, DEFAULT_DIMENSION_CAP)
        sel_rows, sel_cols = _select_indices(spec.minor, len(rows), len(cols))
        index = MonomialIndex(space)
        p = field.p
        cells: List[Tuple[Optional[Tuple[int, int]], ...]] = []
        for r in sel_rows:
            label = rows[r]
            if shift:
                beta, alpha = label
            else:
                beta, alpha = (0,) * space.v, label
            row_cells: List[Optional[Tuple[int, int]]] = []
            for c in sel_cols:
                m = cols[c]
                tail = tuple(mi - bi for mi, bi in zip(m, beta))
                if any(t < 0 for t in tail):
                    row_cells.append(None)
                    continue
                factor = _derivative_factor(alpha, tail, p)
                if factor == 0:
                    row_cells.append(None)
                    continue
                source = tuple(a + t for a, t in zip(alpha, tail))
                row_cells.append((index.rank(source), factor))
            cells.append(tuple(row_cells))
        self.spec = spec
        self.space = space
        self.field = field
        self.row_indices = sel_rows
        self.col_indices = sel_cols
        self._cells = tuple(cells)
        self.meta_id = (
            f"{spec.method}-minor:k={spec.k},shift={shift},size={spec.minor.size},"
            f"rows={list(sel_rows)},cols={list(sel_cols)}"
        )

    @property
    def degree_bound(self) -> int:
        return self.spec.minor.size

    def eval_at(self, cv: Sequence[int]) -> int:
        N = self.space.dimension
        if len(cv) != N:
            raise ArityMismatch(f"expected {N} coefficients, got {len(cv)}")
        p = self.field.p
        rows = [
            [0 if cell is None else cell[1] * cv[cell[0]] % p for cell in row]
            for row in self._cells
        ]
        return matrix_det(rows, p)


def minor_meta(spec: RankMethodSpec, space: PolySpace, field: PrimeField) -> MinorMeta:
    return MinorMeta(spec, space, field)


class CircuitMeta:
    """Meta-polynomial given by a circuit over the N meta-variables."""

    def __init__(self, space: PolySpace, circuit: Circuit, meta_id: str = ""):
        if circuit.v != space.dimension:
            raise ArityMismatch(
                f"circuit over {circuit.v} inputs against dimension {space.dimension}"
            )
        self.space = space
        self.circuit = circuit
        self.field = circuit.field
        self.meta_id = meta_id or f"circuit:{circuit.size}g"

    @property
    def degree_bound(self) -> int:
        return self.circuit.formal_degree

    def eval_at(self, cv: Sequence[int]) -> int:
        if len(cv) != self.space.dimension:
            raise ArityMismatch(
                f"expected {self.space.dimension} coefficients, got {len(cv)}"
            )
        return self.circuit.evaluate(cv)


def eval_meta(T, cv: Sequence[int]) -> int:
    return T.eval_at(cv)


def discriminant(field: PrimeField) -> CircuitMeta:
    """b^2 - 4ac on the homogeneous quadratics in two variables.

    Coefficient order (a, b, c) follows the monomial index on that space:
    a at x^2, b at x*y, c at y^2.
    """
    space = PolySpace(2, 2, True)
    b = CircuitBuilder(field, 3)
    a_in, b_in, c_in = b.inp(0), b.inp(1), b.inp(2)
    b_sq = b.mul(b_in, b_in)
    ac = b.mul(a_in, c_in)
    neg4 = b.const(-4)
    out = b.add(b_sq, b.mul(neg4, ac))
    return CircuitMeta(space, b.build(out), meta_id="disc")


def coordinate_meta(space: PolySpace, field: PrimeField, i: int) -> CircuitMeta:
    if not 0 <= i < space.dimension:
        raise ArityMismatch(f"coordinate {i} outside [0, {space.dimension})")
    b = CircuitBuilder(field, space.dimension)
    out = b.inp(i)
    return CircuitMeta(space, b.build(out), meta_id=f"coord:{i}")


def linear_meta(
    space: PolySpace, field: PrimeField, coeffs: Sequence[int]
) -> CircuitMeta:
    N = space.dimension
    if len(coeffs) != N:
        raise ArityMismatch(f"expected {N} coefficients, got {len(coeffs)}")
    b = CircuitBuilder(field, N)
    acc = None
    for i, c in enumerate(coeffs):
        c %= field.p
        if not c:
            continue
        g = b.inp(i)
        if c != 1:
            g = b.mul(b.const(c), g)
        acc = g if acc is None else b.add(acc, g)
    if acc is None:
        acc = b.const(0)
    tag = ",".join(str(c % field.p) for c in coeffs)
    if len(tag) > 48:
        tag = tag[:45] + "..."
    return CircuitMeta(space, b.build(acc), meta_id=f"linear:[{tag}]")
