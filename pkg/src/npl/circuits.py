"""Algebraic circuits and the structured polynomial families built from them.

A circuit is a DAG of gates over a prime field: inputs, constants, fan-in-two
addition and multiplication.  Gates are stored in topological order as plain
tuples, so circuits stay hashable and cheap to serialize.

Formal degree is the usual syntactic bound: 1 for inputs, 0 for constants,
max for addition, sum for multiplication.  It bounds the degree of the
expanded polynomial and is what the identity-testing engines key their field
preconditions on.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass, field as dc_field
from typing import Dict, Iterator, List, Mapping, Optional, Sequence, Tuple

from .algebra import (
    DEFAULT_TERM_CAP,
    AffineForm,
    Exponents,
    MonomialIndex,
    PolySpace,
    PrimeField,
    SparsePoly,
)
from .errors import ArityMismatch, DescriptorInvalid, FieldMismatch

Gate = Tuple  # ("in", i) | ("const", c) | ("add", a, b) | ("mul", a, b)

FAMILY_CLASSES = ("det-projection", "sps", "sparse", "squares", "full-space")


def derive_seed(seed: int, index: int) -> int:
    """Per-trial seed: base seed XOR trial index.

    Trials in a batch draw from disjoint derived streams, so results do not
    depend on execution order and a parallel runner would reproduce the
    sequential answer exactly.
    """
    return seed ^ index


@dataclass(frozen=True)
class Circuit:
    field: PrimeField
    v: int
    gates: Tuple[Gate, ...]
    out: int

    def __post_init__(self) -> None:
        if self.v < 0:
            raise ValueError("negative input count")
        if not self.gates:
            raise ValueError("circuit needs at least one gate")
        p = self.field.p
        for idx, g in enumerate(self.gates):
            op = g[0]
            if op == "in":
                if not (len(g) == 2 and 0 <= g[1] < self.v):
                    raise ValueError(f"gate {idx}: bad input reference {g}")
            elif op == "const":
                if len(g) != 2 or not isinstance(g[1], int):
                    raise ValueError(f"gate {idx}: bad constant {g}")
                if not 0 <= g[1] < p:
                    raise ValueError(f"gate {idx}: constant not canonical mod {p}")
            elif op in ("add", "mul"):
                if len(g) != 3 or not (0 <= g[1] < idx and 0 <= g[2] < idx):
                    raise ValueError(f"gate {idx}: bad operand references {g}")
            else:
                raise ValueError(f"gate {idx}: unknown op {op!r}")
        if not 0 <= self.out < len(self.gates):
            raise ValueError(f"output index {self.out} out of range")

    @property
    def size(self) -> int:
        return len(self.gates)

    @functools.cached_property
    def formal_degree(self) -> int:
        degs: List[int] = []
        for g in self.gates:
            op = g[0]
            if op == "in":
                degs.append(1)
            elif op == "const":
                degs.append(0)
            elif op == "add":
                degs.append(max(degs[g[1]], degs[g[2]]))
            else:
                degs.append(degs[g[1]] + degs[g[2]])
        return degs[self.out]

    def evaluate(self, point: Sequence[int]) -> int:
        if len(point) != self.v:
            raise ArityMismatch(
                f"circuit over {self.v} inputs, point of length {len(point)}"
            )
        p = self.field.p
        pt = [x % p for x in point]
        vals: List[int] = []
        for g in self.gates:
            op = g[0]
            if op == "in":
                vals.append(pt[g[1]])
            elif op == "const":
                vals.append(g[1])
            elif op == "add":
                vals.append((vals[g[1]] + vals[g[2]]) % p)
            else:
                vals.append(vals[g[1]] * vals[g[2]] % p)
        return vals[self.out]

    def expand(self, term_cap: int = DEFAULT_TERM_CAP) -> SparsePoly:
        """The polynomial the circuit computes, as an explicit term map."""
        polys: List[SparsePoly] = []
        for g in self.gates:
            op = g[0]
            if op == "in":
                polys.append(SparsePoly.variable(self.field, self.v, g[1]))
            elif op == "const":
                polys.append(SparsePoly.constant(self.field, self.v, g[1]))
            elif op == "add":
                polys.append(polys[g[1]] + polys[g[2]])
            else:
                polys.append(polys[g[1]].mul(polys[g[2]], term_cap))
        return polys[self.out]

    def to_json(self) -> dict:
        gates = []
        for g in self.gates:
            if g[0] == "in":
                gates.append({"op": "in", "i": g[1]})
            elif g[0] == "const":
                gates.append({"op": "const", "c": g[1]})
            else:
                gates.append({"op": g[0], "a": g[1], "b": g[2]})
        return {"p": self.field.p, "v": self.v, "gates": gates, "out": self.out}

    @classmethod
    def from_json(cls, data: Mapping) -> "Circuit":
        field = PrimeField(int(data["p"]))
        v = int(data["v"])
        gates: List[Gate] = []
        for idx, g in enumerate(data["gates"]):
            op = g.get("op")
            if op == "in":
                gates.append(("in", int(g["i"])))
            elif op == "const":
                gates.append(("const", int(g["c"]) % field.p))
            elif op in ("add", "mul"):
                gates.append((op, int(g["a"]), int(g["b"])))
            else:
                raise ValueError(f"gate {idx}: unknown op {op!r}")
        return cls(field, v, tuple(gates), int(data["out"]))


class CircuitBuilder:
    """Incremental construction helper; methods return gate indices."""

    def __init__(self, field: PrimeField, v: int):
        self.field = field
        self.v = v
        self.gates: List[Gate] = []

    def _push(self, gate: Gate) -> int:
        self.gates.append(gate)
        return len(self.gates) - 1

    def inp(self, i: int) -> int:
        return self._push(("in", i))

    def const(self, c: int) -> int:
        return self._push(("const", c % self.field.p))

    def add(self, a: int, b: int) -> int:
        return self._push(("add", a, b))

    def mul(self, a: int, b: int) -> int:
        return self._push(("mul", a, b))

    def sub(self, a: int, b: int) -> int:
        neg = self.mul(self.const(-1), b)
        return self.add(a, neg)

    def affine(self, form: AffineForm) -> int:
        """Gate computing the given affine form of the circuit inputs."""
        if form.arity != self.v:
            raise ArityMismatch("affine form arity differs from circuit inputs")
        acc: Optional[int] = None
        for i, c in enumerate(form.coeffs):
            if not c:
                continue
            g = self.inp(i)
            if c != 1:
                g = self.mul(self.const(c), g)
            acc = g if acc is None else self.add(acc, g)
        if form.const or acc is None:
            g = self.const(form.const)
            acc = g if acc is None else self.add(acc, g)
        return acc

    def build(self, out: Optional[int] = None) -> Circuit:
        if out is None:
            out = len(self.gates) - 1
        return Circuit(self.field, self.v, tuple(self.gates), out)


@dataclass(frozen=True)
class AffineMatrixMap:
    """An n x n matrix of affine forms in v variables."""

    field: PrimeField
    n: int
    v: int
    entries: Tuple[Tuple[AffineForm, ...], ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("matrix size must be positive")
        if len(self.entries) != self.n or any(len(r) != self.n for r in self.entries):
            raise ValueError("entry grid is not n x n")
        for row in self.entries:
            for f in row:
                if f.field.p != self.field.p:
                    raise FieldMismatch("entry form in a different field")
                if f.arity != self.v:
                    raise ArityMismatch("entry form arity differs from v")

    @property
    def is_homogeneous(self) -> bool:
        return all(f.is_homogeneous for row in self.entries for f in row)

    @classmethod
    def from_params(
        cls,
        field: PrimeField,
        n: int,
        v: int,
        params: Sequence[int],
        homogeneous: bool,
    ) -> "AffineMatrixMap":
        """Entry-major layout: per entry its v coefficients, then the constant
        when the map is affine rather than homogeneous."""
        width = v if homogeneous else v + 1
        if len(params) != n * n * width:
            raise ArityMismatch(
                f"expected {n * n * width} parameters, got {len(params)}"
            )
        rows = []
        pos = 0
        for _ in range(n):
            row = []
            for _ in range(n):
                chunk = params[pos : pos + width]
                pos += width
                if homogeneous:
                    row.append(AffineForm(field, tuple(chunk), 0))
                else:
                    row.append(AffineForm(field, tuple(chunk[:v]), chunk[v]))
            rows.append(tuple(row))
        return cls(field, n, v, tuple(rows))

    def to_json(self) -> dict:
        return {
            "p": self.field.p,
            "n": self.n,
            "v": self.v,
            "entries": [
                [{"coeffs": list(f.coeffs), "const": f.const} for f in row]
                for row in self.entries
            ],
        }


def berkowitz_det(
    mat: Sequence[Sequence[SparsePoly]], term_cap: int = DEFAULT_TERM_CAP
) -> SparsePoly:
    """Division-free determinant of a square matrix of polynomials.

    Uses the Berkowitz recursion on principal submatrices; all intermediate
    values are Toeplitz products of polynomial vectors, so no entry is ever
    inverted and the result is exact over any commutative coefficient ring.
    """
    n = len(mat)
    if n == 0:
        raise ValueError("empty matrix")
    probe = mat[0][0]
    fld, v = probe.field, probe.v
    one = SparsePoly.constant(fld, v, 1)

    def vector(sub: Sequence[Sequence[SparsePoly]]) -> List[SparsePoly]:
        m = len(sub)
        if m == 1:
            return [one, -sub[0][0]]
        a = sub[0][0]
        row = list(sub[0][1:])
        col = [r[0] for r in sub[1:]]
        inner = [list(r[1:]) for r in sub[1:]]

        def dot(xs: Sequence[SparsePoly], ys: Sequence[SparsePoly]) -> SparsePoly:
            acc = SparsePoly.zero(fld, v)
            for x, y in zip(xs, ys):
                acc = acc + x.mul(y, term_cap)
            return acc

        diags = [col]
        for _ in range(m - 2):
            prev = diags[-1]
            diags.append(
                [dot(inner[i], prev) for i in range(m - 1)]
            )
        toep = [one, -a] + [-dot(row, d) for d in diags]
        sub_vec = vector(inner)
        out = []
        for i in range(m + 1):
            acc = SparsePoly.zero(fld, v)
            for j in range(min(i, m - 1) + 1):
                if i - j < len(toep):
                    acc = acc + toep[i - j].mul(sub_vec[j], term_cap)
            out.append(acc)
        return out

    charpoly = vector([list(r) for r in mat])
    det = charpoly[n]
    if n % 2 == 1:
        det = -det
    return det


def det_projection(L: AffineMatrixMap, term_cap: int = DEFAULT_TERM_CAP) -> SparsePoly:
    """det(L(x)) as an explicit polynomial in the x variables."""
    mat = [[f.to_poly() for f in row] for row in L.entries]
    return berkowitz_det(mat, term_cap)


def sps_build(
    field: PrimeField,
    v: int,
    products: Sequence[Sequence[AffineForm]],
    term_cap: int = DEFAULT_TERM_CAP,
) -> SparsePoly:
    """Sum over the given products of affine forms."""
    acc = SparsePoly.zero(field, v)
    for forms in products:
        term = SparsePoly.constant(field, v, 1)
        for f in forms:
            if f.field.p != field.p:
                raise FieldMismatch("form in a different field")
            if f.arity != v:
                raise ArityMismatch("form arity differs from v")
            term = term.mul(f.to_poly(), term_cap)
        acc = acc + term
    return acc


def pad_polynomial(
    f: SparsePoly, form: AffineForm, e: int, term_cap: int = DEFAULT_TERM_CAP
) -> SparsePoly:
    """Multiply f by the e-th power of a homogeneous linear form."""
    if e < 0:
        raise ValueError("negative padding exponent")
    if not form.is_homogeneous:
        raise ValueError("padding form must be homogeneous linear")
    if form.arity != f.v:
        raise ArityMismatch("padding form arity differs from polynomial")
    return f.mul(form.to_poly().pow(e, term_cap), term_cap)


# ---------------------------------------------------------------------------
# structured families
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FamilyDescriptor:
    """A named, finitely parameterized class of polynomials in one space.

    Every member is determined by a tuple of small integer parameters, one
    value per slot of ``param_ranges``.  Random sampling draws that tuple
    uniformly; exhaustive enumeration walks the full product grid.  Samplers
    keep degenerate draws (the zero polynomial is a legitimate member).
    """

    class_id: str
    space: PolySpace
    field: PrimeField
    n: int = 0
    top_fanin: Optional[int] = None
    product_degrees: Optional[Tuple[int, ...]] = None
    sparsity: Optional[int] = None

    def __post_init__(self) -> None:
        cid = self.class_id
        if cid not in FAMILY_CLASSES:
            raise DescriptorInvalid(f"unknown family class {cid!r}")
        sp = self.space
        if cid == "squares":
            if not (sp.homogeneous and sp.d == 2):
                raise DescriptorInvalid("squares family needs a homogeneous degree-2 space")
            object.__setattr__(self, "n", self.n or sp.v)
        elif cid == "full-space":
            object.__setattr__(self, "n", self.n or sp.v)
        elif cid == "det-projection":
            if self.n < 1:
                raise DescriptorInvalid("det-projection needs matrix size n >= 1")
            if sp.d != self.n:
                raise DescriptorInvalid(
                    f"det-projection of size {self.n} lives in degree-{self.n} spaces"
                )
        elif cid == "sps":
            fanin = self.top_fanin if self.top_fanin is not None else self.n
            if fanin is None or fanin < 0:
                raise DescriptorInvalid("sps needs a non-negative top fan-in")
            degs = self.product_degrees
            if degs is None:
                degs = (sp.d,) * fanin
            degs = tuple(int(x) for x in degs)
            if len(degs) != fanin:
                raise DescriptorInvalid("one product degree per summand required")
            if any(not 1 <= x <= sp.d for x in degs):
                raise DescriptorInvalid("product degrees must lie in [1, space degree]")
            if sp.homogeneous and any(x != sp.d for x in degs):
                raise DescriptorInvalid(
                    "homogeneous space requires every product degree to equal d"
                )
            object.__setattr__(self, "top_fanin", fanin)
            object.__setattr__(self, "product_degrees", degs)
            object.__setattr__(self, "n", self.n or fanin)
        elif cid == "sparse":
            if self.sparsity is None or self.sparsity < 1:
                raise DescriptorInvalid("sparse family needs sparsity >= 1")
            object.__setattr__(self, "n", self.n or self.sparsity)

    def param_ranges(self) -> Tuple[int, ...]:
        p = self.field.p
        sp = self.space
        cid = self.class_id
        if cid == "squares":
            return (p,) * sp.v
        if cid == "full-space":
            return (p,) * sp.dimension
        if cid == "det-projection":
            width = sp.v if sp.homogeneous else sp.v + 1
            return (p,) * (self.n * self.n * width)
        if cid == "sps":
            total = sum(self.product_degrees) * sp.v  # type: ignore[arg-type]
            return (p,) * total
        # sparse: a monomial rank and a coefficient per slot
        N = sp.dimension
        return (N,) * self.sparsity + (p,) * self.sparsity  # type: ignore[operator]

    def member_from_params(self, params: Sequence[int]) -> "FamilySample":
        ranges = self.param_ranges()
        if len(params) != len(ranges):
            raise ArityMismatch(
                f"expected {len(ranges)} parameters, got {len(params)}"
            )
        for x, r in zip(params, ranges):
            if not 0 <= x < r:
                raise ValueError(f"parameter {x} outside its range [0, {r})")
        fld, sp = self.field, self.space
        cid = self.class_id
        witness: dict
        if cid == "squares":
            form = AffineForm(fld, tuple(params), 0)
            poly = form.to_poly().pow(2)
            witness = {"form": list(form.coeffs)}
        elif cid == "full-space":
            idx = MonomialIndex(sp)
            poly = SparsePoly.from_coeff_vector(fld, idx, list(params))
            witness = {"vector": list(params)}
        elif cid == "det-projection":
            L = AffineMatrixMap.from_params(
                fld, self.n, sp.v, list(params), sp.homogeneous
            )
            poly = det_projection(L)
            witness = {"matrix_map": L.to_json()}
        elif cid == "sps":
            products = []
            pos = 0
            for deg in self.product_degrees:  # type: ignore[union-attr]
                forms = []
                for _ in range(deg):
                    forms.append(
                        AffineForm(fld, tuple(params[pos : pos + sp.v]), 0)
                    )
                    pos += sp.v
                products.append(forms)
            poly = sps_build(fld, sp.v, products)
            witness = {
                "products": [[list(f.coeffs) for f in forms] for forms in products]
            }
        else:  # sparse
            s = self.sparsity
            idx = MonomialIndex(sp)
            terms: Dict[Exponents, int] = {}
            entries = []
            for rank, coeff in zip(params[:s], params[s:]):
                e = idx.unrank(rank)
                terms[e] = terms.get(e, 0) + coeff
                entries.append([rank, coeff])
            poly = SparsePoly(fld, sp.v, terms)
            witness = {"entries": entries}
        sample = FamilySample(self, poly, tuple(params), witness)
        if not validate_member(self, sample):
            raise AssertionError("sampler produced an invalid member")
        return sample

    def grid_size(self) -> int:
        size = 1
        for r in self.param_ranges():
            size *= r
        return size

    def to_json(self) -> dict:
        out = {
            "class": self.class_id,
            "p": self.field.p,
            "space": self.space.to_json(),
            "n": self.n,
        }
        if self.top_fanin is not None:
            out["top_fanin"] = self.top_fanin
        if self.product_degrees is not None:
            out["product_degrees"] = list(self.product_degrees)
        if self.sparsity is not None:
            out["sparsity"] = self.sparsity
        return out

    @classmethod
    def from_json(cls, data: Mapping) -> "FamilyDescriptor":
        degs = data.get("product_degrees")
        return cls(
            class_id=data["class"],
            space=PolySpace.from_json(data["space"]),
            field=PrimeField(int(data["p"])),
            n=int(data.get("n", 0)),
            top_fanin=data.get("top_fanin"),
            product_degrees=tuple(degs) if degs is not None else None,
            sparsity=data.get("sparsity"),
        )


@dataclass(frozen=True)
class FamilySample:
    descriptor: FamilyDescriptor
    poly: SparsePoly
    params: Tuple[int, ...]
    witness: Mapping = dc_field(default_factory=dict)


def validate_member(desc: FamilyDescriptor, sample: FamilySample) -> bool:
    """Re-derive the polynomial from its construction witness and check the
    declared space.  Samplers run this before returning anything."""
    poly = sample.poly
    if not poly.fits_space(desc.space):
        return False
    fld, sp = desc.field, desc.space
    cid = desc.class_id
    w = sample.witness
    if cid == "squares":
        form = AffineForm(fld, tuple(w["form"]), 0)
        return form.to_poly().pow(2) == poly
    if cid == "full-space":
        idx = MonomialIndex(sp)
        return SparsePoly.from_coeff_vector(fld, idx, list(w["vector"])) == poly
    if cid == "det-projection":
        data = w["matrix_map"]
        rows = tuple(
            tuple(
                AffineForm(fld, tuple(cell["coeffs"]), cell["const"])
                for cell in row
            )
            for row in data["entries"]
        )
        L = AffineMatrixMap(fld, desc.n, sp.v, rows)
        return det_projection(L) == poly and len(poly.terms) <= sp.dimension
    if cid == "sps":
        products = [
            [AffineForm(fld, tuple(coeffs), 0) for coeffs in forms]
            for forms in w["products"]
        ]
        return sps_build(fld, sp.v, products) == poly
    # sparse
    idx = MonomialIndex(sp)
    terms: Dict[Exponents, int] = {}
    for rank, coeff in w["entries"]:
        e = idx.unrank(rank)
        terms[e] = terms.get(e, 0) + coeff
    return SparsePoly(fld, sp.v, terms) == poly and len(poly.terms) <= desc.sparsity


def sample_family_with_params(desc: FamilyDescriptor, seed: int) -> FamilySample:
    rng = random.Random(seed)
    params = tuple(rng.randrange(r) for r in desc.param_ranges())
    return desc.member_from_params(params)


def sample_family(desc: FamilyDescriptor, seed: int) -> SparsePoly:
    """Uniform member of the family; deterministic in (descriptor, seed)."""
    return sample_family_with_params(desc, seed).poly


def iter_family(desc: FamilyDescriptor) -> Iterator[FamilySample]:
    """Lazy walk over the full parameter grid in row-major order."""
    ranges = desc.param_ranges()
    for params in itertools.product(*(range(r) for r in ranges)):
        yield desc.member_from_params(params)
