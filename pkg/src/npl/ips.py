"""Geometric proof certificates for systems of polynomial equations.

A certificate for the system f_1, ..., f_m is a circuit C over inputs
y_1, ..., y_m with two checkable conditions: C at the all-zero input equals
1, and C(f_1(x), ..., f_m(x)) is identically zero.  If both hold, no common
zero of the system can exist, because at such a point the composition would
evaluate to C(0) = 1.

CNF formulas translate clause by clause: a clause contributes the product of
(1 - x_i) over its positive literals and x_i over its negated ones, so the
clause polynomial vanishes exactly on the Boolean assignments satisfying the
clause.  The Boolean axioms x_i^2 - x_i are always appended, pinning every
common zero to {0, 1}^n.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Mapping, Optional, Sequence, Tuple

from .algebra import PrimeField
from .circuits import Circuit, CircuitBuilder
from .errors import ArityMismatch, ClauseTooWide, FieldMismatch
from .pit import (
    DEFAULT_ENUM_BUDGET,
    DEFAULT_TRIALS,
    PROBABLY_ZERO,
    PROVEN_ZERO,
    PitVerdict,
    pit_exhaustive,
    pit_schwartz_zippel,
)

MAX_CLAUSE_WIDTH = 3


@dataclass(frozen=True)
class Cnf:
    num_vars: int
    clauses: Tuple[Tuple[int, ...], ...]


def parse_dimacs(text: str) -> Cnf:
    """Parse DIMACS CNF.  Clauses are zero-terminated and may span lines."""
    header: Optional[Tuple[int, int]] = None
    tokens: List[str] = []
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            if header is not None:
                raise ValueError("duplicate DIMACS header")
            parts = line.split()
            if len(parts) != 4 or parts[1] != "cnf":
                raise ValueError(f"malformed header line {line!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise ValueError("clause data before the DIMACS header")
        tokens.extend(line.split())
    if header is None:
        raise ValueError("missing DIMACS header")
    n, m = header
    if n < 0 or m < 0:
        raise ValueError("negative counts in DIMACS header")
    clauses: List[Tuple[int, ...]] = []
    current: List[int] = []
    for tok in tokens:
        try:
            lit = int(tok)
        except ValueError:
            raise ValueError(f"non-integer token {tok!r} in clause data")
        if lit == 0:
            clauses.append(tuple(current))
            current = []
            continue
        if not 1 <= abs(lit) <= n:
            raise ValueError(f"literal {lit} outside variable range 1..{n}")
        current.append(lit)
    if current:
        raise ValueError("last clause is not zero-terminated")
    if len(clauses) != m:
        raise ValueError(f"header promises {m} clauses, found {len(clauses)}")
    return Cnf(n, tuple(clauses))


def clause_circuit(clause: Sequence[int], n: int, field: PrimeField) -> Circuit:
    """Product over the clause literals; the empty clause is the constant 1."""
    b = CircuitBuilder(field, n)
    acc: Optional[int] = None
    for lit in clause:
        i = abs(lit) - 1
        if lit > 0:
            g = b.sub(b.const(1), b.inp(i))
        else:
            g = b.inp(i)
        acc = g if acc is None else b.mul(acc, g)
    if acc is None:
        acc = b.const(1)
    return b.build(acc)


def boolean_axiom_circuit(i: int, n: int, field: PrimeField) -> Circuit:
    b = CircuitBuilder(field, n)
    x = b.inp(i)
    sq = b.mul(x, x)
    out = b.sub(sq, b.inp(i))
    return b.build(out)


@dataclass(frozen=True)
class PolynomialSystem:
    field: PrimeField
    n: int
    members: Tuple[Circuit, ...]
    provenance: str = "raw"
    labels: Optional[Tuple[str, ...]] = None

    def __post_init__(self) -> None:
        for c in self.members:
            if c.field.p != self.field.p:
                raise FieldMismatch("system member in a different field")
            if c.v != self.n:
                raise ArityMismatch("system member over a different variable count")
        if self.labels is not None and len(self.labels) != len(self.members):
            raise ValueError("one label per member required")

    def to_json(self) -> dict:
        return {
            "p": self.field.p,
            "n": self.n,
            "provenance": self.provenance,
            "labels": list(self.labels) if self.labels is not None else None,
            "members": [c.to_json() for c in self.members],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PolynomialSystem":
        field = PrimeField(int(data["p"]))
        members = tuple(Circuit.from_json(c) for c in data["members"])
        labels = data.get("labels")
        return cls(
            field=field,
            n=int(data["n"]),
            members=members,
            provenance=data.get("provenance", "raw"),
            labels=tuple(labels) if labels is not None else None,
        )


def cnf_to_system(cnf: Cnf, field: PrimeField) -> PolynomialSystem:
    members: List[Circuit] = []
    labels: List[str] = []
    for idx, clause in enumerate(cnf.clauses):
        if len(clause) > MAX_CLAUSE_WIDTH:
            raise ClauseTooWide(
                f"clause {idx} has {len(clause)} literals (limit {MAX_CLAUSE_WIDTH})"
            )
        members.append(clause_circuit(clause, cnf.num_vars, field))
        labels.append(f"clause:{idx}")
    for i in range(cnf.num_vars):
        members.append(boolean_axiom_circuit(i, cnf.num_vars, field))
        labels.append(f"axiom:x{i + 1}")
    return PolynomialSystem(
        field=field,
        n=cnf.num_vars,
        members=tuple(members),
        provenance="cnf-derived",
        labels=tuple(labels),
    )


@dataclass(frozen=True)
class GeometricCertificate:
    circuit: Circuit

    @property
    def arity(self) -> int:
        return self.circuit.v

    def to_json(self) -> dict:
        return self.circuit.to_json()

    @classmethod
    def from_json(cls, data: Mapping) -> "GeometricCertificate":
        return cls(Circuit.from_json(data))


def compose_system(system: PolynomialSystem, cert: GeometricCertificate) -> Circuit:
    """Splice the member circuits into the certificate's inputs.

    The result is a circuit over the x variables computing
    C(f_1(x), ..., f_m(x)); its size is bounded by the sum of the part sizes
    and its formal degree by deg(C) times the largest member degree.
    """
    if cert.arity != len(system.members):
        raise ArityMismatch(
            f"certificate over {cert.arity} inputs for a system of "
            f"{len(system.members)} members"
        )
    if cert.circuit.field.p != system.field.p:
        raise FieldMismatch("certificate and system in different fields")
    gates: List[Tuple] = []
    member_out: List[int] = []
    for member in system.members:
        offset = len(gates)
        for g in member.gates:
            if g[0] in ("add", "mul"):
                gates.append((g[0], g[1] + offset, g[2] + offset))
            else:
                gates.append(g)
        member_out.append(member.out + offset)
    cmap: List[int] = []
    for g in cert.circuit.gates:
        op = g[0]
        if op == "in":
            cmap.append(member_out[g[1]])
        elif op == "const":
            gates.append(g)
            cmap.append(len(gates) - 1)
        else:
            gates.append((op, cmap[g[1]], cmap[g[2]]))
            cmap.append(len(gates) - 1)
    return Circuit(system.field, system.n, tuple(gates), cmap[cert.circuit.out])


@dataclass(frozen=True)
class PitConfig:
    mode: str = "exhaustive"  # "exhaustive" | "schwartz-zippel"
    trials: int = DEFAULT_TRIALS
    seed: int = 0
    enum_budget: int = DEFAULT_ENUM_BUDGET

    def __post_init__(self) -> None:
        if self.mode not in ("exhaustive", "schwartz-zippel"):
            raise ValueError(f"unknown engine mode {self.mode!r}")


@dataclass(frozen=True)
class VerificationReport:
    accepted: bool
    grade: Optional[str]  # "exact" | "randomized"
    error_bound: Optional[str]
    value_at_zero: int
    failed_condition: Optional[int]
    relation_verdict: Optional[PitVerdict]

    def to_json(self) -> dict:
        return {
            "accepted": self.accepted,
            "grade": self.grade,
            "error_bound": self.error_bound,
            "conditions": {
                "identity_at_zero": {
                    "holds": self.failed_condition != 1,
                    "value": self.value_at_zero,
                },
                "polynomial_relation": None
                if self.relation_verdict is None
                else {
                    "holds": self.relation_verdict.outcome != "proven-nonzero",
                    "verdict": self.relation_verdict.to_json(),
                },
            },
            "failed_condition": self.failed_condition,
            "witness": None
            if self.relation_verdict is None or self.relation_verdict.witness is None
            else {
                "point": list(self.relation_verdict.witness),
                "value": self.relation_verdict.value,
            },
        }


def verify_certificate(
    system: PolynomialSystem,
    cert: GeometricCertificate,
    config: PitConfig = PitConfig(),
) -> VerificationReport:
    """Check both certificate conditions and grade the acceptance."""
    m = len(system.members)
    value_at_zero = cert.circuit.evaluate([0] * m)
    if value_at_zero != 1:
        return VerificationReport(
            accepted=False,
            grade=None,
            error_bound=None,
            value_at_zero=value_at_zero,
            failed_condition=1,
            relation_verdict=None,
        )
    composed = compose_system(system, cert)
    if config.mode == "exhaustive":
        verdict = pit_exhaustive(composed, enum_budget=config.enum_budget)
    else:
        verdict = pit_schwartz_zippel(composed, trials=config.trials, seed=config.seed)
    if verdict.outcome == PROVEN_ZERO:
        return VerificationReport(
            accepted=True,
            grade="exact",
            error_bound=None,
            value_at_zero=1,
            failed_condition=None,
            relation_verdict=verdict,
        )
    if verdict.outcome == PROBABLY_ZERO:
        d = min(verdict.degree_bound, verdict.p)
        eps = Fraction(d, verdict.p) ** verdict.trials
        return VerificationReport(
            accepted=True,
            grade="randomized",
            error_bound=f"{eps.numerator}/{eps.denominator}",
            value_at_zero=1,
            failed_condition=None,
            relation_verdict=verdict,
        )
    return VerificationReport(
        accepted=False,
        grade=None,
        error_bound=None,
        value_at_zero=1,
        failed_condition=2,
        relation_verdict=verdict,
    )
