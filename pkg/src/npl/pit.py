"""Polynomial identity testing and coefficient-space hitting experiments.

Two engines.  The exhaustive engine enumerates every point of F_p^v and is a
proof either way, valid because a nonzero polynomial of total degree below p
cannot vanish on all of F_p^v; it therefore requires p > formal degree.  The
randomized engine samples points; a nonzero polynomial of degree d vanishes
at a uniform point with probability at most d/p, so "probably zero" after t
independent trials carries error at most (d/p)^t.  Fields larger than twice
the degree keep the per-trial error below 1/2; smaller fields are allowed
but the verdict records the degraded bound.

Verdict witnesses are always re-evaluated before the verdict is built, so a
"proven nonzero" object cannot exist with a stale or wrong witness.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field as dc_field
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .algebra import MonomialIndex, PolySpace, PrimeField, SparsePoly
from .circuits import (
    AffineMatrixMap,
    Circuit,
    FamilyDescriptor,
    FamilySample,
    derive_seed,
    det_projection,
    iter_family,
    sample_family_with_params,
)
from .errors import (
    ArityMismatch,
    CharacteristicTooSmall,
    EnumerationBudgetExceeded,
    SpaceMismatch,
)
from .meta import eval_meta

DEFAULT_TRIALS = 25
DEFAULT_ENUM_BUDGET = 1_000_000

PROVEN_ZERO = "proven-zero"
PROVEN_NONZERO = "proven-nonzero"
PROBABLY_ZERO = "probably-zero"


@dataclass(frozen=True)
class PitVerdict:
    outcome: str
    degree_bound: int
    p: int
    witness: Optional[Tuple[int, ...]] = None
    value: Optional[int] = None
    trials: Optional[int] = None
    warnings: Tuple[str, ...] = ()

    @property
    def per_trial_error(self) -> Optional[str]:
        if self.outcome != PROBABLY_ZERO:
            return None
        return f"{min(self.degree_bound, self.p)}/{self.p}"

    def to_json(self) -> dict:
        return {
            "outcome": self.outcome,
            "degree_bound": self.degree_bound,
            "p": self.p,
            "witness": list(self.witness) if self.witness is not None else None,
            "value": self.value,
            "trials": self.trials,
            "per_trial_error": self.per_trial_error,
            "warnings": list(self.warnings),
        }


def _nonzero_verdict(
    point: Sequence[int],
    recheck: Callable[[Sequence[int]], int],
    degree_bound: int,
    p: int,
    trials: Optional[int] = None,
    warnings: Tuple[str, ...] = (),
) -> PitVerdict:
    value = recheck(point)
    if value % p == 0:
        raise AssertionError("witness failed its re-evaluation")
    return PitVerdict(
        outcome=PROVEN_NONZERO,
        degree_bound=degree_bound,
        p=p,
        witness=tuple(int(x) for x in point),
        value=int(value % p),
        trials=trials,
        warnings=warnings,
    )


def pit_exhaustive(
    circuit: Circuit, enum_budget: int = DEFAULT_ENUM_BUDGET
) -> PitVerdict:
    """Evaluate the circuit on all of F_p^v.  Proof-grade either way."""
    p = circuit.field.p
    deg = circuit.formal_degree
    if p <= deg:
        raise CharacteristicTooSmall(
            f"exhaustive test needs p > formal degree; got p={p}, degree={deg}"
        )
    total = p ** circuit.v
    if total > enum_budget:
        raise EnumerationBudgetExceeded(
            f"{total} points exceed the budget of {enum_budget}"
        )
    # one value array per gate over the whole grid; the budget caps memory
    idx = np.arange(total, dtype=np.int64)
    vals: List[np.ndarray] = []
    for g in circuit.gates:
        op = g[0]
        if op == "in":
            stride = p ** (circuit.v - 1 - g[1])
            vals.append((idx // stride) % p)
        elif op == "const":
            vals.append(np.full(total, g[1], dtype=np.int64))
        elif op == "add":
            vals.append((vals[g[1]] + vals[g[2]]) % p)
        else:
            vals.append((vals[g[1]] * vals[g[2]]) % p)
    out = vals[circuit.out]
    nz = np.nonzero(out)[0]
    if nz.size == 0:
        return PitVerdict(outcome=PROVEN_ZERO, degree_bound=deg, p=p)
    q = int(nz[0])
    point = tuple((q // p ** (circuit.v - 1 - i)) % p for i in range(circuit.v))
    return _nonzero_verdict(point, circuit.evaluate, deg, p)


def pit_schwartz_zippel(
    circuit: Circuit, trials: int = DEFAULT_TRIALS, seed: int = 0
) -> PitVerdict:
    """Randomized identity test; deterministic function of the seed."""
    if trials < 1:
        raise ValueError("at least one trial required")
    p = circuit.field.p
    deg = circuit.formal_degree
    warnings: Tuple[str, ...] = ()
    if p <= 2 * deg:
        warnings = (
            f"field size {p} is at most twice the formal degree {deg}; "
            "per-trial error bound degraded",
        )
    for t in range(trials):
        rng = random.Random(derive_seed(seed, t))
        point = tuple(rng.randrange(p) for _ in range(circuit.v))
        if circuit.evaluate(point) != 0:
            return _nonzero_verdict(
                point, circuit.evaluate, deg, p, trials=t + 1, warnings=warnings
            )
    return PitVerdict(
        outcome=PROBABLY_ZERO,
        degree_bound=deg,
        p=p,
        trials=trials,
        warnings=warnings,
    )


# ---------------------------------------------------------------------------
# seeded generators
# ---------------------------------------------------------------------------


class Generator:
    """A polynomial map from s seed values to a coefficient vector.

    Each output coordinate is a polynomial of degree at most ``coord_degree``
    in the seeds; for the determinant generator this holds by construction,
    since every coefficient of det(L(x)) is a degree-n polynomial in the
    entries of the coefficient matrix of L.
    """

    def __init__(
        self,
        s: int,
        space: PolySpace,
        field: PrimeField,
        coord_degree: int,
        fn: Callable[[Sequence[int]], List[int]],
        gen_id: str,
    ):
        self.s = s
        self.space = space
        self.field = field
        self.coord_degree = coord_degree
        self._fn = fn
        self.gen_id = gen_id

    def evaluate(self, seed_values: Sequence[int]) -> List[int]:
        if len(seed_values) != self.s:
            raise ArityMismatch(
                f"generator takes {self.s} seed values, got {len(seed_values)}"
            )
        p = self.field.p
        cv = self._fn([x % p for x in seed_values])
        if len(cv) != self.space.dimension:
            raise AssertionError("generator produced a vector of the wrong length")
        return cv


def det_coeff_generator(n: int, field: PrimeField) -> Generator:
    """Seeds are the n^2 x n^2 coefficient matrix of a homogeneous linear
    matrix map L in n^2 variables; the output is coeff(det(L(x)))."""
    if not 1 <= n <= 6:
        raise ValueError("determinant generator supported for 1 <= n <= 6")
    v = n * n
    space = PolySpace(v, n, True)
    index = MonomialIndex(space)

    def fn(params: Sequence[int]) -> List[int]:
        L = AffineMatrixMap.from_params(field, n, v, list(params), homogeneous=True)
        return det_projection(L).coeff_vector(index)

    return Generator(
        s=n ** 4,
        space=space,
        field=field,
        coord_degree=n,
        fn=fn,
        gen_id=f"det-coeff:n={n}",
    )


def _probe_meta_nonzero(
    T, trials: int, seed: int
) -> Optional[Tuple[Tuple[int, ...], int]]:
    """Randomized nonzero-ness probe for a meta-polynomial itself."""
    p = T.field.p
    N = T.space.dimension
    for t in range(trials):
        rng = random.Random(derive_seed(seed, t))
        cv = tuple(rng.randrange(p) for _ in range(N))
        val = eval_meta(T, cv)
        if val:
            return cv, val
    return None

_PROBE_TRIALS = 16
_PROBE_SEED_SALT = 0x9E3779B9


def generator_pit(T, G: Generator, trials: int = DEFAULT_TRIALS, seed: int = 0) -> PitVerdict:
    """Identity test for the composition T(G(seed)) by random seed points."""
    if T.space != G.space or T.field.p != G.field.p:
        raise SpaceMismatch("meta-polynomial and generator target different spaces")
    if trials < 1:
        raise ValueError("at least one trial required")
    p = G.field.p
    deg = T.degree_bound * G.coord_degree
    warnings: Tuple[str, ...] = ()
    if p <= 2 * deg:
        warnings = (
            f"field size {p} is at most twice the composed degree bound {deg}; "
            "per-trial error bound degraded",
        )
    for t in range(trials):
        rng = random.Random(derive_seed(seed, t))
        point = tuple(rng.randrange(p) for _ in range(G.s))
        val = eval_meta(T, G.evaluate(point))
        if val:
            return _nonzero_verdict(
                point,
                lambda pt: eval_meta(T, G.evaluate(pt)),
                deg,
                p,
                trials=t + 1,
                warnings=warnings,
            )
    probe = _probe_meta_nonzero(T, _PROBE_TRIALS, derive_seed(seed, _PROBE_SEED_SALT))
    if probe is None:
        warnings = warnings + (
            "meta-polynomial may be identically zero "
            f"(nonzero probe failed over {_PROBE_TRIALS} samples)",
        )
    return PitVerdict(
        outcome=PROBABLY_ZERO, degree_bound=deg, p=p, trials=trials, warnings=warnings
    )


# ---------------------------------------------------------------------------
# hitting checks and audits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HitReport:
    meta_id: str
    family: FamilyDescriptor
    mode: str  # "random" | "exhaustive"
    outcome: str  # "witness" | "none-found"
    examined: int
    zeros: int
    exhausted: bool
    seed: Optional[int] = None
    trials: Optional[int] = None
    witness_params: Optional[Tuple[int, ...]] = None
    witness_poly: Optional[dict] = None
    witness_value: Optional[int] = None
    degenerate_suspected: bool = False

    def to_json(self) -> dict:
        return {
            "meta": self.meta_id,
            "family": self.family.to_json(),
            "mode": self.mode,
            "outcome": self.outcome,
            "examined": self.examined,
            "zeros": self.zeros,
            "exhausted": self.exhausted,
            "seed": self.seed,
            "trials": self.trials,
            "witness": None
            if self.witness_params is None
            else {
                "params": list(self.witness_params),
                "poly": self.witness_poly,
                "value": self.witness_value,
            },
            "degenerate_suspected": self.degenerate_suspected,
        }


def _check_spaces(desc: FamilyDescriptor, T) -> None:
    if desc.space != T.space or desc.field.p != T.field.p:
        raise SpaceMismatch("meta-polynomial and family target different spaces")


def succinct_hitting_check(
    desc: FamilyDescriptor,
    T,
    trials: Optional[int] = None,
    exhaustive: bool = False,
    seed: int = 0,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
    collect_stats: bool = False,
) -> HitReport:
    """Search the family for a member on which T is nonzero.

    Random mode samples ``trials`` members from seeds derived from ``seed``.
    Exhaustive mode walks the family's entire parameter grid; completing the
    walk with no witness is a proof that T vanishes on the family.  A found
    witness is returned even if the grid is larger than the budget; only an
    incomplete, witness-free walk raises.
    """
    _check_spaces(desc, T)
    if exhaustive == (trials is not None):
        raise ValueError("pass exactly one of trials= or exhaustive=True")
    index = MonomialIndex(desc.space)
    examined = 0
    zeros = 0
    witness: Optional[FamilySample] = None
    witness_value = 0
    exhausted = False
    if exhaustive:
        for sample in iter_family(desc):
            examined += 1
            if examined > enum_budget:
                raise EnumerationBudgetExceeded(
                    f"family grid larger than the budget of {enum_budget} "
                    "and no witness found within it"
                )
            val = eval_meta(T, sample.poly.coeff_vector(index))
            if val:
                witness, witness_value = sample, val
                break
            zeros += 1
        else:
            exhausted = True
    else:
        for t in range(trials):
            sample = sample_family_with_params(desc, derive_seed(seed, t))
            examined += 1
            val = eval_meta(T, sample.poly.coeff_vector(index))
            if val:
                if witness is None:
                    witness, witness_value = sample, val
                if not collect_stats:
                    break
            else:
                zeros += 1
    degenerate = False
    if witness is None:
        probe = _probe_meta_nonzero(
            T, _PROBE_TRIALS, derive_seed(seed, _PROBE_SEED_SALT)
        )
        degenerate = probe is None
    else:
        # re-check the witness before reporting it
        if eval_meta(T, witness.poly.coeff_vector(index)) != witness_value:
            raise AssertionError("witness failed its re-evaluation")
    return HitReport(
        meta_id=getattr(T, "meta_id", "meta"),
        family=desc,
        mode="exhaustive" if exhaustive else "random",
        outcome="none-found" if witness is None else "witness",
        examined=examined,
        zeros=zeros,
        exhausted=exhausted,
        seed=None if exhaustive else seed,
        trials=trials,
        witness_params=None if witness is None else witness.params,
        witness_poly=None if witness is None else witness.poly.to_json(),
        witness_value=None if witness is None else witness_value,
        degenerate_suspected=degenerate,
    )


VALID_SEPARATION = "valid-separation-instance"
REFUTED = "refuted"
NON_SEPARATING = "non-separating"


@dataclass(frozen=True)
class AuditReport:
    classification: str
    meta_id: str
    family: FamilyDescriptor
    hard_poly: dict
    hard_value: int
    evidence: HitReport
    exhaustive_proof: bool

    def to_json(self) -> dict:
        return {
            "classification": self.classification,
            "meta": self.meta_id,
            "family": self.family.to_json(),
            "hard": self.hard_poly,
            "hard_value": self.hard_value,
            "vanishing": {
                "zeros": self.evidence.zeros,
                "examined": self.evidence.examined,
            },
            "exhaustive_proof": self.exhaustive_proof,
            "evidence": self.evidence.to_json(),
        }


def natural_proof_audit(
    T,
    easy: FamilyDescriptor,
    hard: SparsePoly,
    trials: Optional[int] = None,
    exhaustive: bool = False,
    seed: int = 0,
    enum_budget: int = DEFAULT_ENUM_BUDGET,
) -> AuditReport:
    """Check whether T separates the easy family from one hard candidate.

    Classification: ``refuted`` when some easy member has nonzero T-value
    (T is useless against the family); otherwise ``non-separating`` when T
    also vanishes at the hard candidate; otherwise the triple is a
    ``valid-separation-instance``.
    """
    _check_spaces(easy, T)
    index = MonomialIndex(easy.space)
    hard_cv = hard.coeff_vector(index)
    evidence = succinct_hitting_check(
        easy,
        T,
        trials=trials,
        exhaustive=exhaustive,
        seed=seed,
        enum_budget=enum_budget,
        collect_stats=True,
    )
    hard_value = eval_meta(T, hard_cv)
    if evidence.outcome == "witness":
        classification = REFUTED
    elif hard_value == 0:
        classification = NON_SEPARATING
    else:
        classification = VALID_SEPARATION
    return AuditReport(
        classification=classification,
        meta_id=getattr(T, "meta_id", "meta"),
        family=easy,
        hard_poly=hard.to_json(),
        hard_value=hard_value,
        evidence=evidence,
        exhaustive_proof=evidence.exhausted,
    )
