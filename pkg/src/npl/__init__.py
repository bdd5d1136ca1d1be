"""npl: exact-arithmetic experiments on polynomial coefficient spaces."""

from .algebra import (
    DEFAULT_TERM_CAP,
    AffineForm,
    FieldElement,
    MonomialIndex,
    PolySpace,
    PrimeField,
    SparsePoly,
    identity_forms,
    is_prime,
)
from .circuits import (
    AffineMatrixMap,
    Circuit,
    CircuitBuilder,
    FamilyDescriptor,
    FamilySample,
    berkowitz_det,
    derive_seed,
    det_projection,
    iter_family,
    pad_polynomial,
    sample_family,
    sample_family_with_params,
    sps_build,
    validate_member,
)
from .meta import (
    CircuitMeta,
    CoeffMatrix,
    MinorMeta,
    MinorSelection,
    RankMethodSpec,
    coordinate_meta,
    discriminant,
    eval_meta,
    linear_meta,
    matrix_det,
    matrix_rank,
    minor_meta,
    partials_matrix,
    rank_mod_p,
    shifted_partials_matrix,
)
from .pit import (
    DEFAULT_ENUM_BUDGET,
    DEFAULT_TRIALS,
    AuditReport,
    Generator,
    HitReport,
    PitVerdict,
    det_coeff_generator,
    generator_pit,
    natural_proof_audit,
    pit_exhaustive,
    pit_schwartz_zippel,
    succinct_hitting_check,
)
from .ips import (
    Cnf,
    GeometricCertificate,
    PitConfig,
    PolynomialSystem,
    VerificationReport,
    boolean_axiom_circuit,
    clause_circuit,
    cnf_to_system,
    compose_system,
    parse_dimacs,
    verify_certificate,
)
from . import errors

__version__ = "0.1.0"
