"""Command-line front end.

Every invocation builds an ExperimentPlan (defaults resolved, inputs named),
executes it, and emits one JSON report.  The report body echoes the full
plan, so the body alone is enough to rerun the experiment, and reruns with
the same plan produce byte-identical bodies.  Wall-clock time lives in the
header, outside the body, precisely so it cannot break that guarantee.

Exit codes: 0 for zero / none-found / accept, 1 for nonzero / witness /
reject, 2 for usage errors and precondition failures.
"""

from __future__ import annotations

import argparse
import json
import os
import random
import sys
import time
from dataclasses import dataclass, field as dc_field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple

from . import __version__
from .algebra import DEFAULT_TERM_CAP, MonomialIndex, PolySpace, PrimeField, SparsePoly
from .circuits import Circuit, FamilyDescriptor
from .errors import NplError
from .ips import (
    GeometricCertificate,
    PitConfig,
    PolynomialSystem,
    cnf_to_system,
    parse_dimacs,
    verify_certificate,
)
from .meta import (
    CircuitMeta,
    MinorSelection,
    RankMethodSpec,
    coordinate_meta,
    discriminant,
    minor_meta,
    partials_matrix,
    rank_mod_p,
    shifted_partials_matrix,
)
from .pit import (
    DEFAULT_ENUM_BUDGET,
    DEFAULT_TRIALS,
    det_coeff_generator,
    natural_proof_audit,
    pit_exhaustive,
    pit_schwartz_zippel,
    succinct_hitting_check,
)

DEFAULT_FIELD = 2 ** 31 - 1
FIELD_ENV_VAR = "NPL_DEFAULT_FIELD"

COMMANDS = ("pit", "hit-check", "audit", "rank", "gen", "ips-verify", "ips-from-cnf")


@dataclass(frozen=True)
class ExperimentPlan:
    command: str
    field: int
    seed: int
    trials: int
    exhaustive: bool
    term_cap: int
    enum_budget: int
    jobs: int
    out: Optional[str]
    pretty: bool
    inputs: Tuple[Tuple[str, object], ...] = ()

    def input(self, key: str, default=None):
        for k, v in self.inputs:
            if k == key:
                return v
        return default

    def to_json(self) -> dict:
        return {
            "command": self.command,
            "field": self.field,
            "seed": self.seed,
            "trials": self.trials,
            "exhaustive": self.exhaustive,
            "term_cap": self.term_cap,
            "enum_budget": self.enum_budget,
            "jobs": self.jobs,
            "out": self.out,
            "pretty": self.pretty,
            "inputs": {k: v for k, v in self.inputs},
        }


def _add_common(sub: argparse.ArgumentParser, default_field: int) -> None:
    sub.add_argument("--field", type=int, default=default_field,
                     help=f"prime modulus (default {default_field}, or ${FIELD_ENV_VAR})")
    sub.add_argument("--seed", type=int, default=0, help="base seed for all randomness")
    sub.add_argument("--trials", type=int, default=DEFAULT_TRIALS,
                     help=f"randomized trial budget (default {DEFAULT_TRIALS})")
    sub.add_argument("--exhaustive", action="store_true",
                     help="use exhaustive enumeration instead of sampling")
    sub.add_argument("--term-cap", type=int, default=DEFAULT_TERM_CAP,
                     help="monomial cap for symbolic expansion")
    sub.add_argument("--enum-budget", type=int, default=DEFAULT_ENUM_BUDGET,
                     help="point budget for exhaustive enumeration")
    sub.add_argument("--jobs", type=int, default=1,
                     help="worker cap; current engines run single-process")
    sub.add_argument("--out", type=str, default=None, help="also write the report here")
    sub.add_argument("--pretty", action="store_true", help="indent the JSON report")


def build_parser(default_field: int) -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="npl",
        description="Exact polynomial identity testing and coefficient-space experiments.",
    )
    parser.add_argument("--version", action="version", version=f"npl {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("pit", help="identity-test a circuit")
    p.add_argument("--circuit", required=True, help="circuit JSON file")
    _add_common(p, default_field)

    p = sub.add_parser("hit-check", help="search a family for a meta-polynomial witness")
    p.add_argument("--meta", required=True,
                   help="disc | coord:I | partials-minor:k=K,r=R | shifted-minor:k=K,l=L,r=R | file.json")
    p.add_argument("--family", required=True,
                   help="squares | full | detproj:n=K | sps:t=K | sparse:s=K | file.json")
    p.add_argument("--space", required=True, help="DEG:VARS or DEG:VARS:le")
    _add_common(p, default_field)

    p = sub.add_parser("audit", help="separation audit of meta vs family vs hard candidate")
    p.add_argument("--meta", required=True)
    p.add_argument("--family", required=True)
    p.add_argument("--space", required=True, help="DEG:VARS or DEG:VARS:le")
    p.add_argument("--hard", required=True, help="polynomial JSON file")
    _add_common(p, default_field)

    p = sub.add_parser("rank", help="derivative-matrix rank of a polynomial")
    p.add_argument("--poly", required=True, help="polynomial JSON file")
    p.add_argument("--method", choices=("partials", "shifted"), default="partials")
    p.add_argument("--k", type=int, required=True, help="derivative order")
    p.add_argument("--shift", type=int, default=0, help="shift degree (shifted method)")
    p.add_argument("--include-matrix", action="store_true",
                   help="embed the matrix entries in the report")
    _add_common(p, default_field)

    p = sub.add_parser("gen", help="determinant-generator accounting")
    p.add_argument("--n", default="2,3,4,5", help="comma list of matrix sizes")
    p.add_argument("--expand-max", type=int, default=0,
                   help="evaluate one seeded sample for each n up to this bound")
    _add_common(p, default_field)

    p = sub.add_parser("ips-verify", help="verify a geometric certificate")
    p.add_argument("--cert", required=True, help="certificate circuit JSON file")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--cnf", help="DIMACS CNF file, translated on the fly")
    group.add_argument("--system", help="polynomial system JSON file")
    _add_common(p, default_field)

    p = sub.add_parser("ips-from-cnf", help="translate a CNF into a polynomial system")
    p.add_argument("--cnf", required=True, help="DIMACS CNF file")
    p.add_argument("--system-out", default=None,
                   help="also write the bare system JSON here")
    _add_common(p, default_field)

    return parser


_PLAN_INPUT_KEYS = {
    "pit": ("circuit",),
    "hit-check": ("meta", "family", "space"),
    "audit": ("meta", "family", "space", "hard"),
    "rank": ("poly", "method", "k", "shift", "include_matrix"),
    "gen": ("n", "expand_max"),
    "ips-verify": ("cert", "cnf", "system"),
    "ips-from-cnf": ("cnf", "system_out"),
}


def parse_plan(argv: Sequence[str], env: Optional[Mapping[str, str]] = None) -> ExperimentPlan:
    env = os.environ if env is None else env
    raw_default = env.get(FIELD_ENV_VAR)
    default_field = DEFAULT_FIELD
    if raw_default is not None:
        try:
            default_field = int(raw_default)
        except ValueError:
            raise ValueError(f"{FIELD_ENV_VAR} is not an integer: {raw_default!r}")
    parser = build_parser(default_field)
    ns = parser.parse_args(argv)
    PrimeField(ns.field)  # reject composite moduli up front
    inputs = tuple(
        (key, getattr(ns, key)) for key in _PLAN_INPUT_KEYS[ns.command]
    )
    return ExperimentPlan(
        command=ns.command,
        field=ns.field,
        seed=ns.seed,
        trials=ns.trials,
        exhaustive=ns.exhaustive,
        term_cap=ns.term_cap,
        enum_budget=ns.enum_budget,
        jobs=ns.jobs,
        out=ns.out,
        pretty=ns.pretty,
        inputs=inputs,
    )


def _parse_space(text: str) -> PolySpace:
    parts = text.split(":")
    if len(parts) == 2:
        d, v = parts
        return PolySpace(int(v), int(d), True)
    if len(parts) == 3 and parts[2] == "le":
        d, v, _ = parts
        return PolySpace(int(v), int(d), False)
    raise ValueError(f"space spec {text!r} is not DEG:VARS or DEG:VARS:le")


def _parse_kv(text: str) -> Dict[str, int]:
    out: Dict[str, int] = {}
    for part in text.split(","):
        if "=" not in part:
            raise ValueError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = int(v)
    return out


def _load_json(path: str):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _resolve_meta(spec: str, space: PolySpace, field: PrimeField):
    if spec == "disc":
        return discriminant(field)
    if spec.startswith("coord:"):
        return coordinate_meta(space, field, int(spec.split(":", 1)[1]))
    if spec.startswith("partials-minor:"):
        kv = _parse_kv(spec.split(":", 1)[1])
        rms = RankMethodSpec(
            method="partials",
            k=kv["k"],
            shift=0,
            minor=MinorSelection(kind="leading", size=kv["r"] + 1),
        )
        return minor_meta(rms, space, field)
    if spec.startswith("shifted-minor:"):
        kv = _parse_kv(spec.split(":", 1)[1])
        rms = RankMethodSpec(
            method="shifted",
            k=kv["k"],
            shift=kv["l"],
            minor=MinorSelection(kind="leading", size=kv["r"] + 1),
        )
        return minor_meta(rms, space, field)
    if spec.endswith(".json"):
        data = _load_json(spec)
        if "method" in data:
            return minor_meta(RankMethodSpec.from_json(data), space, field)
        if "gates" in data:
            return CircuitMeta(space, Circuit.from_json(data))
        raise ValueError(f"meta file {spec!r} is neither a rank spec nor a circuit")
    raise ValueError(f"unknown meta spec {spec!r}")


def _resolve_family(spec: str, space: PolySpace, field: PrimeField) -> FamilyDescriptor:
    if spec == "squares":
        return FamilyDescriptor("squares", space, field)
    if spec == "full":
        return FamilyDescriptor("full-space", space, field)
    if spec.startswith("detproj:"):
        kv = _parse_kv(spec.split(":", 1)[1])
        return FamilyDescriptor("det-projection", space, field, n=kv["n"])
    if spec.startswith("sps:"):
        kv = _parse_kv(spec.split(":", 1)[1])
        return FamilyDescriptor("sps", space, field, top_fanin=kv["t"])
    if spec.startswith("sparse:"):
        kv = _parse_kv(spec.split(":", 1)[1])
        return FamilyDescriptor("sparse", space, field, sparsity=kv["s"])
    if spec.endswith(".json"):
        return FamilyDescriptor.from_json(_load_json(spec))
    raise ValueError(f"unknown family spec {spec!r}")


def _run_pit(plan: ExperimentPlan) -> Tuple[dict, int]:
    circuit = Circuit.from_json(_load_json(plan.input("circuit")))
    if circuit.field.p != plan.field:
        raise ValueError(
            f"circuit field {circuit.field.p} differs from plan field {plan.field}"
        )
    if plan.exhaustive:
        verdict = pit_exhaustive(circuit, enum_budget=plan.enum_budget)
    else:
        verdict = pit_schwartz_zippel(circuit, trials=plan.trials, seed=plan.seed)
    code = 1 if verdict.outcome == "proven-nonzero" else 0
    return {"verdict": verdict.to_json()}, code


def _run_hit_check(plan: ExperimentPlan) -> Tuple[dict, int]:
    field = PrimeField(plan.field)
    space = _parse_space(plan.input("space"))
    T = _resolve_meta(plan.input("meta"), space, field)
    desc = _resolve_family(plan.input("family"), space, field)
    report = succinct_hitting_check(
        desc,
        T,
        trials=None if plan.exhaustive else plan.trials,
        exhaustive=plan.exhaustive,
        seed=plan.seed,
        enum_budget=plan.enum_budget,
    )
    code = 1 if report.outcome == "witness" else 0
    return {"hit_report": report.to_json()}, code


def _run_audit(plan: ExperimentPlan) -> Tuple[dict, int]:
    field = PrimeField(plan.field)
    space = _parse_space(plan.input("space"))
    T = _resolve_meta(plan.input("meta"), space, field)
    desc = _resolve_family(plan.input("family"), space, field)
    hard = SparsePoly.from_json(_load_json(plan.input("hard")))
    if hard.field.p != plan.field:
        raise ValueError(
            f"hard polynomial field {hard.field.p} differs from plan field {plan.field}"
        )
    report = natural_proof_audit(
        T,
        desc,
        hard,
        trials=None if plan.exhaustive else plan.trials,
        exhaustive=plan.exhaustive,
        seed=plan.seed,
        enum_budget=plan.enum_budget,
    )
    code = 1 if report.classification == "refuted" else 0
    return {"audit": report.to_json()}, code


def _run_rank(plan: ExperimentPlan) -> Tuple[dict, int]:
    poly = SparsePoly.from_json(_load_json(plan.input("poly")))
    if poly.field.p != plan.field:
        raise ValueError(
            f"polynomial field {poly.field.p} differs from plan field {plan.field}"
        )
    k = plan.input("k")
    if plan.input("method") == "shifted":
        matrix = shifted_partials_matrix(poly, k, plan.input("shift"))
    else:
        matrix = partials_matrix(poly, k)
    rank = rank_mod_p(matrix)
    result = {
        "rank": rank,
        "shape": list(matrix.shape),
        "method": plan.input("method"),
        "k": k,
        "shift": plan.input("shift") if plan.input("method") == "shifted" else 0,
    }
    if plan.input("include_matrix"):
        result["matrix"] = [list(row) for row in matrix.entries]
    return result, 0


def _run_gen(plan: ExperimentPlan) -> Tuple[dict, int]:
    field = PrimeField(plan.field)
    sizes = [int(x) for x in str(plan.input("n")).split(",") if x.strip()]
    expand_max = plan.input("expand_max")
    rows = []
    for n in sizes:
        gen = det_coeff_generator(n, field)
        row: dict = {"n": n, "seed_length": gen.s, "dimension": gen.space.dimension}
        if n <= expand_max:
            rng = random.Random(plan.seed)
            seed_vals = [rng.randrange(field.p) for _ in range(gen.s)]
            cv = gen.evaluate(seed_vals)
            row["sample_nonzero_coords"] = sum(1 for c in cv if c)
        rows.append(row)
    return {"generators": rows}, 0


def _run_ips_verify(plan: ExperimentPlan) -> Tuple[dict, int]:
    field = PrimeField(plan.field)
    if plan.input("cnf") is not None:
        with open(plan.input("cnf"), "r", encoding="utf-8") as fh:
            system = cnf_to_system(parse_dimacs(fh.read()), field)
    else:
        system = PolynomialSystem.from_json(_load_json(plan.input("system")))
        if system.field.p != plan.field:
            raise ValueError(
                f"system field {system.field.p} differs from plan field {plan.field}"
            )
    cert = GeometricCertificate.from_json(_load_json(plan.input("cert")))
    config = PitConfig(
        mode="exhaustive" if plan.exhaustive else "schwartz-zippel",
        trials=plan.trials,
        seed=plan.seed,
        enum_budget=plan.enum_budget,
    )
    report = verify_certificate(system, cert, config)
    return {"verification": report.to_json()}, 0 if report.accepted else 1


def _run_ips_from_cnf(plan: ExperimentPlan) -> Tuple[dict, int]:
    field = PrimeField(plan.field)
    with open(plan.input("cnf"), "r", encoding="utf-8") as fh:
        cnf = parse_dimacs(fh.read())
    system = cnf_to_system(cnf, field)
    doc = system.to_json()
    if plan.input("system_out"):
        with open(plan.input("system_out"), "w", encoding="utf-8") as fh:
            json.dump(doc, fh, sort_keys=True, separators=(",", ":"))
            fh.write("\n")
    return {
        "system": doc,
        "num_vars": cnf.num_vars,
        "num_clauses": len(cnf.clauses),
        "num_members": len(system.members),
    }, 0


_RUNNERS = {
    "pit": _run_pit,
    "hit-check": _run_hit_check,
    "audit": _run_audit,
    "rank": _run_rank,
    "gen": _run_gen,
    "ips-verify": _run_ips_verify,
    "ips-from-cnf": _run_ips_from_cnf,
}


def execute_plan(plan: ExperimentPlan) -> Tuple[dict, int]:
    result, code = _RUNNERS[plan.command](plan)
    body = {"plan": plan.to_json(), "version": __version__, "result": result}
    return body, code


def render_report(body: dict, wall_clock_ms: float, pretty: bool) -> str:
    doc = {"header": {"wall_clock_ms": round(wall_clock_ms, 3)}, "body": body}
    if pretty:
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    if argv is None:
        argv = sys.argv[1:]
    start = time.perf_counter()
    try:
        plan = parse_plan(argv)
        body, code = execute_plan(plan)
    except SystemExit as exc:
        # argparse usage failures (including --help, which exits 0)
        return int(exc.code or 0)
    except (NplError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        print(f"npl: error: {exc}", file=sys.stderr)
        return 2
    wall_ms = (time.perf_counter() - start) * 1000.0
    text = render_report(body, wall_ms, plan.pretty)
    sys.stdout.write(text)
    if plan.out:
        try:
            with open(plan.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"npl: error: {exc}", file=sys.stderr)
            return 2
    return code


if __name__ == "__main__":
    sys.exit(main())
