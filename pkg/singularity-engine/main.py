import argparse
import json
import os
import sys

from config.settings import DEFAULT_SEED, OUT_DIR, GridConfig
from core.console import error, info
from core.errors import ConfigError, SpecValidation
from reports.export import export_csv, export_json
from reports.registry import ExperimentSpec, run, run_many
from reports.suites import SUITES, suite

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_SPEC_ERROR = 2

DOMAINS = ("Ball", "HalfDisk")


# =====================================================
# ARGUMENTS
# =====================================================

def parse_args(argv=None):
    p = argparse.ArgumentParser(description="Numerical lab for -Δu + g(|∇u|) = 0 with measure boundary data")
    p.add_argument("--out", default=OUT_DIR, help="Output root for artifacts, registry and logs")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED, help="Seed for randomized probes")
    p.add_argument("--grid", default=None, help="Solver grid as n_r,n_theta")
    p.add_argument("--tol", type=float, default=None, help="Relative update tolerance of the solvers")
    p.add_argument("--name", default=None, help="Run name (default: command + spec hash)")

    sub = p.add_subparsers(dest="command", required=True)

    c = sub.add_parser("constants", help="Derived exponents and closed-form constants")
    c.add_argument("--N", type=int, default=2)
    c.add_argument("--q", type=float, default=1.25)

    pr = sub.add_parser("profile", help="Shoot the separable profile on the hemisphere")
    pr.add_argument("--N", type=int, default=2)
    pr.add_argument("--q", type=float, default=1.3)

    s = sub.add_parser("solve", help="Dirichlet or interior solve")
    s.add_argument("--domain", choices=DOMAINS, default="Ball")
    s.add_argument("--q", type=float, default=1.25, help="Power law exponent (0 for g = 0)")
    s.add_argument("--mass", type=float, default=None, help="Atom mass at the anchor (or centre with --interior)")
    s.add_argument("--density", choices=["constant", "cosine", "cos2"], default=None)
    s.add_argument("--backend", choices=["fd", "picard"], default="fd")
    s.add_argument("--interior", action="store_true", help="Interior atom instead of boundary data")

    t = sub.add_parser("trace", help="Boundary trace of a solve or of the separable field")
    t.add_argument("--q", type=float, default=1.25)
    t.add_argument("--separable", action="store_true", help="Use the separable field on a HalfDisk")
    t.add_argument("--mass", type=float, default=None)
    t.add_argument("--density", choices=["constant", "cosine", "cos2"], default="cosine")
    t.add_argument("--probes", type=int, default=16)

    g = sub.add_parser("singularity", help="Isolated singularity classification and mass sweeps")
    g.add_argument("--mode", choices=["classify", "separable", "increasing-mass"], default="classify")
    g.add_argument("--q", type=float, default=1.25)
    g.add_argument("--mass", type=float, default=1.0)
    g.add_argument("--masses", default="1,4,16,64")

    r = sub.add_parser("removability", help="Collapse sweeps, capacity criteria and the energy identity")
    r.add_argument("--mode", choices=["collapse", "capacity", "identity"], default="collapse")
    r.add_argument("--q", type=float, default=1.6)
    r.add_argument("--N", type=int, default=2)
    r.add_argument("--c", type=float, default=1.0)
    r.add_argument("--widths", default="1.6,0.8,0.4,0.2")
    r.add_argument("--family", choices=["boundary", "interior"], default="boundary")

    v = sub.add_parser("verify", help="Acceptance suites")
    v.add_argument("suite", nargs="?", choices=SUITES, default="all")
    v.add_argument("--quick", action="store_true", help="Smaller grids and sweeps")

    rn = sub.add_parser("run", help="Run experiment spec files")
    rn.add_argument("specs", nargs="+", help="Spec JSON files")
    rn.add_argument("--jobs", type=int, default=None)

    return p.parse_args(argv)


def _floats(text: str) -> list:
    try:
        return [float(part) for part in text.split(",")]
    except ValueError as exc:
        raise ConfigError(f"[ERROR] expected comma-separated numbers, got {text!r}") from exc


def _solver_block(args, **overrides) -> dict:
    block = dict(overrides)
    if args.grid:
        block["grid"] = GridConfig.parse(args.grid).to_json()
    if args.tol is not None:
        block["tol_update"] = args.tol
    return block


def _law_block(q: float) -> dict:
    if q == 0:
        return {"kind": "Custom", "s": [0.0, 1.0], "g": [0.0, 0.0]}
    return {"kind": "Power", "q": q}


def _data_block(mass, density) -> dict:
    block = {}
    if mass is not None:
        block["atoms"] = [{"point": None, "mass": mass}]
    if density is not None:
        block["density"] = {"kind": density}
    return block


# =====================================================
# SUBCOMMAND -> SPEC
# =====================================================

def build_spec(args) -> ExperimentSpec:
    if args.command == "constants":
        target, params = "exponents", {"N": args.N, "q": args.q}

    elif args.command == "profile":
        target, params = "solve_profile", {"N": args.N, "q": args.q}

    elif args.command == "solve":
        domain = {"kind": args.domain, "N": 2, "R": 1.0}
        solver = _solver_block(args, backend=args.backend)
        if args.interior:
            target = "solve_interior"
            data = {"atoms": [{"point": None, "mass": 1.0 if args.mass is None else args.mass}]}
        else:
            target = "solve_dirichlet"
            data = _data_block(args.mass, args.density or ("constant" if args.mass is None else None))
        params = {"domain": domain, "law": _law_block(args.q), "data": data, "solver": solver}

    elif args.command == "trace":
        target = "classify_boundary"
        if args.separable:
            params = {"separable": {"q": args.q}, "n_probes": args.probes}
            if args.grid:
                params["separable"]["grid"] = GridConfig.parse(args.grid).to_json()
        else:
            params = {"law": _law_block(args.q), "data": _data_block(args.mass, args.density),
                      "solver": _solver_block(args), "n_probes": args.probes}

    elif args.command == "singularity":
        if args.mode == "increasing-mass":
            target = "increasing_mass"
            params = {"domain": {"kind": "HalfDisk", "N": 2, "R": 1.0}, "q": args.q,
                      "masses": _floats(args.masses), "solver": _solver_block(args)}
        elif args.mode == "separable":
            target = "classify_isolated"
            params = {"separable": {"q": args.q}}
        else:
            target = "classify_isolated"
            params = {"domain": {"kind": "HalfDisk", "N": 2, "R": 1.0}, "law": _law_block(args.q),
                      "data": _data_block(args.mass, None), "solver": _solver_block(args)}

    elif args.command == "removability":
        if args.mode == "capacity":
            target, params = "capacity", {"N": args.N, "q": args.q, "family": args.family}
        elif args.mode == "identity":
            target, params = "removability_identity", {"q": args.q, "solver": _solver_block(args)}
        else:
            target = "dirac_collapse"
            params = {"q": args.q, "c": args.c, "widths": _floats(args.widths),
                      "solver": _solver_block(args, strict=False)}

    else:
        raise ConfigError(f"[ERROR] no spec for command {args.command!r}")

    spec = ExperimentSpec(name="pending", target=target, params=params, out_dir=args.out, seed=args.seed)
    spec.name = args.name or f"{args.command}-{spec.spec_hash[:12]}"
    return spec


# =====================================================
# COMMANDS
# =====================================================

def verify(args) -> int:
    report = suite(args.suite, quick=args.quick)
    print(report.table())

    out = os.path.join(args.out, "suites")
    export_json(report.to_json(), os.path.join(out, f"{args.suite}.json"), f"acceptance suite {args.suite}")
    export_csv(report.to_frame(), os.path.join(out, f"{args.suite}.csv"), f"acceptance suite {args.suite}")

    print(f"\n⏱️ Suite {args.suite}: {'PASS' if report.passed else 'FAIL'} in {report.seconds:.1f}s")
    return EXIT_OK if report.passed else EXIT_FAILURE


def run_specs(args) -> int:
    specs = []
    for path in args.specs:
        spec = ExperimentSpec.from_file(path)
        if spec.out_dir == OUT_DIR and args.out != OUT_DIR:
            spec.out_dir = args.out
        specs.append(spec)

    records = run_many(specs, args.jobs)
    for record in records:
        print(f"  {record.name}: {record.status} ({record.target}) {record.message}")
    return EXIT_OK if all(record.ok for record in records) else EXIT_FAILURE


def main(argv=None) -> int:
    """
    Entry point of the singularity engine.
    Every subcommand except verify becomes one registered experiment.
    """

    print("\n🚀 Starting Singularity Engine")

    try:
        args = parse_args(argv)

        # =====================================================
        # 1️⃣ Acceptance suites
        # =====================================================
        if args.command == "verify":
            return verify(args)

        # =====================================================
        # 2️⃣ Spec files
        # =====================================================
        if args.command == "run":
            return run_specs(args)

        # =====================================================
        # 3️⃣ Single experiment
        # =====================================================
        record = run(build_spec(args))
        print(json.dumps(record.summary, indent=4))
        info(f"artifacts: {len(record.artifacts)} files under {args.out}")
        return EXIT_OK if record.ok else EXIT_FAILURE

    except (SpecValidation, ConfigError) as e:
        error(str(e).removeprefix("[ERROR] "))
        return EXIT_SPEC_ERROR


if __name__ == "__main__":
    sys.exit(main())
