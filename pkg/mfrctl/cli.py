"""
mfrctl CLI — Minimal Free Resolutions of Function-Rips Persistence

Commands:
    mfrctl compute --input F [--dim D] [options]   — resolutions → stdout / --output
    mfrctl verify  --input F | --seeds K --n N      — both routes + brute-force oracle
    mfrctl hilbert --input F --dim D [--box ...]    — Hilbert grid → stdout
    mfrctl gen     --shape S --n N --out F          — sample a dataset
    mfrctl bench   --input F... --csv F             — per-stage timings and counters

Environment variables:
    MFRCTL_THREADS  Thread pool size for minimize/factorize (default: 1)
    MFRCTL_COLUMNS  Column store: heap|vector (default: heap)
    MFRCTL_CONFIG   Path to a JSON config file

Precedence (invariant):
    CLI --flag  >  MFRCTL_* env var  >  config file  >  compiled default

Exit codes:
    0  Success
    1  Operational error (bad args, parse error, computation error, verify mismatch)
    2  Internal failure (unexpected exception)
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Dict, List, Optional, Sequence

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# Defensive env parsing (never crash on bad export)
# ---------------------------------------------------------------------------


def _env_int(name: str, default: Optional[int]) -> Optional[int]:
    """Parse integer env var with fallback. Never raises on bad input."""
    v = os.environ.get(name)
    if not v:
        return default
    try:
        return int(v)
    except ValueError:
        return default


def _env_str(name: str, default: Optional[str]) -> Optional[str]:
    """Parse string env var with fallback."""
    return os.environ.get(name) or default


# ---------------------------------------------------------------------------
# Stderr helpers (respect --quiet)
# ---------------------------------------------------------------------------

_quiet = False


def _info(msg: str) -> None:
    """Print progress to stderr (suppressed by --quiet)."""
    if not _quiet:
        print(msg, file=sys.stderr)


def _warn(msg: str) -> None:
    """Print warning to stderr (always visible)."""
    print(msg, file=sys.stderr)


# ---------------------------------------------------------------------------
# Resolvers
# ---------------------------------------------------------------------------


def _resolve_compute(args: argparse.Namespace):
    """Pipeline options: CLI flag > MFRCTL_* env > config file > default."""
    from mfrctl.config import ValidationError
    from mfrctl.types import VALID_BACKENDS

    cfg = args._config.compute
    threads = _env_int("MFRCTL_THREADS", None)
    if threads is not None and threads >= 1:
        cfg = replace(cfg, threads=threads)
    columns = _env_str("MFRCTL_COLUMNS", None)
    if columns in VALID_BACKENDS:
        cfg = replace(cfg, columns=columns)

    overrides = {}
    for name in ("algorithm", "chunk", "columns", "cone", "max_dim", "threads",
                 "phase_order", "clearing", "sparsify", "minimize", "reduced"):
        value = getattr(args, name, None)
        if value is not None:
            overrides[name] = value
    cfg = replace(cfg, **overrides)

    errors = cfg.validate()
    if errors:
        raise ValidationError("; ".join(errors))
    cpus = os.cpu_count() or 1
    if cfg.threads > cpus:
        logger.warning("thread count %d capped to %d", cfg.threads, cpus)
        cfg = replace(cfg, threads=cpus)
    if cfg.algorithm == "cohomology" and cfg.cone == "none":
        _warn("[warn] the cohomology route needs homology that vanishes far out; "
              "without --cone the run fails unless that already holds")
    return cfg


def _degrees(args: argparse.Namespace, cfg) -> List[int]:
    """Degrees to compute; --max-dim follows --dim unless given explicitly."""
    from mfrctl.config import ValidationError

    dim = getattr(args, "dim", None)
    if dim is None:
        return list(range(0, cfg.max_dim + 1))
    if dim < 0:
        raise ValidationError(f"--dim must be >= 0, got {dim}")
    if getattr(args, "max_dim", None) is not None and args.max_dim < dim:
        raise ValidationError(f"--max-dim {args.max_dim} is below --dim {dim}")
    return [dim]


def _top_degree(args: argparse.Namespace, cfg) -> int:
    if getattr(args, "max_dim", None) is not None:
        return cfg.max_dim
    dim = getattr(args, "dim", None)
    return dim if dim is not None else cfg.max_dim


def _load(path: str, args: argparse.Namespace):
    from mfrctl.dataset import parse_input
    return parse_input(path, discretize=getattr(args, "discretize", None))


def _prepare(dataset, cfg, top: int, stats=None):
    from mfrctl.pipelines import prepare_complex
    return prepare_complex(
        dataset.distances, dataset.values, max_dim=top, reduced=cfg.reduced,
        cone=cfg.cone, backend=cfg.columns, stats=stats,
    )


def _run(C, degrees: Sequence[int], cfg, stats=None, algorithm: Optional[str] = None):
    from mfrctl.pipelines import run
    if algorithm:
        cfg = replace(cfg, algorithm=algorithm)
    return run(
        C, degrees, algorithm=cfg.algorithm, chunk=cfg.chunk_mode(),
        clearing=cfg.clearing, sparsify_output=cfg.sparsify, minimize=cfg.minimize,
        phase_order=cfg.phase_order, backend=cfg.columns, n_jobs=cfg.threads, stats=stats,
    )


def _summary(R, minimal: bool) -> Dict[str, object]:
    from mfrctl.resolution import betti
    if minimal:
        return {"degree": R.degree, "betti": betti(R).to_dict()}
    return {"degree": R.degree, "ranks": list(R.ranks)}


# ===========================================================================
# Command: compute
# ===========================================================================


def cmd_compute(args: argparse.Namespace) -> None:
    """Compute minimal free resolutions of an input file."""
    from mfrctl.export_import import write_resolution, write_stats
    from mfrctl.resolution import betti
    from mfrctl.types import RunStats

    cfg = _resolve_compute(args)
    degrees = _degrees(args, cfg)
    top = _top_degree(args, cfg)
    stats = RunStats(input=args.input)

    dataset = _load(args.input, args)
    _info(f"[compute] {dataset.n} points, degrees {degrees}, {cfg.algorithm}")
    C = _prepare(dataset, cfg, top, stats)
    results = _run(C, degrees, cfg, stats)

    if args.output:
        write_resolution([results[d] for d in degrees], args.output)
        _info(f"[compute] wrote {args.output}")
    if args.stats:
        write_stats([stats], args.stats)

    if getattr(args, "json", False):
        payload = {
            "input": args.input,
            "algorithm": cfg.algorithm,
            "resolutions": [_summary(results[d], cfg.minimize) for d in degrees],
        }
        print(json.dumps(payload, indent=2))
        return
    for d in degrees:
        R = results[d]
        if cfg.minimize:
            print(f"H{d}: {betti(R).summary()}")
        else:
            print("H{}: F0={} F1={} F2={}".format(d, *R.ranks))


# ===========================================================================
# Command: verify
# ===========================================================================


def _verify_one(name: str, dataset, cfg, top: int) -> List[str]:
    from mfrctl.pipelines import hilbert_oracle
    from mfrctl.resolution import betti, grade_box, hilbert_from_resolution

    C = _prepare(dataset, cfg, top)
    degrees = list(range(0, top + 1))
    box = grade_box(C.all_grades(), margin=1)
    via_cohomology = _run(C, degrees, cfg, algorithm="cohomology")
    via_homology = _run(C, degrees, cfg, algorithm="homology")
    problems: List[str] = []
    for d in degrees:
        bc, bh = betti(via_cohomology[d]), betti(via_homology[d])
        if bc != bh:
            problems.append(f"{name} H{d}: Betti diagrams differ ({bc.summary()} vs {bh.summary()})")
        oracle = hilbert_oracle(C, d, box)
        for label, R in (("cohomology", via_cohomology[d]), ("homology", via_homology[d])):
            bad = oracle.mismatches(hilbert_from_resolution(R, box))
            if bad:
                problems.append(f"{name} H{d}: {label} Hilbert function differs at {bad[0]}")
    return problems


def cmd_verify(args: argparse.Namespace) -> None:
    """Cross-check both pipelines against each other and the rank oracle."""
    from mfrctl.config import ValidationError
    from mfrctl.dataset import generate_dataset

    cfg = _resolve_compute(args)
    cfg = replace(cfg, minimize=True)
    top = args.dim if args.dim is not None else cfg.max_dim

    if args.input:
        cases = [(args.input, _load(args.input, args))]
    elif args.seeds:
        gen = args._config.generate
        n = args.n or gen.n
        shape = args.shape or gen.shape
        cases = [(f"{shape}/seed={s}", generate_dataset(shape, n, gen.sigma, s))
                 for s in range(args.seeds)]
    else:
        raise ValidationError("verify needs --input or --seeds")

    problems: List[str] = []
    for name, dataset in cases:
        found = _verify_one(name, dataset, cfg, top)
        _info(f"[verify] {name}: {'ok' if not found else 'MISMATCH'}")
        problems.extend(found)

    if getattr(args, "json", False):
        print(json.dumps({"cases": len(cases), "problems": problems}, indent=2))
    for p in problems:
        _warn(p)
    if problems:
        sys.exit(1)
    if not getattr(args, "json", False):
        print(f"verified {len(cases)} instance(s), degrees 0..{top}")


# ===========================================================================
# Command: hilbert
# ===========================================================================


def cmd_hilbert(args: argparse.Namespace) -> None:
    """Print the Hilbert function of H_d on a box."""
    from mfrctl.pipelines import hilbert_oracle
    from mfrctl.resolution import grade_box, hilbert_from_resolution

    cfg = _resolve_compute(args)
    dataset = _load(args.input, args)
    top = max(args.dim, cfg.max_dim) if args.max_dim is not None else args.dim
    C = _prepare(dataset, cfg, top)
    box = tuple(args.box) if args.box else grade_box(C.all_grades(), margin=1)
    if args.oracle:
        grid = hilbert_oracle(C, args.dim, box)
    else:
        grid = hilbert_from_resolution(_run(C, [args.dim], cfg)[args.dim], box)

    if getattr(args, "json", False):
        print(json.dumps({"degree": args.dim, "box": list(grid.box),
                          "values": grid.values.tolist()}, indent=2))
        return
    print(grid.render())


# ===========================================================================
# Command: gen
# ===========================================================================


def cmd_gen(args: argparse.Namespace) -> None:
    """Sample a shape and write it in the input format."""
    from mfrctl.config import GenerateConfig, ValidationError
    from mfrctl.dataset import generate_dataset, write_dataset

    base = args._config.generate
    gen = GenerateConfig(
        shape=args.shape or base.shape,
        n=args.n if args.n is not None else base.n,
        sigma=args.sigma if args.sigma is not None else base.sigma,
        seed=args.seed if args.seed is not None else base.seed,
    )
    errors = gen.validate()
    if errors:
        raise ValidationError("; ".join(errors))
    dataset = generate_dataset(gen.shape, gen.n, gen.sigma, gen.seed)
    write_dataset(dataset, args.out)
    _info(f"[gen] {gen.shape} n={gen.n} sigma={gen.sigma} seed={gen.seed} -> {args.out}")


# ===========================================================================
# Command: bench
# ===========================================================================


def cmd_bench(args: argparse.Namespace) -> None:
    """Run both algorithms on every input and record one CSV row per run."""
    from mfrctl.config import ValidationError
    from mfrctl.export_import import write_stats
    from mfrctl.types import RunStats

    cfg = _resolve_compute(args)
    bench = args._config.bench
    repeats = args.repeats if args.repeats is not None else bench.repeats
    if repeats < 1:
        raise ValidationError(f"--repeats must be >= 1, got {repeats}")
    algorithms = [args.algorithm] if args.algorithm else list(bench.algorithms)
    degrees = _degrees(args, cfg)
    top = _top_degree(args, cfg)

    rows: List[RunStats] = []
    for path in args.input:
        dataset = _load(path, args)
        for algorithm in algorithms:
            for _ in range(repeats):
                stats = RunStats(input=path)
                C = _prepare(dataset, cfg, top, stats)
                _run(C, degrees, cfg, stats, algorithm=algorithm)
                rows.append(stats)
                _info(f"[bench] {Path(path).name} {algorithm}: {stats.total_s:.3f}s "
                      f"({stats.phase1_additions}+{stats.phase2_additions} additions)")
    write_stats(rows, args.csv)
    if getattr(args, "json", False):
        print(json.dumps([r.to_dict() for r in rows], indent=2))
    else:
        print(f"{len(rows)} run(s) written to {args.csv}")


# ===========================================================================
# Parser
# ===========================================================================


def _add_compute_arguments(p: argparse.ArgumentParser) -> None:
    """Pipeline flags; None means 'not given on the command line'."""
    p.add_argument("--dim", type=int, default=None, help="Homology degree (default: 0..max-dim)")
    p.add_argument("--max-dim", type=int, default=None,
                   help="Top degree built into the complex (default: --dim, else 1)")
    p.add_argument("--algorithm", choices=["cohomology", "homology"], default=None,
                   help="Resolution route (default: cohomology)")
    p.add_argument("--chunk", choices=["none", "chain", "cochain"], default=None,
                   help="Chunk preprocessing (default: none for cohomology, chain for homology)")
    p.add_argument("--columns", choices=["heap", "vector"], default=None,
                   help="Column store (default: MFRCTL_COLUMNS or heap)")
    p.add_argument("--no-clearing", dest="clearing", action="store_const", const=False,
                   default=None, help="Disable clearing between degrees")
    p.add_argument("--no-sparsify", dest="sparsify", action="store_const", const=False,
                   default=None, help="Disable row sparsification")
    p.add_argument("--no-minimize", dest="minimize", action="store_const", const=False,
                   default=None, help="Skip the final minimization")
    p.add_argument("--cone", choices=["x", "y", "none"], default=None,
                   help="Cone off along an axis (default: x)")
    p.add_argument("--reduced", dest="reduced", action="store_const", const=True, default=None,
                   help="Reduced homology (default)")
    p.add_argument("--unreduced", dest="reduced", action="store_const", const=False,
                   help="Unreduced homology")
    p.add_argument("--threads", type=int, default=None,
                   help="Thread pool size (default: MFRCTL_THREADS or 1)")
    p.add_argument("--phase-order", choices=["colex-lex", "lex-colex"], default=None,
                   help="Bireduce phase order (default: colex-lex)")
    p.add_argument("--discretize", default=None,
                   help="Accept real values: rank_desc, rank_asc or scale:Q")


def _build_parser() -> argparse.ArgumentParser:
    # SUPPRESS defaults keep subparser defaults from overriding values
    # parsed at the main-parser level.
    _common = argparse.ArgumentParser(add_help=False)
    _common.add_argument(
        "--quiet", "-q", action="store_true", default=argparse.SUPPRESS,
        help="Suppress stderr progress messages",
    )
    _common.add_argument(
        "--json", action="store_true", default=argparse.SUPPRESS,
        help="Machine-readable JSON output",
    )
    _common.add_argument(
        "-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
        help="Enable verbose logging",
    )
    _common.add_argument(
        "--config", default=argparse.SUPPRESS,
        help="Path to config.json (default: MFRCTL_CONFIG)",
    )

    parser = argparse.ArgumentParser(
        prog="mfrctl",
        description="mfrctl — minimal free resolutions of function-Rips persistent homology",
        parents=[_common],
    )
    from mfrctl import __version__
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}",
    )

    sub = parser.add_subparsers(dest="command", help="Available commands")

    # -- compute -----------------------------------------------------------
    p_compute = sub.add_parser("compute", parents=[_common], help="Compute resolutions")
    p_compute.add_argument("--input", required=True, help="Input dataset file")
    _add_compute_arguments(p_compute)
    p_compute.add_argument("--output", default=None, help="Write resolutions to this file")
    p_compute.add_argument("--stats", default=None, help="Append a stats row to this CSV")
    p_compute.set_defaults(func=cmd_compute)

    # -- verify ------------------------------------------------------------
    p_verify = sub.add_parser("verify", parents=[_common],
                              help="Cross-check both routes and the rank oracle")
    p_verify.add_argument("--input", default=None, help="Input dataset file")
    p_verify.add_argument("--seeds", type=int, default=None,
                          help="Verify K generated instances (seeds 0..K-1)")
    p_verify.add_argument("--n", type=int, default=None, help="Points per generated instance")
    p_verify.add_argument("--shape", choices=["circle", "sphere", "torus", "o3", "random"],
                          default=None, help="Shape of generated instances")
    _add_compute_arguments(p_verify)
    p_verify.set_defaults(func=cmd_verify)

    # -- hilbert -----------------------------------------------------------
    p_hilbert = sub.add_parser("hilbert", parents=[_common], help="Print a Hilbert grid")
    p_hilbert.add_argument("--input", required=True, help="Input dataset file")
    _add_compute_arguments(p_hilbert)
    p_hilbert.set_defaults(dim=0)
    p_hilbert.add_argument("--box", type=int, nargs=4, metavar=("X0", "Y0", "X1", "Y1"),
                           default=None, help="Grade box (default: complex bounds + 1)")
    p_hilbert.add_argument("--oracle", action="store_true",
                           help="Brute-force ranks instead of the resolution")
    p_hilbert.set_defaults(func=cmd_hilbert)

    # -- gen ---------------------------------------------------------------
    p_gen = sub.add_parser("gen", parents=[_common], help="Generate a sampled dataset")
    p_gen.add_argument("--shape", choices=["circle", "sphere", "torus", "o3", "random"],
                       default=None, help="Shape to sample (default: circle)")
    p_gen.add_argument("--n", type=int, default=None, help="Number of points (default: 50)")
    p_gen.add_argument("--sigma", type=float, default=None,
                       help="Gaussian density bandwidth (default: 0.15)")
    p_gen.add_argument("--seed", type=int, default=None, help="Random seed (default: 0)")
    p_gen.add_argument("--out", required=True, help="Output dataset file")
    p_gen.set_defaults(func=cmd_gen)

    # -- bench -------------------------------------------------------------
    p_bench = sub.add_parser("bench", parents=[_common], help="Benchmark both routes")
    p_bench.add_argument("--input", nargs="+", required=True, help="Input dataset files")
    p_bench.add_argument("--csv", required=True, help="Stats CSV to append to")
    p_bench.add_argument("--repeats", type=int, default=None, help="Runs per configuration")
    _add_compute_arguments(p_bench)
    p_bench.set_defaults(func=cmd_bench)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> None:
    """CLI entry point: mfrctl <command> [args]."""
    global _quiet

    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        # usage errors are operational (1), --help / --version stay 0
        sys.exit(1 if e.code else 0)

    _quiet = getattr(args, "quiet", False)

    if getattr(args, "verbose", False):
        logging.basicConfig(
            level=logging.DEBUG,
            format="%(name)s %(levelname)s %(message)s",
        )
    else:
        logging.basicConfig(level=logging.WARNING)

    from mfrctl.config import ValidationError, load_config
    from mfrctl.types import MfrError

    config_path = getattr(args, "config", None) or _env_str("MFRCTL_CONFIG", None)
    args._config = load_config(config_path)

    if not args.command:
        parser.print_help()
        sys.exit(1)

    try:
        args.func(args)
    except BrokenPipeError:
        # Handle broken pipe gracefully (e.g. mfrctl hilbert | head)
        devnull = os.open(os.devnull, os.O_WRONLY)
        os.dup2(devnull, sys.stdout.fileno())
        sys.exit(0)
    except KeyboardInterrupt:
        sys.exit(0)
    except (MfrError, ValidationError, FileNotFoundError) as e:
        _warn(f"Error: {e}")
        sys.exit(1)
    except Exception as e:
        _warn(f"Internal error: {e}")
        if getattr(args, "verbose", False):
            import traceback
            traceback.print_exc(file=sys.stderr)
        sys.exit(2)


if __name__ == "__main__":
    main()
