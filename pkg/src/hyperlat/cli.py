"""Command-line pipeline: build lattices, analyze codes, run simulations.

Exit codes: 1 usage, 2 input validation, 3 mathematical invariant
failure, 4 runtime/simulation failure.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from importlib import metadata
from pathlib import Path

from . import css, cycles, decoder, errors, fuchsian, lattice, montecarlo

USAGE_EXIT = 1
VALIDATION_EXIT = 2
INVARIANT_EXIT = 3
RUNTIME_EXIT = 4

_VALIDATION_ERRORS = (
    errors.ParseError,
    errors.RelatorNotIdentity,
    errors.NotTransitive,
    errors.NotRegular,
    errors.SignatureMismatch,
    errors.IndexOutOfRange,
    errors.NonHyperbolicPattern,
    errors.ConfigInvalid,
)
_INVARIANT_ERRORS = (
    errors.RelatorViolation,
    errors.DistanceMismatch,
    errors.CoverageFailure,
    errors.DegreeViolation,
    errors.NonIntegerCount,
    errors.NotTwoManifold,
    errors.Disconnected,
    errors.BasisIncomplete,
    errors.InvariantViolation,
    errors.PairingDegenerate,
    errors.DimensionMismatch,
)


def _version() -> str:
    try:
        return metadata.version("hyperlat")
    except metadata.PackageNotFoundError:
        return "unknown"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


def _digest(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


def _write_manifest(out_dir: Path, command: str, config: dict, inputs: list[Path], t0: float, extra=None):
    manifest = {
        "command": command,
        "config": config,
        "version": _version(),
        "inputs": {str(p): _digest(p) for p in inputs},
        "duration_seconds": round(time.monotonic() - t0, 3),
    }
    if extra:
        manifest.update(extra)
    (out_dir / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def _parse_pair(text: str, name: str) -> tuple[int, int]:
    parts = text.split(",")
    if len(parts) != 2:
        raise errors.ParseError(f"{name} must look like 'p,q', got {text!r}")
    try:
        return int(parts[0]), int(parts[1])
    except ValueError as exc:
        raise errors.ParseError(f"{name} must be two integers, got {text!r}") from exc


def _load_spec(sig, path: Path):
    spec = fuchsian.load_quotient(path)
    if spec.signature != sig:
        raise errors.SignatureMismatch(
            f"quotient {path} is over {{{spec.signature.p},{spec.signature.q}}}"
        )
    return spec


def _build_graphs(pattern, bravais, quotient_path: Path):
    sig = fuchsian.BravaisSignature.from_pq(*bravais)
    spec = _load_spec(sig, quotient_path)
    gs = fuchsian.build_generators(sig)
    cell = lattice.build_unit_cell(pattern, gs)
    gpbc = lattice.build_periodic_graph(cell, spec)
    return sig, spec, cell, gpbc


def cmd_build(args) -> int:
    t0 = time.monotonic()
    pattern = _parse_pair(args.pattern, "--pattern")
    bravais = _parse_pair(args.bravais, "--bravais")
    quotient = Path(args.quotient)
    out = Path(args.out)
    sig, spec, cell, gpbc = _build_graphs(pattern, bravais, quotient)
    pred = lattice.predicted_counts(pattern, sig, spec.index)
    faces = lattice.trace_faces(gpbc)
    if len(faces) != pred.F:
        raise errors.InvariantViolation(f"traced {len(faces)} faces, predicted {pred.F}")
    out.mkdir(parents=True, exist_ok=True)
    (out / "edges.txt").write_text(lattice.export_edge_list(gpbc))
    (out / "coords.txt").write_text(lattice.export_coordinates(gpbc))
    (out / "lattice.dot").write_text(lattice.export_dot(gpbc))
    report = {
        "pattern": list(pattern),
        "bravais": list(bravais),
        "N": spec.index,
        "V": gpbc.n_vertices,
        "E": gpbc.n_edges,
        "F": len(faces),
        "h": pred.genus,
        "predicted": {"V": pred.V, "E": pred.E, "F": pred.F, "h": pred.genus, "n": pred.n, "k": pred.k},
        "quotient": str(quotient),
    }
    (out / "counts.json").write_text(json.dumps(report, indent=2, sort_keys=True) + "\n")
    _write_manifest(out, "build", report, [quotient], t0)
    print(f"V={gpbc.n_vertices} E={gpbc.n_edges} F={len(faces)} h={pred.genus}")
    return 0


def cmd_analyze(args) -> int:
    t0 = time.monotonic()
    in_dir = Path(args.in_dir)
    counts_file = in_dir / "counts.json"
    if not counts_file.exists():
        raise errors.ParseError(f"{in_dir} does not contain counts.json (run build first)")
    meta = json.loads(counts_file.read_text())
    pattern = tuple(meta["pattern"])
    bravais = tuple(meta["bravais"])
    quotient = Path(meta["quotient"])
    sig, spec, cell, gpbc = _build_graphs(pattern, bravais, quotient)
    stored = (in_dir / "edges.txt").read_text()
    if stored != lattice.export_edge_list(gpbc):
        raise errors.InvariantViolation("stored edge list does not match the rebuilt lattice")
    pred = lattice.predicted_counts(pattern, sig, spec.index)
    open_graph = lattice.build_open_graph(cell, fuchsian.transversal_words(spec))
    hcb = cycles.hyperbolic_cycle_basis(open_graph, gpbc, pred.F)
    faces = lattice.trace_faces(gpbc)
    dual = lattice.dual_graph(gpbc, faces)
    dual_hcb = cycles.hyperbolic_cycle_basis(None, dual, gpbc.n_vertices)
    code = css.assemble(gpbc, hcb, dual_hcb)
    d_z = css.distance_Z(gpbc, code.x_logicals)
    d_x = css.distance_X(dual, code.z_logicals)
    (in_dir / "hcb.txt").write_text(cycles.export_basis(hcb))
    code_meta = {
        "n": code.n, "k": code.k, "dZ": d_z, "dX": d_x,
        "p": pattern[0], "q": pattern[1], "N": spec.index, "h": pred.genus,
    }
    (in_dir / "code.txt").write_text(css.export_code(code, code_meta))
    _write_manifest(in_dir, "analyze", code_meta, [quotient], t0)
    print(f"[[{code.n},{code.k},{d_z},{d_x}]]")
    return 0


def cmd_simulate(args) -> int:
    t0 = time.monotonic()
    config_path = Path(args.config)
    try:
        data = json.loads(config_path.read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise errors.ConfigInvalid(f"cannot read config {config_path}: {exc}") from exc
    env_seed = os.environ.get("HYPERLAT_SEED")
    if env_seed is not None:
        data["seed"] = int(env_seed)
    if args.seed is not None:
        data["seed"] = args.seed
    if args.threads is not None:
        data["workers"] = args.threads
    config = montecarlo.SimConfig.from_json(data)
    bravais = tuple(data["bravais"])
    sig = fuchsian.BravaisSignature.from_pq(*bravais)
    gs = fuchsian.build_generators(sig)
    cell = lattice.build_unit_cell(config.pattern, gs)
    codes = []
    try:
        for qf in config.quotient_files:
            spec = _load_spec(sig, Path(qf))
            gpbc = lattice.build_periodic_graph(cell, spec)
            faces = lattice.trace_faces(gpbc)
            dual = lattice.dual_graph(gpbc, faces)
            open_graph = lattice.build_open_graph(cell, fuchsian.transversal_words(spec))
            pred = lattice.predicted_counts(config.pattern, sig, spec.index)
            hcb = cycles.hyperbolic_cycle_basis(open_graph, gpbc, pred.F)
            dual_hcb = cycles.hyperbolic_cycle_basis(None, dual, gpbc.n_vertices)
            codes.append((spec.index, css.assemble(gpbc, hcb, dual_hcb), gpbc))
    except errors.HyperlatError as exc:
        print(type(exc).__name__, file=sys.stderr)
        print(str(exc), file=sys.stderr)
        return RUNTIME_EXIT
    result = montecarlo.run(config, codes)
    out = Path(args.out) if args.out else config_path.parent
    out.mkdir(parents=True, exist_ok=True)
    (out / "results.csv").write_text(result.to_csv())
    try:
        est = montecarlo.estimate_threshold(result)
        summary = {"p_low": est.p_low, "p_high": est.p_high, "crossed": est.crossed}
    except errors.InsufficientData as exc:
        summary = {"error": str(exc)}
    _write_manifest(
        out, "simulate", data, [config_path] + [Path(q) for q in config.quotient_files],
        t0, extra={"threshold": summary},
    )
    print(f"wrote {out / 'results.csv'}")
    return 0


def make_parser() -> _Parser:
    parser = _Parser(prog="hyperlat", description=__doc__)
    parser.add_argument("--version", action="version", version=_version())
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("build", help="build a periodic lattice and export it")
    b.add_argument("--pattern", required=True, help="p,q of the tessellation")
    b.add_argument("--bravais", required=True, help="p,q of the Bravais lattice")
    b.add_argument("--quotient", required=True, help="quotient spec JSON file")
    b.add_argument("--out", required=True, help="output directory")
    b.set_defaults(func=cmd_build)

    a = sub.add_parser("analyze", help="cycle basis, code assembly, and distances")
    a.add_argument("--in", dest="in_dir", required=True, help="directory written by build")
    a.set_defaults(func=cmd_analyze)

    s = sub.add_parser("simulate", help="threshold Monte Carlo")
    s.add_argument("--config", required=True, help="simulation config JSON")
    s.add_argument("--threads", type=int, default=None, help="worker count (default: config value)")
    s.add_argument("--seed", type=int, default=None, help="override the master seed")
    s.add_argument("--out", default=None, help="output directory (default: config dir)")
    s.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else USAGE_EXIT
    try:
        return args.func(args)
    except _VALIDATION_ERRORS as exc:
        print(type(exc).__name__, file=sys.stderr)
        print(str(exc), file=sys.stderr)
        return VALIDATION_EXIT
    except _INVARIANT_ERRORS as exc:
        print(type(exc).__name__, file=sys.stderr)
        print(str(exc), file=sys.stderr)
        return INVARIANT_EXIT
    except errors.HyperlatError as exc:
        print(type(exc).__name__, file=sys.stderr)
        print(str(exc), file=sys.stderr)
        return RUNTIME_EXIT
    except OSError as exc:
        print(f"OSError: {exc}", file=sys.stderr)
        return VALIDATION_EXIT


if __name__ == "__main__":
    sys.exit(main())
