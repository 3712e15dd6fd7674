"""Command-line driver.

Subcommands:

    dgsl run --config PATH [--set key=value]...
    dgsl verify [--suite NAME] [--set key=value]...
    dgsl mesh gen --kind {structured,perturbed} --n N --out PATH
                  [--amplitude A] [--seed S]

Run configurations are plain-text ``key = value`` files with dotted
keys; ``--set`` flags override file entries. A comma-separated
``penalty`` list turns a run into a penalty sweep with one output per
value. Exit codes: 0 success, 2 configuration error, 3 solver failure,
4 property-suite failure.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

from .convergence import (RunConfig, _metadata, report_from_raw,
                          run_convergence)
from .errors import ConfigError, DgslError
from .mesh import build_perturbed, build_structured, export_mesh
from .newton import NewtonConfig
from .properties import SUITES, run_property_suite

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_SOLVER = 3
EXIT_PROPERTIES = 4

KNOWN_KEYS = {
    "problem.name", "degree", "penalty",
    "mesh.kind", "mesh.levels", "mesh.amplitude", "mesh.seed",
    "newton.abs_tol", "newton.rel_tol", "newton.max_iterations",
    "newton.damping", "newton.initial_guess",
    "quad.volume_degree", "quad.edge_degree",
    "output.path", "output.format",
}


def parse_config_text(text: str) -> dict:
    """Parse ``key = value`` lines; `#` starts a comment."""
    entries = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, value = line.split("=", 1)
        key, value = key.strip(), value.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        entries[key] = value
    return entries


def _parse_bool(value):
    lowered = value.lower()
    if lowered in ("on", "true", "yes", "1"):
        return True
    if lowered in ("off", "false", "no", "0"):
        return False
    raise ConfigError(f"expected on/off, got {value!r}")


def _penalty_list(value):
    try:
        return [float(tok) for tok in str(value).split(",") if tok.strip()]
    except ValueError as exc:
        raise ConfigError(f"bad penalty list {value!r}") from exc


def build_run_config(entries: dict):
    """RunConfig plus the penalty list (len > 1 means a sweep)."""
    def get(key, default=None):
        return entries.get(key, default)

    penalties = _penalty_list(get("penalty", "100"))
    if not penalties:
        raise ConfigError("penalty list is empty")

    mesh_kind = get("mesh.kind", "structured")
    levels_raw = get("mesh.levels", "16,32,64,128")
    tokens = [tok.strip() for tok in levels_raw.split(",") if tok.strip()]
    if mesh_kind == "files":
        levels = tuple(tokens)
    else:
        try:
            levels = tuple(int(tok) for tok in tokens)
        except ValueError as exc:
            raise ConfigError(f"bad mesh.levels {levels_raw!r}") from exc

    try:
        newton = NewtonConfig(
            abs_tol=float(get("newton.abs_tol", "1e-10")),
            rel_tol=float(get("newton.rel_tol", "1e-12")),
            max_iterations=int(get("newton.max_iterations", "25")),
            damping=_parse_bool(get("newton.damping", "on")),
            initial_guess=get("newton.initial_guess", "zero"),
        )
        if newton.initial_guess not in ("zero", "exact"):
            raise ConfigError("newton.initial_guess must be 'zero' or 'exact'")
        cfg = RunConfig(
            problem=get("problem.name", "sine"),
            degree=int(get("degree", "1")),
            penalty=penalties[0],
            mesh_kind=mesh_kind,
            levels=levels,
            amplitude=float(get("mesh.amplitude", "0.2")),
            seed=int(get("mesh.seed", "42")),
            newton=newton,
            volume_degree=int(entries["quad.volume_degree"])
            if "quad.volume_degree" in entries else None,
            edge_degree=int(entries["quad.edge_degree"])
            if "quad.edge_degree" in entries else None,
            output_path=get("output.path"),
            output_format=get("output.format", "csv"),
        )
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"bad configuration value: {exc}") from exc
    cfg.validate()
    return cfg, penalties


def _apply_sets(entries, set_args):
    for item in set_args or ():
        if "=" not in item:
            raise ConfigError(f"--set needs key=value, got {item!r}")
        key, value = item.split("=", 1)
        key = key.strip()
        if key not in KNOWN_KEYS:
            raise ConfigError(f"--set: unknown key {key!r}")
        entries[key] = value.strip()
    return entries


def _write_output(text, path):
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)
        print(f"wrote {path}")


def _output_path_for(base, lam, many):
    if base is None or base == "-" or not many:
        return base
    p = Path(base)
    return str(p.with_name(f"{p.stem}_lam{lam:g}{p.suffix}"))


def cmd_run(args):
    entries = {}
    if args.config:
        path = Path(args.config)
        if not path.is_file():
            raise ConfigError(f"config file not found: {args.config}")
        entries = parse_config_text(path.read_text())
    _apply_sets(entries, args.set)
    cfg, penalties = build_run_config(entries)

    many = len(penalties) > 1
    finest = []
    for lam in penalties:
        run_cfg = replace(cfg, penalty=lam)
        raw = []
        try:
            report = run_convergence(run_cfg,
                                     progress=lambda i, row: raw.append(row))
        except DgslError as exc:
            partial = report_from_raw(raw, _metadata(run_cfg,
                                                     run_cfg.assembly_config()))
            _write_output(partial.serialize(cfg.output_format),
                          _output_path_for(cfg.output_path, lam, many))
            print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
            return EXIT_SOLVER
        _write_output(report.serialize(cfg.output_format),
                      _output_path_for(cfg.output_path, lam, many))
        finest.append((lam, report.rows[-1]))

    if many:
        dg = [row.dg_error for _, row in finest]
        l2 = [row.l2_error for _, row in finest]
        print("penalty sweep at finest level "
              f"(h = {finest[0][1].h:g}):")
        for lam, row in finest:
            print(f"  penalty {lam:g}: l2 {row.l2_error:.4e}, "
                  f"dg {row.dg_error:.4e}")
        trend_dg = "decreases" if all(a > b for a, b in zip(dg, dg[1:])) \
            else "is not monotone"
        trend_l2 = "increases" if all(a < b for a, b in zip(l2, l2[1:])) \
            else "is not monotone"
        print(f"  energy-norm error {trend_dg} with the penalty; "
              f"L2 error {trend_l2}.")
    return EXIT_OK


def cmd_verify(args):
    overrides = {}
    for item in args.set or ():
        if "=" not in item:
            raise ConfigError(f"--set needs key=value, got {item!r}")
        key, value = item.split("=", 1)
        try:
            overrides[key.strip()] = float(value)
        except ValueError:
            overrides[key.strip()] = value.strip()
    try:
        results = run_property_suite(args.suite, overrides)
    except KeyError as exc:
        raise ConfigError(str(exc)) from exc
    for result in results:
        print(result.line())
    return EXIT_OK if all(r.passed for r in results) else EXIT_PROPERTIES


def cmd_mesh_gen(args):
    if args.n < 1:
        raise ConfigError(f"--n must be >= 1, got {args.n}")
    if args.kind == "structured":
        mesh = build_structured(args.n)
    else:
        mesh = build_perturbed(args.n, args.amplitude, args.seed)
    Path(args.out).write_text(export_mesh(mesh))
    print(f"wrote {args.out} ({mesh.num_vertices} vertices, "
          f"{mesh.num_triangles} triangles)")
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="dgsl",
        description="Interior penalty DG solver for semilinear elliptic "
                    "problems on triangular meshes.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run a convergence study")
    p_run.add_argument("--config", help="key = value configuration file")
    p_run.add_argument("--set", action="append", metavar="KEY=VALUE",
                       help="override a configuration key")
    p_run.set_defaults(func=cmd_run)

    p_verify = sub.add_parser("verify", help="run property suites")
    p_verify.add_argument("--suite", default="all",
                          help=f"one of: all, {', '.join(sorted(SUITES))}")
    p_verify.add_argument("--set", action="append", metavar="KEY=VALUE",
                          help="override a suite parameter (e.g. penalty=0.01)")
    p_verify.set_defaults(func=cmd_verify)

    p_mesh = sub.add_parser("mesh", help="mesh utilities")
    mesh_sub = p_mesh.add_subparsers(dest="mesh_command", required=True)
    p_gen = mesh_sub.add_parser("gen", help="generate a mesh file")
    p_gen.add_argument("--kind", choices=("structured", "perturbed"),
                       default="structured")
    p_gen.add_argument("--n", type=int, required=True)
    p_gen.add_argument("--out", required=True)
    p_gen.add_argument("--amplitude", type=float, default=0.2)
    p_gen.add_argument("--seed", type=int, default=42)
    p_gen.set_defaults(func=cmd_mesh_gen)

    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DgslError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_SOLVER


if __name__ == "__main__":
    sys.exit(main())
