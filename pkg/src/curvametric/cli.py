"""Command-line front end: sample generation, analysis reports, check suites.

Exit codes: 0 success, 1 failed verification criterion, 2 I/O or
configuration failure (argparse usage errors also exit with 2).  Machine
files carry floats at 17 significant digits; human tables use 6.  The
thread count only distributes work across a pool and never changes any
number; CURVAMETRIC_THREADS is the fallback when --threads is absent.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .curvature import curvature_field, field_summary, write_field_csv
from .energy import ahlfors_scan, energy_summary, lp_energy, write_ahlfors_csv
from .multiscale import (
    DEFAULT_SCALES,
    decay_fit,
    dyadic_radii,
    fineness,
    scale_profile,
    write_profile_csv,
)
from .sampled_set import GENERATOR_KINDS, ShapeSpec, WeightedSample, generate, load_points
from .verification import SUITES, CheckResult, run_suite

SCHEMA_VERSION = 1
ENV_THREADS = "CURVAMETRIC_THREADS"
MACHINE = "%.17g"
HUMAN = "%.6g"
# profile/fineness base points are strided down to this many; the full
# N x K optimize sweep is quadratic-ish and not what a report needs
PROFILE_BASES = 48
HISTOGRAM_BINS = 32

_FIXED_DIMS = {
    "circle": (2, 1),
    "sphere": (3, 2),
    "ellipsoid": (3, 2),
    "torus": (3, 2),
    "stacked_spheres": (3, 2),
}


class ConfigError(ValueError):
    """Inconsistent flags or malformed run description; exits with 2."""


@dataclass(frozen=True)
class RunConfig:
    """Validated description of one CLI run.

    Exactly one of shape / input_path may be set; analytic tangent planes
    exist only on generated samples, so tangent_source 'analytic' together
    with input_path is rejected.
    """

    command: str
    shape: Optional[ShapeSpec] = None
    input_path: Optional[str] = None
    input_format: str = "csv"
    input_dim: int = 2
    total_measure: float = 1.0
    p: float = 4.0
    kind: str = "tangent_point"
    method: str = "auto"
    tangent_source: str = "analytic"
    scales: int = DEFAULT_SCALES
    seed: int = 0
    threads: int = 1
    out_dir: str = "."
    suite: str = "all"

    def __post_init__(self):
        if self.command not in ("generate", "analyze", "verify"):
            raise ConfigError("unknown command %r" % self.command)
        if self.shape is not None and self.input_path is not None:
            raise ConfigError("--shape and --input are mutually exclusive")
        if self.command == "generate" and self.shape is None:
            raise ConfigError("generate requires --shape")
        if self.command == "analyze" and self.shape is None and self.input_path is None:
            raise ConfigError("analyze requires --shape or --input")
        if self.kind not in ("tangent_point", "menger"):
            raise ConfigError("kind must be 'tangent_point' or 'menger'")
        if self.method not in ("auto", "exact", "pruned"):
            raise ConfigError("method must be 'auto', 'exact' or 'pruned'")
        if self.tangent_source == "analytic":
            if self.input_path is not None:
                raise ConfigError(
                    "analytic tangents require a generator shape; loaded point"
                    " sets carry none (use --tangents pca or pca:R)"
                )
        elif self.tangent_source.startswith("pca"):
            if ":" in self.tangent_source:
                try:
                    radius = float(self.tangent_source.split(":", 1)[1])
                except ValueError:
                    raise ConfigError(
                        "bad tangent source %r; pca radius must be a number"
                        % self.tangent_source
                    ) from None
                if radius <= 0:
                    raise ConfigError("pca tangent radius must be positive")
        else:
            raise ConfigError(
                "tangent source must be 'analytic', 'pca' or 'pca:R', got %r"
                % self.tangent_source
            )
        if self.p <= 0:
            raise ConfigError("p must be positive")
        if self.scales < 1:
            raise ConfigError("need at least one scale")
        if self.threads < 1:
            raise ConfigError("thread count must be at least 1")
        if self.command == "verify" and self.input_path is None and self.suite not in SUITES:
            raise ConfigError(
                "unknown suite %r (choose from %s)" % (self.suite, ", ".join(SUITES))
            )


# ------------------------------------------------------------- serialization


def _json_default(obj):
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError("not JSON-serializable: %r" % type(obj))


def _write_json(path: Path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, default=_json_default)
        fh.write("\n")


# ------------------------------------------------------------------ commands


def cmd_generate(config: RunConfig) -> Path:
    """Write the sample as CSV with a JSON sidecar; returns the CSV path.

    Both files are deterministic functions of the shape spec, so reruns
    are byte-identical.
    """
    sample = generate(config.shape)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / "sample.csv"
    cols = ["x%d" % (i + 1) for i in range(sample.ambient_dim)] + ["w"]
    with open(csv_path, "w", encoding="utf-8") as fh:
        fh.write(",".join(cols) + "\n")
        for row, w in zip(sample.points, sample.weights):
            fh.write(",".join(MACHINE % v for v in row))
            fh.write("," + MACHINE % w + "\n")
    sidecar = {
        "schema_version": SCHEMA_VERSION,
        "kind": config.shape.kind,
        "count": sample.count,
        "seed": config.shape.seed,
        "params": dict(config.shape.params),
        "ambient_dim": sample.ambient_dim,
        "intrinsic_dim": sample.intrinsic_dim,
        "analytic_measure": sample.meta.get("analytic_measure"),
        "total_weight": sample.total_weight(),
    }
    _write_json(out / "sample.json", sidecar)
    print(
        "wrote %d %s points (m=%d, n=%d) to %s"
        % (sample.count, config.shape.kind, sample.intrinsic_dim, sample.ambient_dim, out)
    )
    return csv_path


def _load_sample(config: RunConfig) -> WeightedSample:
    if config.shape is not None:
        return generate(config.shape)
    return load_points(
        config.input_path,
        config.input_format,
        config.input_dim,
        total_measure=config.total_measure,
    )


def _strided_bases(count: int, limit: int) -> np.ndarray:
    return np.arange(0, count, max(1, count // limit))


def cmd_analyze(config: RunConfig) -> dict:
    """Flatness profiles, fineness, curvature field, energy, bound ratios.

    Writes CSV tables, gnuplot data files and summary.json into the output
    directory; returns the path map.  Guard failures inside the numeric
    modules carry the guard name and surface as exit 2.
    """
    sample = _load_sample(config)
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = {}

    radii = dyadic_radii(sample, config.scales)
    bases = _strided_bases(sample.count, PROFILE_BASES)
    profile = scale_profile(sample, radii, bases)
    paths["profile"] = out / "profile.csv"
    write_profile_csv(profile, paths["profile"])

    fine = fineness(sample, radii, bases)

    field = curvature_field(
        sample,
        config.kind,
        tangent_source=config.tangent_source,
        method=config.method,
        seed=config.seed,
        threads=config.threads,
    )
    paths["field"] = out / "field.csv"
    write_field_csv(field, paths["field"])
    energy = lp_energy(field, sample, config.p)

    try:
        decay: dict = asdict(decay_fit(profile, config.p, config.kind))
    except ValueError as exc:
        decay = {"error": str(exc)}

    try:
        ahl_min, ahl_table = ahlfors_scan(sample, radii)
        paths["ahlfors"] = out / "ahlfors.csv"
        write_ahlfors_csv(ahl_table, paths["ahlfors"])
        ahlfors: dict = {"min_ratio": ahl_min, "scales": radii.size}
    except ValueError as exc:
        ahlfors = {"error": str(exc)}

    paths["beta_decay"] = out / "beta_decay.dat"
    with open(paths["beta_decay"], "w", encoding="utf-8") as fh:
        fh.write("# log-log flatness decay: r  max_beta  mean_beta\n")
        for ki, r in enumerate(profile.radii):
            fh.write(
                "%s %s %s\n"
                % (
                    MACHINE % r,
                    MACHINE % profile.beta[:, ki].max(),
                    MACHINE % profile.beta[:, ki].mean(),
                )
            )

    paths["field_hist"] = out / "field_hist.dat"
    # constant-to-the-ulp fields cannot carry 32 finite bins
    spread = float(field.values.max() - field.values.min())
    scale = max(1.0, float(np.abs(field.values).max()))
    bins = HISTOGRAM_BINS if spread > HISTOGRAM_BINS * np.finfo(float).eps * scale else 1
    counts, edges = np.histogram(field.values, bins=bins)
    with open(paths["field_hist"], "w", encoding="utf-8") as fh:
        fh.write("# curvature field histogram: bin_left  bin_right  count\n")
        for i, c in enumerate(counts):
            fh.write(
                "%s %s %d\n" % (MACHINE % edges[i], MACHINE % edges[i + 1], int(c))
            )

    summary = {
        "schema_version": SCHEMA_VERSION,
        "sample": {
            "count": sample.count,
            "ambient_dim": sample.ambient_dim,
            "intrinsic_dim": sample.intrinsic_dim,
            "total_weight": sample.total_weight(),
            "mean_spacing": sample.mean_spacing,
            "source": config.input_path or config.shape.kind,
        },
        "config": {
            "p": config.p,
            "kind": config.kind,
            "method": config.method,
            "tangent_source": config.tangent_source,
            "scales": config.scales,
            "seed": config.seed,
            "threads": config.threads,
        },
        "radii": radii,
        "profile_bases": bases.size,
        "optimizer_gap": profile.optimizer_gap,
        "fineness": {
            "regularity_constant": fine.a_sigma,
            "hole_constant": fine.m_sigma,
            "notes": fine.notes,
            "worst_pairs": fine.worst_pairs,
        },
        "field": field_summary(field),
        "energy": energy_summary(energy),
        "decay": decay,
        "ahlfors": ahlfors,
    }
    paths["summary"] = out / "summary.json"
    _write_json(paths["summary"], summary)

    print(
        "analyzed %d points (m=%d, n=%d), %d scales x %d bases"
        % (sample.count, sample.intrinsic_dim, sample.ambient_dim, radii.size, bases.size)
    )
    print(
        ("field %s/%s: mean " + HUMAN + ", max " + HUMAN)
        % (field.kind, field.method, float(field.values.mean()), float(field.values.max()))
    )
    ratio = (", bound ratio " + HUMAN % energy.ratio) if energy.ratio is not None else ""
    print(("L^p norm " + HUMAN + " at p=" + HUMAN) % (energy.lp_norm, config.p) + ratio)
    if "kappa_hat" in decay:
        print(
            ("decay slope " + HUMAN + " (finite-energy bound " + HUMAN + ")")
            % (decay["kappa_hat"], decay["kappa_bound"])
        )
    else:
        print("decay fit skipped: %s" % decay["error"])
    print("reports in %s" % out)
    return paths


def _input_checks(sample: WeightedSample, config: RunConfig) -> list:
    """Invariant checks applicable to an arbitrary loaded sample.

    Criterion number 0 marks input-level checks as opposed to the numbered
    suite criteria.
    """
    results = []
    radii = dyadic_radii(sample, config.scales)
    bases = _strided_bases(sample.count, 16)

    start = time.perf_counter()
    profile = scale_profile(sample, radii, bases, include_theta=False)
    # flatness of a ball around its own center never exceeds 1
    ok = bool(
        np.all(profile.beta >= 0.0)
        and np.all(profile.beta <= 1.0 + 1e-12)
        and profile.optimizer_gap >= -1e-12
    )
    detail = ("beta in [" + HUMAN + ", " + HUMAN + "] over %d bases x %d scales, optimizer gap " + HUMAN) % (
        float(profile.beta.min()),
        float(profile.beta.max()),
        bases.size,
        radii.size,
        profile.optimizer_gap,
    )
    results.append(
        CheckResult("input-beta-range", 0, ok, detail, time.perf_counter() - start)
    )

    start = time.perf_counter()
    min_ratio, _ = ahlfors_scan(sample, radii)
    ok = bool(math.isfinite(min_ratio) and min_ratio > 0.0)
    detail = ("min ball-weight ratio " + HUMAN + " over %d scales") % (min_ratio, radii.size)
    results.append(
        CheckResult("input-ahlfors-positivity", 0, ok, detail, time.perf_counter() - start)
    )
    return results


def cmd_verify(config: RunConfig) -> int:
    """Run a named check suite (or input-level invariants) and report.

    Prints a pass/fail table, writes verify.json, and returns the exit
    code: 0 all passed, 1 with the worst offender named on stderr, 2 for
    unreadable input.
    """
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    if config.input_path is not None:
        try:
            sample = _load_sample(config)
        except (OSError, ValueError) as exc:
            print("error: cannot load %s: %s" % (config.input_path, exc), file=sys.stderr)
            return 2
        results = _input_checks(sample, config)
        suite_name = "input:%s" % config.input_path
    else:
        results = run_suite(config.suite)
        suite_name = config.suite

    width = max(len(r.name) for r in results)
    for r in results:
        print(
            "%s  %2d  %-*s  %10s  %s"
            % (
                "PASS" if r.passed else "FAIL",
                r.criterion,
                width,
                r.name,
                (HUMAN % r.elapsed) + "s",
                r.detail,
            )
        )

    payload = {
        "schema_version": SCHEMA_VERSION,
        "suite": suite_name,
        "passed": all(r.passed for r in results),
        "results": [asdict(r) for r in results],
    }
    _write_json(out / "verify.json", payload)

    failures = [r for r in results if not r.passed]
    if failures:
        # suite order ranks the failures; the first is reported as worst
        print("worst offender: %s (%s)" % (failures[0].name, failures[0].detail), file=sys.stderr)
        for r in failures[1:]:
            print("also failed: %s" % r.name, file=sys.stderr)
        return 1
    return 0


# ------------------------------------------------------------------- parsing


def _add_shape_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--shape", choices=GENERATOR_KINDS, help="generator shape kind")
    sub.add_argument("--seed", type=int, default=0, help="lattice seed (default 0)")
    sub.add_argument("--n", type=int, help="ambient dimension (validated per shape)")
    sub.add_argument("--m", type=int, help="intrinsic dimension (shape or loader)")
    sub.add_argument("--radius", type=float, help="circle/sphere/disk/graph radius")
    sub.add_argument("--major-radius", type=float, help="torus major radius")
    sub.add_argument("--minor-radius", type=float, help="torus minor radius")
    sub.add_argument("--semi-axes", metavar="A,B,C", help="ellipsoid semi-axes")
    sub.add_argument("--function", help="graph height function name")
    sub.add_argument("--depth", type=int, help="stacked-spheres depth")


def _shape_from_args(args) -> ShapeSpec:
    params: dict = {}
    if args.radius is not None:
        params["radius"] = args.radius
    if args.major_radius is not None:
        params["major_radius"] = args.major_radius
    if args.minor_radius is not None:
        params["minor_radius"] = args.minor_radius
    if args.semi_axes is not None:
        try:
            axes = tuple(float(v) for v in args.semi_axes.split(","))
        except ValueError:
            raise ConfigError("--semi-axes expects A,B,C numbers") from None
        if len(axes) != 3:
            raise ConfigError("--semi-axes expects exactly three values")
        params["semi_axes"] = axes
    if args.function is not None:
        params["function"] = args.function
    if args.depth is not None:
        params["depth"] = args.depth

    kind = args.shape
    if kind in _FIXED_DIMS:
        exp_n, exp_m = _FIXED_DIMS[kind]
    elif kind == "flat_disk":
        exp_m = args.m if args.m is not None else 2
        exp_n = args.n if args.n is not None else exp_m + 1
        params["m"] = exp_m
        params["ambient_dim"] = exp_n
    else:  # graph_of_function
        exp_m = args.m if args.m is not None else 2
        exp_n = exp_m + 1
        params["m"] = exp_m
    if args.n is not None and args.n != exp_n:
        raise ConfigError(
            "--n %d conflicts with shape %r (ambient dimension %d)" % (args.n, kind, exp_n)
        )
    if args.m is not None and args.m != exp_m:
        raise ConfigError(
            "--m %d conflicts with shape %r (intrinsic dimension %d)" % (args.m, kind, exp_m)
        )
    return ShapeSpec(kind, args.count, args.seed, params)


def _resolve_threads(value: Optional[int]) -> int:
    if value is None:
        env = os.environ.get(ENV_THREADS)
        if env is None or not env.strip():
            return 1
        try:
            value = int(env)
        except ValueError:
            raise ConfigError("%s=%r is not an integer" % (ENV_THREADS, env)) from None
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvametric",
        description=(
            "Discrete curvature toolkit: generate sampled shapes, analyze"
            " flatness and curvature energies, run verification suites."
        ),
    )
    sub = parser.add_subparsers(dest="command", metavar="command", required=True)

    gen = sub.add_parser("generate", help="write a sampled shape as CSV plus JSON sidecar")
    _add_shape_flags(gen)
    gen.add_argument("--count", type=int, required=True, help="number of sample points")
    gen.add_argument("--out", default=".", metavar="DIR", help="output directory")

    ana = sub.add_parser(
        "analyze", help="flatness profile, curvature field, energies, bound ratios"
    )
    _add_shape_flags(ana)
    ana.add_argument("--count", type=int, help="sample point count (with --shape)")
    ana.add_argument("--input", metavar="FILE", help="CSV point list or OBJ mesh")
    ana.add_argument("--format", choices=("csv", "obj"), default="csv")
    ana.add_argument(
        "--total-measure", type=float, default=1.0,
        help="measure spread over unweighted CSV input rows",
    )
    ana.add_argument("--p", type=float, default=4.0, help="energy exponent (default 4)")
    ana.add_argument("--kind", choices=("menger", "tp"), default="tp")
    ana.add_argument("--method", choices=("exact", "pruned"), help="menger search method")
    ana.add_argument(
        "--tangents", metavar="SRC",
        help="tangent source: analytic, pca or pca:R (default analytic for"
        " shapes, pca for loaded input)",
    )
    ana.add_argument("--scales", type=int, default=DEFAULT_SCALES, metavar="K")
    ana.add_argument("--threads", type=int, help="worker threads (default %s or 1)" % ENV_THREADS)
    ana.add_argument("--out", default=".", metavar="DIR", help="output directory")

    ver = sub.add_parser("verify", help="run a named check suite or input invariants")
    ver.add_argument(
        "--suite", default="all", metavar="NAME",
        help="one of: %s" % ", ".join(SUITES),
    )
    ver.add_argument("--input", metavar="FILE", help="verify a point file instead")
    ver.add_argument("--format", choices=("csv", "obj"), default="csv")
    ver.add_argument("--m", type=int, help="intrinsic dimension of the input")
    ver.add_argument("--total-measure", type=float, default=1.0)
    ver.add_argument("--scales", type=int, default=DEFAULT_SCALES, metavar="K")
    ver.add_argument("--threads", type=int, help="worker threads")
    ver.add_argument("--out", default=".", metavar="DIR", help="output directory")
    return parser


def _config_from_args(args) -> RunConfig:
    threads = _resolve_threads(getattr(args, "threads", None))
    if args.command == "generate":
        if args.shape is None:
            raise ConfigError("generate requires --shape")
        return RunConfig(
            "generate",
            shape=_shape_from_args(args),
            seed=args.seed,
            threads=threads,
            out_dir=args.out,
        )
    if args.command == "analyze":
        shape = None
        if args.shape is not None:
            if args.count is None:
                raise ConfigError("--shape analysis requires --count")
            shape = _shape_from_args(args)
        kind = "tangent_point" if args.kind == "tp" else "menger"
        tangents = args.tangents
        if tangents is None:
            tangents = "analytic" if shape is not None else "pca"
        return RunConfig(
            "analyze",
            shape=shape,
            input_path=args.input,
            input_format=args.format,
            input_dim=args.m if args.m is not None else 2,
            total_measure=args.total_measure,
            p=args.p,
            kind=kind,
            method=args.method if args.method is not None else "auto",
            tangent_source=tangents,
            scales=args.scales,
            seed=args.seed,
            threads=threads,
            out_dir=args.out,
        )
    return RunConfig(
        "verify",
        input_path=args.input,
        input_format=args.format,
        input_dim=args.m if args.m is not None else 2,
        total_measure=args.total_measure,
        tangent_source="pca",
        scales=args.scales,
        threads=threads,
        out_dir=args.out,
        suite=args.suite,
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        if config.command == "generate":
            cmd_generate(config)
            return 0
        if config.command == "analyze":
            cmd_analyze(config)
            return 0
        return cmd_verify(config)
    except ConfigError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except (OSError, ValueError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
