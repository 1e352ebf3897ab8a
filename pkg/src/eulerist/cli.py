"""Command-line front end.

Every command writes ``run.json`` (resolved configuration and tool version)
next to its outputs; ``eulerist run run.json`` replays it. Exit codes: 0 ok,
2 usage or parse error, 3 validation failure, 4 numeric failure.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .complex import FiltrationError, MultiFiltration, validate
from .estimators import EulerProfile, GraphFiltration, HybridTransform, PointCloudFiltration
from .euler import GridSpec, ProfileGrid, l1_window_norm
from .io import (
    ParseError,
    format_number,
    read_attributes,
    read_filtration,
    read_graph,
    read_point_cloud,
    write_filtration,
    write_json,
    write_point_cloud,
    write_profile,
)
from .persistence import reduce, total_w1
from .signed import signed_barcode, signed_w1
from .synth import (
    mc_harness,
    sample_clutter,
    sample_orbit,
    sample_poisson,
    sample_sphere,
    sample_torus,
)
from .transforms import BUILTIN_KERNELS, get_kernel

EXIT_OK, EXIT_USAGE, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3, 4
INPUT_SUFFIXES = {"points": (".csv",), "graph": (".edges",), "filtration": (".filt",)}


class CLIError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(code, message)
        self.code, self.message = code, message


# ---------------------------------------------------------------- config


@dataclass
class RunConfig:
    """A command name plus the value of every flag of that command."""

    command: str
    options: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"command": self.command, "options": dict(sorted(self.options.items()))}

    @classmethod
    def from_json(cls, doc: dict) -> "RunConfig":
        if "config" in doc:
            doc = doc["config"]
        return cls(doc["command"], dict(doc.get("options", {})))

    @classmethod
    def from_namespace(cls, ns: argparse.Namespace) -> "RunConfig":
        opts = {k: v for k, v in vars(ns).items() if k not in ("command", "handler")}
        return cls(ns.command, opts)

    def to_argv(self) -> list[str]:
        sub = _subparsers()[self.command]
        positional, flags = [], []
        for action in sub._actions:
            if isinstance(action, argparse._HelpAction) or action.dest not in self.options:
                continue
            value = self.options[action.dest]
            if not action.option_strings:
                positional.append(str(value))
            elif isinstance(action, argparse._StoreTrueAction):
                if value:
                    flags.append(action.option_strings[-1])
            elif isinstance(action, argparse._AppendAction):
                for v in value or ():
                    flags += [action.option_strings[-1], str(v)]
            elif value is not None:
                flags += [action.option_strings[-1], str(value)]
        return [self.command] + positional + flags


def _run_record(config: RunConfig) -> dict:
    return {"tool": "eulerist", "version": __version__, "config": config.to_json()}


def _write_run(config: RunConfig, directory) -> None:
    directory = Path(directory or ".")
    directory.mkdir(parents=True, exist_ok=True)
    write_json(_run_record(config), directory / "run.json")


def _output_dir(path) -> Path:
    return Path(path).parent if str(path) else Path(".")


# ---------------------------------------------------------------- flag parsing


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",")]
    except ValueError:
        raise CLIError(EXIT_USAGE, f"expected comma-separated numbers, got {text!r}") from None


def _pairs(text: str) -> list[tuple[float, float]]:
    out = []
    for part in text.split("x"):
        vals = _floats(part)
        if len(vals) != 2:
            raise CLIError(EXIT_USAGE, f"expected 'lo,hi' per axis, got {part!r}")
        out.append((vals[0], vals[1]))
    return out


def _axes_values(text: str, kind=float) -> list:
    try:
        return [kind(x) for x in text.split("x")]
    except ValueError:
        raise CLIError(EXIT_USAGE, f"expected values separated by 'x', got {text!r}") from None


def _threads(ns) -> int:
    value = ns.threads if getattr(ns, "threads", None) is not None else os.environ.get("EULERIST_THREADS", 1)
    try:
        value = int(value)
    except ValueError:
        raise CLIError(EXIT_USAGE, f"thread count must be an integer, got {value!r}") from None
    if value < 1:
        raise CLIError(EXIT_USAGE, "thread count must be >= 1")
    return value


def _kernel(spec: str):
    try:
        return get_kernel(spec)
    except (KeyError, ValueError) as exc:
        msg = exc.args[0] if exc.args else str(exc)
        if "built-in" not in msg:
            msg += f"; built-in kernels: {', '.join(sorted(BUILTIN_KERNELS))}"
        raise CLIError(EXIT_USAGE, msg) from None


def _profile_estimator(ns, descriptor: str):
    if descriptor == "ecp":
        if (ns.bounds is None) == (ns.quantiles is None):
            raise CLIError(EXIT_USAGE, "give exactly one of --bounds or --quantiles")
        res = _axes_values(ns.resolution, int)
        if ns.bounds is not None:
            return EulerProfile(resolution=res if len(res) > 1 else res[0], bounds=_pairs(ns.bounds))
        q = _pairs(ns.quantiles)
        return EulerProfile(resolution=res if len(res) > 1 else res[0], bounds=None, quantiles=q)
    _kernel(ns.kernel)
    res = _axes_values(ns.resolution, int)
    if (ns.xi_bounds is None) == (ns.quantile is None):
        raise CLIError(EXIT_USAGE, "give exactly one of --xi-bounds or --quantile")
    if ns.xi_bounds is not None:
        return HybridTransform(kernel=ns.kernel, resolution=res, xi_bounds=_pairs(ns.xi_bounds))
    q = _axes_values(ns.quantile, float)
    return HybridTransform(kernel=ns.kernel, resolution=res, xi_bounds=None,
                           quantile=q if len(q) > 1 else q[0], alpha=ns.alpha)


def _profile_extra(ns, estimator) -> dict:
    if isinstance(estimator, HybridTransform) and estimator.xi_bounds is None:
        return {"alpha": ns.alpha, "quantiles": _axes_values(ns.quantile, float)}
    if isinstance(estimator, EulerProfile) and estimator.bounds is None:
        return {"quantiles": [list(p) for p in _pairs(ns.quantiles)]}
    return {}


# ---------------------------------------------------------------- loading inputs


def _builder_options(ns) -> dict:
    return {
        "type": ns.type,
        "builder": ns.builder,
        "max_dim": ns.max_dim,
        "max_scale": ns.max_scale,
        "codensity": ns.codensity,
        "bandwidth": ns.bandwidth,
        "post": ns.post,
        "vf": list(ns.vf or ()),
        "ef": list(ns.ef or ()),
        "skip_header": ns.skip_header,
        "attributes": getattr(ns, "attributes", None),
    }


def _load(path, opts: dict) -> MultiFiltration:
    """Build and validate the filtration of one input file."""
    kind = opts["type"]
    if kind == "points":
        P = read_point_cloud(path, skip_header=opts["skip_header"])
        est = PointCloudFiltration(builder=opts["builder"], max_dim=opts["max_dim"], max_scale=opts["max_scale"],
                                   codensity=opts["codensity"], bandwidth=opts["bandwidth"], post=opts["post"])
        f = est.transform([P])[0]
    elif kind == "graph":
        if not opts["vf"] and not opts["ef"]:
            raise CLIError(EXIT_USAGE, "graph input needs at least one --vf or --ef")
        attrs_path = opts.get("attributes")
        if attrs_path is None:
            sibling = Path(path).with_suffix(".attrs.csv")
            attrs_path = sibling if sibling.exists() else None
        attrs = read_attributes(attrs_path) if attrs_path is not None else None
        g = read_graph(path, attributes=attrs)
        try:
            f = GraphFiltration(opts["vf"], opts["ef"]).transform([g])[0]
        except KeyError as exc:
            raise CLIError(EXIT_USAGE, str(exc.args[0])) from None
    else:
        f = read_filtration(path)
    report = validate(f)
    if not report.ok:
        raise CLIError(EXIT_INVALID, f"{path}: invalid filtration\n{report}")
    return f


def _load_job(job):
    path, opts = job
    return _load(path, opts)


def _describe_job(job):
    estimator, f = job
    return estimator.transform([f])[0]


# ---------------------------------------------------------------- commands


def cmd_build(ns, config) -> int:
    f = _load(ns.input, _builder_options(ns))
    write_filtration(f, ns.output)
    _write_run(config, _output_dir(ns.output))
    return EXIT_OK


def cmd_ecp(ns, config) -> int:
    return _profile_command(ns, config, "ecp")


def cmd_ht(ns, config) -> int:
    return _profile_command(ns, config, "ht")


def _profile_command(ns, config, descriptor) -> int:
    estimator = _profile_estimator(ns, descriptor)
    f = _load(ns.filtration, {"type": "filtration"})
    estimator.fit([f])
    row = estimator.transform([f])[0]
    meta = {}
    if descriptor == "ht":
        meta = {"kernel": estimator.kernel_.name, **estimator.kernel_.params}
    grid = ProfileGrid(estimator.grid_, row.reshape(estimator.grid_.shape), kind=descriptor, meta=meta)
    write_profile(grid, ns.output, extra=_profile_extra(ns, estimator))
    _write_run(config, _output_dir(ns.output))
    return EXIT_OK


def _discover(root: Path, kind: str) -> list[tuple[str, Path]]:
    suffixes = INPUT_SUFFIXES[kind]
    items = []
    for p in root.rglob("*"):
        if not p.is_file() or p.name == "labels.csv" or p.name.endswith(".attrs.csv"):
            continue
        if p.suffix in suffixes:
            items.append((p.relative_to(root).as_posix(), p))
    items.sort(key=lambda item: item[0])
    return items


def _labels(root: Path, names: list[str]) -> list[str]:
    table = root / "labels.csv"
    if table.exists():
        mapping = {}
        with open(table, encoding="utf-8", newline="") as fh:
            for lineno, row in enumerate(csv.reader(fh), start=1):
                if not row or row[0].startswith("#"):
                    continue
                if len(row) != 2:
                    raise ParseError(table, lineno, "expected 'name,label'")
                if lineno == 1 and row == ["name", "label"]:
                    continue
                mapping[row[0].strip()] = row[1].strip()
        missing = [n for n in names if n not in mapping]
        if missing:
            raise ParseError(table, None, f"no label for {missing[0]!r}")
        return [mapping[n] for n in names]
    return [n.split("/")[0] if "/" in n else "" for n in names]


def cmd_featurize(ns, config) -> int:
    root = Path(ns.dataset)
    if not root.is_dir():
        raise CLIError(EXIT_USAGE, f"{root} is not a directory")
    estimator = _profile_estimator(ns, ns.descriptor)
    items = _discover(root, ns.type)
    if not items:
        raise CLIError(EXIT_USAGE, f"no {'/'.join(INPUT_SUFFIXES[ns.type])} inputs under {root}")
    names = [name for name, _ in items]
    labels = _labels(root, names)
    opts = _builder_options(ns)
    threads = _threads(ns)
    jobs = [(str(path), opts) for _, path in items]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            filtrations = list(pool.map(_load_job, jobs))
            estimator.fit(filtrations)
            rows = list(pool.map(_describe_job, [(estimator, f) for f in filtrations]))
    else:
        filtrations = [_load_job(job) for job in jobs]
        estimator.fit(filtrations)
        rows = [_describe_job((estimator, f)) for f in filtrations]
    out = Path(ns.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", encoding="utf-8", newline="\n") as fh:
        width = estimator.grid_.size
        fh.write(",".join(["name", "label"] + [f"f{i}" for i in range(width)]) + "\n")
        for name, label, row in zip(names, labels, rows):
            fh.write(",".join([name, label] + [format_number(v) for v in row.tolist()]) + "\n")
    meta = {
        "m": estimator.grid_.m,
        "shape": list(estimator.grid_.shape),
        "axis_min": list(estimator.grid_.mins),
        "axis_max": list(estimator.grid_.maxs),
        "kind": ns.descriptor,
        "n_inputs": len(names),
        **_profile_extra(ns, estimator),
    }
    if ns.descriptor == "ht":
        meta.update({"kernel": estimator.kernel_.name, **estimator.kernel_.params})
    write_json(meta, out.with_suffix(".json"))
    _write_run(config, _output_dir(out))
    return EXIT_OK


def cmd_distance(ns, config) -> int:
    a = _load(ns.a, {"type": "filtration"})
    b = _load(ns.b, {"type": "filtration"})
    metric, _, arg = ns.metric.partition(":")
    if a.m != b.m:
        raise CLIError(EXIT_USAGE, f"filtrations have different m ({a.m} vs {b.m})")
    if metric == "signed-w1":
        value = signed_w1(signed_barcode(a), signed_barcode(b))
    elif metric == "l1-window":
        try:
            M = float(arg)
        except ValueError:
            raise CLIError(EXIT_USAGE, "l1-window needs a window size, as in l1-window:5") from None
        value = l1_window_norm(a, b, M)
    elif metric == "w1-diagram":
        if a.m != 1:
            raise CLIError(EXIT_USAGE, "w1-diagram needs 1-parameter filtrations")
        value = total_w1(reduce(a), reduce(b))
    else:
        raise CLIError(EXIT_USAGE, f"unknown metric {ns.metric!r}; use signed-w1, l1-window:M or w1-diagram")
    text = format_number(value)
    print(text)
    if ns.output:
        Path(ns.output).write_text(text + "\n", encoding="utf-8")
    _write_run(config, _output_dir(ns.output) if ns.output else ns.run_dir)
    return EXIT_OK


def cmd_sample(ns, config) -> int:
    g = ns.generator
    if g == "orbit":
        P = sample_orbit(ns.rho, ns.n, ns.seed)
    elif g == "poisson":
        P = sample_poisson(ns.intensity, ns.side, ns.dim, ns.seed)
    elif g == "torus":
        P = sample_torus(ns.n, ns.uniform, ns.seed)
    elif g == "sphere":
        P = sample_sphere(ns.n, ns.uniform, ns.seed, phi_scale=ns.phi_scale)
    else:
        P = sample_clutter(ns.n_noise, ns.n_line, ns.lines, ns.jitter, ns.seed)
    Path(ns.output).parent.mkdir(parents=True, exist_ok=True)
    write_point_cloud(P, ns.output)
    _write_run(config, _output_dir(ns.output))
    return EXIT_OK


def _uniform_cloud(d):
    def gen(n, rng):
        count = rng.poisson(n)
        return rng.uniform(size=(count, d))

    return gen


def cmd_mc(ns, config) -> int:
    sizes = [int(x) for x in _floats(ns.sizes)]
    bounds = _pairs(ns.bounds)
    res = _axes_values(ns.resolution, int)
    grid = GridSpec.uniform(bounds, res)
    builder = PointCloudFiltration(builder=ns.builder, max_dim=ns.max_dim, max_scale=ns.max_scale)
    profile = EulerProfile(resolution=res, bounds=bounds)

    def descriptor(P):
        f = builder.transform([P])[0]
        return profile.fit([f]).transform([f])[0] / (len(P) if ns.normalize and len(P) else 1)

    regime = None if ns.regime == "none" else ns.regime
    result = mc_harness(_uniform_cloud(ns.dim), descriptor, ns.replications, sizes,
                        seed=ns.seed, regime=regime, alpha=ns.rate)
    prefix = Path(ns.output)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    with open(prefix.with_name(prefix.name + ".csv"), "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(["n", "stat"] + [f"t{i}" for i in range(grid.size)]) + "\n")
        for n, mean, var in zip(result.sizes, result.mean, result.var):
            fh.write(",".join([str(n), "mean"] + [format_number(v) for v in mean.ravel()]) + "\n")
            fh.write(",".join([str(n), "var"] + [format_number(v) for v in var.ravel()]) + "\n")
    write_json({"sizes": result.sizes, "replications": ns.replications, "regime": ns.regime,
                "shape": list(grid.shape), "axis_min": list(grid.mins), "axis_max": list(grid.maxs),
                "normalized": ns.normalize, "seed": ns.seed},
               prefix.with_name(prefix.name + ".json"))
    _write_run(config, _output_dir(prefix))
    return EXIT_OK


def cmd_run(ns, config) -> int:
    try:
        with open(ns.config, encoding="utf-8") as fh:
            replay = RunConfig.from_json(json.load(fh))
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise CLIError(EXIT_USAGE, f"cannot read run configuration {ns.config}: {exc}") from None
    if replay.command == "run":
        raise CLIError(EXIT_USAGE, "a run configuration cannot replay another one")
    return main(replay.to_argv())


# ---------------------------------------------------------------- parser


def _add_builder_flags(p):
    p.add_argument("--type", choices=sorted(INPUT_SUFFIXES), default="points")
    p.add_argument("--builder", choices=["rips", "cech"], default="rips")
    p.add_argument("--max-dim", type=int, default=1)
    p.add_argument("--max-scale", type=float, default=None,
                   help="radius cut-off; Rips values are diameter/2 so they match Cech ball radii "
                        "(default: half the median pairwise distance)")
    p.add_argument("--codensity", action="store_true")
    p.add_argument("--bandwidth", type=float, default=None)
    p.add_argument("--post", choices=["neg", "gauss"], default="neg")
    p.add_argument("--vf", action="append", default=None, help="vertex function: hks:<t>, closeness, attr:<col>")
    p.add_argument("--ef", action="append", default=None, help="edge function: forman, betweenness")
    p.add_argument("--skip-header", action="store_true")


def _add_ecp_flags(p):
    p.add_argument("--bounds", default=None, help="per-axis 'lo,hi' joined by 'x', e.g. 0,1x0,1")
    p.add_argument("--quantiles", default=None, help="percentile pair(s), e.g. 0.1,0.9")
    p.add_argument("--resolution", default="30", help="points per axis, e.g. 30 or 30x30")


def _add_ht_flags(p, with_resolution=True):
    p.add_argument("--kernel", default="exp_pow:4", help="exp_neg, exp_pow:<p>, pow_exp_pow:<p> or cosine")
    p.add_argument("--xi-bounds", default=None, help="per-axis 'lo,hi' joined by 'x'")
    p.add_argument("--quantile", default=None, help="percentile per axis, e.g. 0.5 or 0.5x0.5")
    p.add_argument("--alpha", type=float, default=1.0)
    if with_resolution:
        p.add_argument("--resolution", default="30")


_PARSER_CACHE: dict = {}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="eulerist", description="Euler characteristic profiles and hybrid transforms.")
    parser.add_argument("--version", action="version", version=f"eulerist {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    subs = {}

    p = subs["build"] = sub.add_parser("build", help="build a filtration from points, a graph or a filtration file")
    p.add_argument("input")
    _add_builder_flags(p)
    p.add_argument("--attributes", default=None, help="vertex attribute CSV for graph inputs")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_build)

    p = subs["ecp"] = sub.add_parser("ecp", help="Euler characteristic profile on a grid")
    p.add_argument("filtration")
    _add_ecp_flags(p)
    p.add_argument("-o", "--output", required=True, help="output prefix (<prefix>.csv, <prefix>.json)")
    p.set_defaults(handler=cmd_ecp)

    p = subs["ht"] = sub.add_parser("ht", help="hybrid transform on a dual grid")
    p.add_argument("filtration")
    _add_ht_flags(p)
    p.add_argument("-o", "--output", required=True, help="output prefix (<prefix>.csv, <prefix>.json)")
    p.set_defaults(handler=cmd_ht)

    p = subs["featurize"] = sub.add_parser("featurize", help="one feature row per input of a dataset directory")
    p.add_argument("dataset")
    _add_builder_flags(p)
    p.add_argument("--descriptor", choices=["ecp", "ht"], default="ecp")
    _add_ecp_flags(p)
    _add_ht_flags(p, with_resolution=False)
    p.add_argument("--threads", type=int, default=None, help="worker processes (default: $EULERIST_THREADS or 1)")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_featurize)

    p = subs["distance"] = sub.add_parser("distance", help="distance between two filtrations")
    p.add_argument("a")
    p.add_argument("b")
    p.add_argument("--metric", default="signed-w1", help="signed-w1, l1-window:M or w1-diagram")
    p.add_argument("-o", "--output", default=None)
    p.add_argument("--run-dir", default=".", help="where run.json goes when no --output is given")
    p.set_defaults(handler=cmd_distance)

    p = subs["sample"] = sub.add_parser("sample", help="seeded synthetic point cloud")
    p.add_argument("generator", choices=["orbit", "poisson", "torus", "sphere", "clutter"])
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--rho", type=float, default=4.3)
    p.add_argument("--intensity", type=float, default=100.0)
    p.add_argument("--side", type=float, default=1.0)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--uniform", action="store_true")
    p.add_argument("--phi-scale", type=float, default=1.0)
    p.add_argument("--n-noise", type=int, default=None)
    p.add_argument("--n-line", type=int, default=60)
    p.add_argument("--lines", type=int, choices=[0, 1, 2], default=1)
    p.add_argument("--jitter", type=float, default=0.001)
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_sample)

    p = subs["mc"] = sub.add_parser("mc", help="Monte-Carlo mean/variance of Poisson-cloud Euler curves")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--sizes", default="200,800")
    p.add_argument("--replications", type=int, default=200)
    p.add_argument("--dim", type=int, default=2)
    p.add_argument("--builder", choices=["rips", "cech"], default="rips")
    p.add_argument("--max-dim", type=int, default=2)
    p.add_argument("--max-scale", type=float, default=1.0)
    p.add_argument("--bounds", default="0,1")
    p.add_argument("--resolution", default="20")
    p.add_argument("--regime", choices=["none", "critical", "sparse"], default="critical")
    p.add_argument("--rate", type=float, default=0.5, help="sparse-regime exponent alpha in r_n = n^-alpha")
    p.add_argument("--normalize", action="store_true", help="divide the curve by the point count")
    p.add_argument("-o", "--output", required=True)
    p.set_defaults(handler=cmd_mc)

    p = subs["run"] = sub.add_parser("run", help="replay a run.json")
    p.add_argument("config")
    p.set_defaults(handler=cmd_run)

    _PARSER_CACHE["subs"] = subs
    return parser


def _subparsers() -> dict:
    if "subs" not in _PARSER_CACHE:
        build_parser()
    return _PARSER_CACHE["subs"]


def main(argv=None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    config = RunConfig.from_namespace(ns)
    try:
        return ns.handler(ns, config)
    except CLIError as exc:
        print(f"eulerist: {exc.message}", file=sys.stderr)
        return exc.code
    except ParseError as exc:
        print(f"eulerist: parse error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"eulerist: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FiltrationError as exc:
        print(f"eulerist: invalid filtration: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"eulerist: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
