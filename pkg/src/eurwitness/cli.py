"""``eur-witness`` command line.

Subcommands::

    scenario {hubbard,ghz-werner,w-werner}   sweep a figure scenario, write CSV + manifest
    bound {bipartite,tripartite,gme,mpartite} evaluate one witness on one state
    verify                                    randomised property suite
    shots                                     finite-shot estimate of a witness

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import platform
import sys
import time
from functools import partial
from pathlib import Path

import numpy as np
import scipy

from . import __version__, scenarios, shots, sweeps, verify, witness
from .errors import ConfigError, EurError, NoCrossing
from .measurements import ProjectiveBasis
from .states import DensityState

SCHEMA = 1
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


# parsing helpers

def _names(text: str) -> list[str]:
    names = [n.strip() for n in text.split(",") if n.strip()]
    if not names:
        raise ConfigError("empty basis list")
    return names


def _x_policy(text):
    if text in ("last", None):
        return -1
    if text == "maximize":
        return "maximize"
    try:
        return int(text)
    except (TypeError, ValueError):
        raise ConfigError(f"x-policy must be 'last', 'maximize' or an index, got {text!r}") from None


def _jobs(value) -> int:
    if value is None:
        value = os.environ.get("EUR_WITNESS_JOBS", 1)
    try:
        jobs = int(value)
    except ValueError:
        raise ConfigError(f"invalid job count {value!r}") from None
    return max(1, jobs)


def parse_state(text: str, dims: str | None = None) -> tuple[DensityState, dict]:
    """State from a short spec; returns the state and context for basis lookup."""
    kind, _, arg = text.partition(":")
    if kind in ("ghz-werner", "w-werner"):
        return scenarios.werner_state(scenarios.WernerSpec(kind.split("-")[0], float(arg))), {}
    if kind in ("ghz", "w"):
        n = int(arg or 3)
        ket = scenarios.ghz_ket(n) if kind == "ghz" else scenarios.w_ket(n)
        return DensityState.from_ket(ket, (2,) * n), {}
    if kind == "bell":
        return DensityState.from_ket([1, 0, 0, 1], (2, 2)), {}
    if kind == "hubbard":
        L, J, U = (float(v) for v in arg.split(","))
        spec = scenarios.HubbardSpec(int(L), J, U)
        return scenarios.hubbard_ground_state(spec).state, {"hubbard": spec}
    if kind == "file":
        if not dims:
            raise ConfigError("a state file needs --dims")
        m = np.load(arg)
        return DensityState(m, tuple(int(d) for d in dims.split(","))), {}
    raise ConfigError(f"unknown state spec {text!r}")


def named_basis(name: str, dim: int, context: dict) -> ProjectiveBasis:
    if "hubbard" in context:
        return sweeps.hubbard_bases(context["hubbard"], [name], 0.0)[0]
    if name in ("computational", "site"):
        return ProjectiveBasis(np.eye(dim), name)
    if name == "fourier":
        k = np.arange(dim)
        return ProjectiveBasis(np.exp(2j * np.pi * np.outer(k, k) / dim) / math.sqrt(dim), name)
    if dim == 2:
        return scenarios.qubit_basis(name)
    raise ConfigError(f"basis {name!r} is not available for dimension {dim}")


def _party_bases(rho: DensityState, names: list[str], context: dict) -> dict:
    return {p: [named_basis(n, d, context) for n in names] for p, d in zip(rho.labels, rho.dims)}


# output

def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return v


def write_csv(path: Path, rows: list[dict]) -> None:
    header = list(rows[0])
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(row.get(k, "")) for k in header])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        return f if math.isfinite(f) else str(f)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def write_manifest(path: Path, args: argparse.Namespace, outputs: list[str], wall: float, extra: dict) -> None:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "schema": SCHEMA,
        "command": args.command,
        "config": config,
        "seed": config.get("seed"),
        "versions": {
            "eurwitness": __version__,
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "wall_time_s": wall,
        "outputs": outputs,
        **extra,
    }
    path.write_text(json.dumps(_jsonable(manifest), indent=2) + "\n", encoding="utf-8")


# subcommands

def cmd_scenario(args) -> int:
    t0 = time.perf_counter()
    grid = sweeps.parse_grid(args.grid)
    jobs = _jobs(args.jobs)
    policy = _x_policy(args.x_policy)
    extra = {}
    if args.kind == "hubbard":
        spec = scenarios.HubbardSpec(args.L, args.J, args.U)
        names = _names(args.bases or "site,tilted,tilted-fixed")
        unit = spec.fixed_time if args.time_unit in (None, "tf") else float(args.time_unit)
        rows = sweeps.hubbard_sweep(spec, names, grid, unit, policy, not args.fixed_order, jobs)
        extra["time_unit"] = unit
    else:
        family = args.kind.split("-")[0]
        names = _names(args.bases or "x,z")
        rows = sweeps.werner_sweep(family, names, grid, policy, not args.fixed_order, jobs)
        ps = np.array([r["parameter"] for r in rows])
        vals = np.array([r["bound_state_dependent"] for r in rows])
        try:
            bound = partial(sweeps.werner_bound, family=family, basis_names=names,
                            x_policy=policy, optimize_order=not args.fixed_order)
            th = scenarios.threshold_scan(bound, ps, values=vals) if len(ps) > 1 else None
        except NoCrossing:
            th = None
        if th is not None:
            extra["threshold"] = {"p_star": th.p_star, "monotone": th.monotone, "bracket": list(th.bracket)}
            print(f"threshold p* = {th.p_star:.6f}")
        else:
            extra["threshold"] = None
            print("no zero crossing of the state-dependent bound on this grid")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    csv_path = out / f"{args.kind}.csv"
    write_csv(csv_path, rows)
    manifest_path = out / f"{args.kind}.manifest.json"
    write_manifest(manifest_path, args, [str(csv_path)], time.perf_counter() - t0, extra)
    print(f"wrote {csv_path} ({len(rows)} rows) and {manifest_path}")
    return 0


def cmd_bound(args) -> int:
    rho, ctx = parse_state(args.state, args.dims)
    mode = args.mode
    policy = _x_policy(args.x_policy)
    bases = _party_bases(rho, _names(args.bases), ctx) if args.bases else None
    if mode != "true" and bases is None:
        raise ConfigError(f"mode {mode!r} needs --bases")
    experimental = mode == "experimental"
    kw = dict(experimental=experimental, x_policy=policy, optimize_order=not args.fixed_order)
    if args.kind == "bipartite":
        if mode == "true":
            label = rho.labels[rho.index(args.target)]
            val = witness.true_coherent_informations(rho)[label]
            res = witness.WitnessResult(val, {label: val}, {"mode": "true"})
        else:
            res = witness.bipartite_bound(rho, bases, args.target, state_independent=args.baseline, **kw)
    elif args.kind == "tripartite":
        if mode == "true":
            res = witness.mpartite_bound(rho)
        else:
            res = witness.tripartite_ef3_bound(rho, bases, state_independent=args.baseline, **kw)
    elif args.kind == "gme":
        res = witness.gme_bound(rho, None if mode == "true" else bases, **kw)
    else:
        res = witness.mpartite_bound(rho, None if mode == "true" else bases, **kw)
    print(json.dumps(_jsonable({
        "witness": args.kind,
        "mode": mode,
        "bound_value": res.bound_value,
        "detected": res.detected,
        "per_party_terms": res.per_party_terms,
        "summary": res.summary,
    }), indent=2))
    return 0


def cmd_verify(args) -> int:
    results = verify.run_all(args.trials, args.seed)
    for r in results:
        print(r.line())
    return 0 if all(r.passed for r in results) else EXIT_NUMERIC


def cmd_shots(args) -> int:
    t0 = time.perf_counter()
    rho, ctx = parse_state(args.state, args.dims)
    bases = _party_bases(rho, _names(args.bases or "x,z"), ctx)
    est, exact = shots.simulate_bound(
        rho, bases, args.shots, args.seed, args.witness, _x_policy(args.x_policy),
        not args.fixed_order, args.target, args.resamples, args.miller_madow,
    )
    report = {"witness": args.witness, "shots": args.shots, "estimate": est.value,
              "stderr": est.stderr, "exact": exact, "error": est.value - exact}
    print(json.dumps(_jsonable(report), indent=2))
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / "shots.csv"
        write_csv(csv_path, [{"shots": args.shots, "estimate": est.value, "stderr": est.stderr, "exact": exact}])
        write_manifest(out / "shots.manifest.json", args, [str(csv_path)], time.perf_counter() - t0, {})
    return 0


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults; explicit flags win")

    run = argparse.ArgumentParser(add_help=False)
    run.add_argument("--bases", help="comma-separated basis names per party")
    run.add_argument("--x-policy", default="last", help="referenced basis: last, maximize, or an index")
    run.add_argument("--fixed-order", action="store_true", help="use the X-first ordering instead of the best one")

    parser = argparse.ArgumentParser(prog="eur-witness", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scenario", parents=[common, run], help="sweep a figure scenario")
    p.add_argument("kind", choices=["hubbard", "ghz-werner", "w-werner"])
    p.add_argument("--grid", default="0:1:0.01", help="start:stop:step or comma list")
    p.add_argument("--L", type=int, default=2)
    p.add_argument("--J", type=float, default=1.0)
    p.add_argument("--U", type=float, default=-100.0)
    p.add_argument("--time-unit", default="tf", help="evolution time per unit of the sweep parameter; 'tf' = 0.38 L")
    p.add_argument("--out", default=".")
    p.add_argument("--jobs", default=None)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_scenario)

    p = sub.add_parser("bound", parents=[common, run], help="evaluate one witness")
    p.add_argument("kind", choices=["bipartite", "tripartite", "gme", "mpartite"])
    p.add_argument("--state", required=False, default="ghz-werner:1.0",
                   help="ghz-werner:P, w-werner:P, ghz:N, w:N, bell, hubbard:L,J,U, file:PATH.npy")
    p.add_argument("--dims", help="party dimensions for file states, e.g. 2,2,2")
    p.add_argument("--mode", choices=["true", "exact", "experimental"], default="experimental")
    p.add_argument("--target", default=0, type=int)
    p.add_argument("--baseline", action="store_true", help="use the overlap-only baseline")
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("verify", parents=[common], help="randomised property suite")
    p.add_argument("--trials", type=int, default=500)
    p.add_argument("--seed", type=int, default=7)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("shots", parents=[common, run], help="finite-shot witness estimate")
    p.add_argument("--state", default="ghz-werner:0.9")
    p.add_argument("--dims")
    p.add_argument("--witness", choices=list(shots.WITNESSES), default="tripartite")
    p.add_argument("--shots", type=lambda s: int(float(s)), default=100000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--resamples", type=int, default=200)
    p.add_argument("--miller-madow", action="store_true")
    p.add_argument("--target", default=0, type=int)
    p.add_argument("--out")
    p.set_defaults(func=cmd_shots)
    return parser


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        cfg = json.loads(Path(args.config).read_text(encoding="utf-8"))
    except (OSError, ValueError) as exc:
        raise ConfigError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise ConfigError("config file must hold a JSON object")
    if cfg.pop("schema", SCHEMA) != SCHEMA:
        raise ConfigError(f"unsupported config schema; expected {SCHEMA}")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    unknown = set(cfg) - set(vars(args))
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    # re-parse with the file's values as defaults so explicit flags take precedence
    sub = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
    sub.choices[args.command].set_defaults(**{k: (",".join(v) if isinstance(v, list) else v) for k, v in cfg.items()})
    return parser.parse_args(argv)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = _apply_config(parser, argv)
        return args.func(args)
    except ConfigError as exc:
        print(f"eur-witness: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except EurError as exc:
        print(f"eur-witness: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError) as exc:
        print(f"eur-witness: configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
