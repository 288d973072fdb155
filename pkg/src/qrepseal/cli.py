"""Command-line entry point: ``qrepseal run | verify-all | list-builtins | describe``."""

from __future__ import annotations

import argparse
import inspect
import json
import sys

from . import device as dv
from .config import ScenarioConfig, from_complex, load_config
from .errors import ConfigError, QRepSealError
from .frontier import BUILTIN_FAMILIES
from .runner import EXIT_ERROR, dumps_report, run, write_outputs
from .seal import BUILTIN_SEALS

BUILTIN_SCENARIOS = {
    "paper-table": {"scenario": "paper-table"},
    "verify-all": {"scenario": "verify-all"},
    "weak-frontier": {"scenario": "frontier", "frontier": [{"family": "weak_family", "grid": 101}]},
    "region": {"scenario": "frontier", "frontier": [
        {"family": "weak_family", "grid": 101}, {"family": "breidbart_angle", "grid": 101}]},
}


def _u64(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must fit in an unsigned 64-bit integer")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _add_common(p: argparse.ArgumentParser):
    p.add_argument("--seed", type=_u64, help="RNG seed (u64)")
    p.add_argument("--samples", type=_positive_int, help="Monte Carlo sample count")
    p.add_argument("--workers", type=_positive_int, help="Monte Carlo worker streams")
    p.add_argument("--out", help="directory for report files (default: print JSON to stdout)")
    p.add_argument("--tol-exact", type=float, help="tolerance for closed-form comparisons")
    p.add_argument("--tol-mc", type=float, help="absolute tolerance for Monte Carlo comparisons "
                                                "(default: 4 standard errors)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qrepseal", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a scenario config")
    src = p_run.add_mutually_exclusive_group(required=True)
    src.add_argument("--config", help="path to a JSON scenario config")
    src.add_argument("--scenario", choices=sorted(BUILTIN_SCENARIOS), help="built-in scenario")
    _add_common(p_run)

    p_ver = sub.add_parser("verify-all", help="reproduce every headline number")
    _add_common(p_ver)

    sub.add_parser("list-builtins", help="list built-in devices, encodings, seals, families, scenarios")

    p_desc = sub.add_parser("describe", help="describe one built-in")
    p_desc.add_argument("name")
    return parser


def apply_overrides(cfg: ScenarioConfig, args) -> ScenarioConfig:
    sampling = {k: v for k, v in (("seed", args.seed), ("n", args.samples), ("workers", args.workers))
                if v is not None}
    tols = {k: v for k, v in (("exact", args.tol_exact), ("mc", args.tol_mc)) if v is not None}
    data = cfg.model_dump()
    data["sampling"].update(sampling)
    data["tolerances"].update(tols)
    if args.out is not None:
        data["output"]["dir"] = args.out
    return ScenarioConfig.model_validate(data)


def _catalogue() -> dict:
    return {
        "devices": sorted(dv.BUILTIN_DEVICES),
        "encodings": sorted(dv.BUILTIN_ENCODINGS),
        "seals": sorted(BUILTIN_SEALS),
        "families": sorted(BUILTIN_FAMILIES),
        "scenarios": sorted(BUILTIN_SCENARIOS),
    }


def describe(name: str) -> dict:
    if name in dv.BUILTIN_DEVICES:
        factory = dv.BUILTIN_DEVICES[name]
        dev = factory(0.0) if name == "weak_family" else factory()
        return {
            "name": name, "type": "device", "doc": inspect.getdoc(factory),
            "signature": str(inspect.signature(factory)), "default": {
                "dim": dev.dim, "kind": dev.kind.value,
                "kraus": [{"label": lab, "matrix": from_complex(m)} for lab, m in dev.instrument.items()],
            },
        }
    if name in dv.BUILTIN_ENCODINGS:
        factory = dv.BUILTIN_ENCODINGS[name]
        enc = factory()
        return {"name": name, "type": "encoding", "doc": inspect.getdoc(factory),
                "table": [[{"state": from_complex(s.amplitudes), "prob": p} for s, p in row] for row in enc.table],
                "prior": list(enc.prior)}
    if name in BUILTIN_SEALS:
        factory = BUILTIN_SEALS[name]
        p = factory()
        return {"name": name, "type": "seal", "doc": inspect.getdoc(factory),
                "dim_alice": p.dim_alice, "dim_bob": p.dim_bob,
                "encodings": [[{"state": from_complex(s.amplitudes), "weight": w} for s, w in rows]
                              for rows in p.family],
                "decode_map": {str(k): v for k, v in p.decode_map.items()}}
    if name in BUILTIN_FAMILIES:
        fam = BUILTIN_FAMILIES[name]()
        return {"name": name, "type": "family", "doc": inspect.getdoc(BUILTIN_FAMILIES[name]),
                "kind": fam.kind.value, "d": fam.d,
                "params": [{"name": p.name, "lo": p.lo, "hi": p.hi} for p in fam.params]}
    if name in BUILTIN_SCENARIOS:
        return {"name": name, "type": "scenario", "config": BUILTIN_SCENARIOS[name]}
    raise ConfigError(f"unknown built-in {name!r}")


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list-builtins":
            print(json.dumps(_catalogue(), indent=2))
            return 0
        if args.command == "describe":
            print(json.dumps(describe(args.name), indent=2))
            return 0
        if args.command == "verify-all":
            cfg = ScenarioConfig.model_validate(BUILTIN_SCENARIOS["verify-all"])
        elif args.config:
            cfg = load_config(args.config)
        else:
            cfg = ScenarioConfig.model_validate(BUILTIN_SCENARIOS[args.scenario])
        cfg = apply_overrides(cfg, args)
        result = run(cfg)
    except ConfigError as exc:
        print(f"config error:\n{exc}", file=sys.stderr)
        return EXIT_ERROR
    except (QRepSealError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR

    for line in result.lines:
        print(line)
    if cfg.output.dir:
        for path in write_outputs(result, cfg.output.dir, cfg.output.stem):
            print(f"wrote {path}", file=sys.stderr)
    elif not result.lines:
        sys.stdout.write(dumps_report(result.report))
    return result.exit_code


if __name__ == "__main__":
    sys.exit(main())
