"""Command-line entry point: ``aclsim <subcommand> [options]``."""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import rng as rngmod
from .acl import predict_acl, save_acl
from .community import Method, detect, load_cover, save_cover
from .config import ExperimentConfig, describe, load_config
from .diffusion import run_diffusion
from .graph import GraphError, export_dot, export_graphml, load_graph, save_graph
from .harness import (
    SIM2_FIELDS,
    _outcome_fields,
    condition_key,
    fmt,
    network_for,
    run_simulation1,
    run_simulation2,
    write_csv,
    write_sim1,
    write_sim2,
)
from .netgen import ConfigError

log = logging.getLogger("aclsim")


class CliError(Exception):
    pass


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="config JSON path, or 'default' (shipped config)")
    p.add_argument("--seed", type=int, default=None, help="master seed (unsigned 64-bit)")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("--jobs", type=int, default=1, help="worker processes")
    p.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override a config entry, e.g. diffusion.replications=10")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="aclsim",
        description="Simulate ego-networks, predict ACLs by community detection, and test them under diffusion.",
    )
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate-config", help="check a config file and exit")
    _common(p)

    p = sub.add_parser("generate", help="generate one network per homophily condition")
    _common(p)
    p.add_argument("--condition", action="append", help="condition name (repeatable; default all)")
    p.add_argument("--export", choices=["graphml", "dot"], action="append", default=[],
                   help="also write a GraphML or DOT export")

    p = sub.add_parser("detect", help="detect communities in a graph file")
    _common(p)
    p.add_argument("--graph", required=True)
    p.add_argument("--method", required=True, choices=[m.value for m in Method])
    p.add_argument("--name", help="label used in output file names (default: from graph file name)")

    p = sub.add_parser("acl", help="predict and score an ACL from a graph and a cover")
    _common(p)
    p.add_argument("--graph", required=True)
    p.add_argument("--cover", help="cover JSON (default: detect with --method)")
    p.add_argument("--method", choices=[m.value for m in Method], default="LE")
    p.add_argument("--name")

    p = sub.add_parser("diffuse", help="run the diffusion grid on one graph and ACL")
    _common(p)
    p.add_argument("--graph", required=True)
    p.add_argument("--acl", required=True, help="ACL JSON written by the acl subcommand")
    p.add_argument("--name")

    p = sub.add_parser("sim1", help="ACL generation under every homophily condition and method")
    _common(p)

    p = sub.add_parser("sim2", help="factorial diffusion experiment")
    _common(p)
    return parser


def _config(args) -> ExperimentConfig:
    overrides = list(args.set)
    if args.seed is not None:
        overrides.append(f"masterSeed={args.seed}")
    if args.out is not None:
        overrides.append(f"outputDir={args.out}")
    return load_config(args.config, overrides)


def _out_dir(cfg: ExperimentConfig) -> Path:
    out = cfg.output_dir
    try:
        out.mkdir(parents=True, exist_ok=True)
        probe = out / ".write-test"
        probe.write_text("")
        probe.unlink()
    except OSError as exc:
        raise CliError(f"output directory {out} is not writable: {exc}") from None
    return out


def _name(args, path: str) -> str:
    if args.name:
        return args.name
    stem = Path(path).stem
    return stem[len("graph_"):] if stem.startswith("graph_") else stem


def cmd_validate(args) -> None:
    cfg = _config(args)
    print(f"config ok: {describe(cfg)}")


def cmd_generate(args) -> None:
    cfg = _config(args)
    out = _out_dir(cfg)
    for cond in args.condition or list(cfg.conditions):
        g = network_for(cfg, cond)
        path = out / f"graph_{cond}.json"
        save_graph(g, path)
        if "graphml" in args.export:
            export_graphml(g, out / f"graph_{cond}.graphml")
        if "dot" in args.export:
            export_dot(g, out / f"graph_{cond}.dot")
        print(f"{cond}: nodes={len(g)} edges={g.number_of_edges()} -> {path}")


def cmd_detect(args) -> None:
    cfg = _config(args)
    out = _out_dir(cfg)
    g = load_graph(args.graph)
    cover = detect(g, args.method)
    path = out / f"cover_{_name(args, args.graph)}_{cover.method.value}.json"
    save_cover(cover, path)
    print(f"{cover.method.value}: clusters={len(cover)} overlapping={cover.overlapping} -> {path}")


def cmd_acl(args) -> None:
    cfg = _config(args)
    out = _out_dir(cfg)
    g = load_graph(args.graph)
    cover = load_cover(args.cover) if args.cover else detect(g, args.method)
    attr, value, n = cfg.untrusted
    pred = predict_acl(g, cover, attr, value, n)
    method = pred.method or args.method
    path = out / f"acl_{_name(args, args.graph)}_{method}.json"
    save_acl(pred, path)
    print(
        f"{method}: clusters={pred.cluster_count} aclSize={len(pred.acl)} "
        f"precision={fmt(pred.precision)} recall={fmt(pred.recall)} f1={fmt(pred.f1)} -> {path}"
    )


def cmd_diffuse(args) -> None:
    import json

    cfg = _config(args)
    out = _out_dir(cfg)
    g = load_graph(args.graph)
    acl_doc = json.loads(Path(args.acl).read_text(encoding="utf-8"))
    acl = frozenset(acl_doc["acl"])
    name = _name(args, args.graph)
    grid = cfg.diffusion
    rows = []
    for s in grid.seed_counts:
        for frac in grid.removal_fractions:
            for r in range(grid.replications):
                stream = rngmod.stream(
                    cfg.master_seed, rngmod.DIFFUSION, condition_key(name), s,
                    frac.numerator, frac.denominator, r,
                )
                res = run_diffusion(g, acl, s, frac, grid.beta, stream)
                row = {
                    "masterSeed": cfg.master_seed, "homophilyConfig": name,
                    "method": acl_doc.get("method") or "", "seedCount": s,
                    "removalFraction": fmt(float(frac)), "replicate": r,
                }
                row.update(_outcome_fields(res))
                rows.append(row)
                print(
                    f"s={s} k={frac} r={r}: infectedAcl={row['infectedAclCount']}/{row['aclSize']} "
                    f"fraction={row['infectedAclFraction']}"
                )
    path = out / f"diffuse_{name}.csv"
    write_csv(path, rows, SIM2_FIELDS)
    print(f"{len(rows)} rows -> {path}")


def cmd_sim1(args) -> None:
    cfg = _config(args)
    out = _out_dir(cfg)
    res = run_simulation1(cfg, jobs=args.jobs)
    write_sim1(out, res)
    for row in res.rows:
        if row["error"]:
            print(f"{row['condition']} {row['method']}: ERROR {row['error']}")
        else:
            print(
                f"{row['condition']} {row['method']}: clusters={row['clusterCount']} "
                f"aclSize={row['aclSize']} precision={row['precision']} "
                f"recall={row['recall']} f1={row['f1']}"
            )
    print(f"{len(res.rows)} rows -> {out / 'sim1.csv'}")


def cmd_sim2(args) -> None:
    cfg = _config(args)
    out = _out_dir(cfg)
    res = run_simulation2(cfg, jobs=args.jobs)
    write_sim2(out, res)
    for row in res.summary:
        print(
            f"{row['homophilyConfig']} s={row['seedCount']} k={row['removalFraction']}: "
            f"n={row['n']} mean={row['meanInfectedAclFraction']} sd={row['stdInfectedAclFraction']}"
        )
    errors = sum(1 for r in res.rows if r["error"])
    print(f"{len(res.rows)} rows ({errors} errors) -> {out / 'sim2.csv'}")


COMMANDS = {
    "validate-config": cmd_validate,
    "generate": cmd_generate,
    "detect": cmd_detect,
    "acl": cmd_acl,
    "diffuse": cmd_diffuse,
    "sim1": cmd_sim1,
    "sim2": cmd_sim2,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    if args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        COMMANDS[args.command](args)
    except (ConfigError, GraphError, CliError, ValueError, OSError) as exc:
        print(f"aclsim {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
