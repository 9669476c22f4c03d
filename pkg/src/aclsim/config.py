"""Experiment configuration: a single JSON document plus ``--set key=value`` overrides."""

from __future__ import annotations

import copy
import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path
from typing import Any

from .community import Method
from .diffusion import as_fraction
from .graph import AttributeSchema, GraphError
from .netgen import ConfigError, GeneratorConfig, OpennessMatrix


def default_config_dict() -> dict:
    text = resources.files("aclsim").joinpath("default_config.json").read_text(encoding="utf-8")
    return json.loads(text)


def read_config_dict(path: str | Path | None) -> dict:
    if path is None or str(path) == "default":
        return default_config_dict()
    p = Path(path)
    if not p.is_file():
        raise ConfigError(f"config file not found: {p}")
    try:
        return json.loads(p.read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{p}: line {exc.lineno}: {exc.msg}") from None


def apply_overrides(data: dict, assignments: list[str]) -> dict:
    """Apply ``a.b.c=value`` assignments; values are parsed as JSON when possible."""
    data = copy.deepcopy(data)
    for item in assignments:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        try:
            value = json.loads(raw)
        except json.JSONDecodeError:
            value = raw
        node = data
        parts = key.split(".")
        for part in parts[:-1]:
            if not isinstance(node.get(part), dict):
                raise ConfigError(f"--set {key}: {part!r} is not a section")
            node = node[part]
        node[parts[-1]] = value
    return data


@dataclass
class DiffusionGrid:
    beta: float
    seed_counts: list[int]
    removal_fractions: list[Fraction]
    replications: int
    acl_method: Method
    write_traces: bool = False


@dataclass
class ExperimentConfig:
    master_seed: int
    output_dir: Path
    generator: dict  # raw generator section, turned into GeneratorConfig per condition
    schema: AttributeSchema
    conditions: dict[str, list[tuple[str, str, float]]]
    untrusted: tuple[str, str, int]
    methods: list[Method]
    diffusion: DiffusionGrid
    raw: dict

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        try:
            return cls._parse(data)
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"invalid config: {type(exc).__name__}: {exc}") from None

    @classmethod
    def _parse(cls, data: dict) -> "ExperimentConfig":
        gen = data["generator"]
        schema = AttributeSchema.from_dict(gen["schema"])
        conditions = {
            name: [(a, b, float(lam)) for a, b, lam in triples]
            for name, triples in data["homophilyConditions"].items()
        }
        if not conditions:
            raise ConfigError("homophilyConditions must not be empty")
        u = data["untrusted"]
        untrusted = (u["attribute"], u["value"], int(u["n"]))
        methods = [Method.parse(m) for m in data["methods"]]
        if not methods:
            raise ConfigError("methods must not be empty")
        d = data["diffusion"]
        grid = DiffusionGrid(
            beta=float(d["beta"]),
            seed_counts=[int(s) for s in d["seedCounts"]],
            removal_fractions=[as_fraction(f) for f in d["removalFractions"]],
            replications=int(d["replications"]),
            acl_method=Method.parse(d.get("aclMethod", "LE")),
            write_traces=bool(d.get("writeTraces", False)),
        )
        cfg = cls(
            master_seed=int(data["masterSeed"]),
            output_dir=Path(data.get("outputDir", "out")),
            generator=gen,
            schema=schema,
            conditions=conditions,
            untrusted=untrusted,
            methods=methods,
            diffusion=grid,
            raw=data,
        )
        cfg.validate()
        return cfg

    def validate(self) -> None:
        if not 0 <= self.master_seed < 2**64:
            raise ConfigError("masterSeed must be an unsigned 64-bit integer")
        for name in self.conditions:
            self.generator_config(name, rng_seed=0).validate()
        attr, value, n = self.untrusted
        try:
            if value not in self.schema.values(attr):
                raise ConfigError(f"untrusted value {value!r} not in attribute {attr!r}")
        except GraphError as exc:
            raise ConfigError(str(exc)) from None
        if n < 1:
            raise ConfigError("untrusted.n must be >= 1")
        g = self.diffusion
        if not 0.0 <= g.beta <= 1.0:
            raise ConfigError("diffusion.beta must lie in [0, 1]")
        if not g.seed_counts or not g.removal_fractions:
            raise ConfigError("diffusion grids must not be empty")
        if any(s < 0 for s in g.seed_counts):
            raise ConfigError("seed counts must be >= 0")
        if g.replications < 1:
            raise ConfigError("diffusion.replications must be >= 1")

    def generator_config(self, condition: str, rng_seed: int) -> GeneratorConfig:
        if condition not in self.conditions:
            raise ConfigError(
                f"unknown homophily condition {condition!r}; known: {', '.join(self.conditions)}"
            )
        gen = self.generator
        try:
            openness = OpennessMatrix(
                self.schema,
                [tuple(t) for t in gen.get("openness", [])] + self.conditions[condition],
            )
        except GraphError as exc:
            raise ConfigError(f"condition {condition}: {exc}") from None
        return GeneratorConfig(
            n_nodes=int(gen["nodes"]),
            m=int(gen["m"]),
            m0=int(gen["m0"]) if gen.get("m0") is not None else None,
            internal_edges_per_step=int(gen.get("internalEdgesPerStep", 1)),
            schema=self.schema,
            openness=openness,
            rng_seed=rng_seed,
        )


def load_config(path: str | Path | None = None, overrides: list[str] | None = None) -> ExperimentConfig:
    data = read_config_dict(path)
    if overrides:
        data = apply_overrides(data, overrides)
    return ExperimentConfig.from_dict(data)


def describe(cfg: ExperimentConfig) -> dict[str, Any]:
    return {
        "masterSeed": cfg.master_seed,
        "conditions": list(cfg.conditions),
        "methods": [m.value for m in cfg.methods],
        "grid": len(cfg.conditions) * len(cfg.diffusion.seed_counts) * len(cfg.diffusion.removal_fractions),
        "replications": cfg.diffusion.replications,
    }
