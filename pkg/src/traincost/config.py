"""Configuration ingestion and serialization.

Config files are small YAML documents with one section per subsystem;
key names mirror the parameter table the defaults come from.  Every key
is optional: missing keys fall back to the shipped defaults and each
applied default is recorded in the parsed config's provenance list.
Unknown sections or keys are rejected, with the offending line reported.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from typing import Callable

import yaml

from .cluster_model import ClusterSpec, ResilienceConfig
from .projection import SCENARIOS, GrowthModel, MarketModel, Scenario
from .scaling_laws import CostRates, ScalingConstants


class ConfigError(Exception):
    """Malformed or invalid configuration input."""


@dataclass(frozen=True)
class ClusterTemplate:
    """Per-machine parameters of a cluster, without the GPU count."""

    gpu_mem_gb: float = 80.0
    gpu_mtbf_h: float = 950_000.0
    cpu_mtbf_h: float = 1_500_000.0
    gpus_per_cpu: int = 4
    tf_per_gpu: float = 150.0
    fs_bw_gbs: float = 500.0
    gpus_per_group: int = 512
    cost_per_gpu_h: float = 2.5
    cloud_multiplier: float = 4.8

    def rates(self) -> CostRates:
        return CostRates(
            sustained_flops_per_gpu=self.tf_per_gpu * 1e12,
            dollars_per_gpu_hour=self.cost_per_gpu_h,
            cloud_multiplier=self.cloud_multiplier,
        )

    def cluster_spec(self, n_gpus: int) -> ClusterSpec:
        return ClusterSpec(
            n_gpus=n_gpus,
            gpus_per_cpu=self.gpus_per_cpu,
            gpu_mtbf_h=self.gpu_mtbf_h,
            cpu_mtbf_h=self.cpu_mtbf_h,
            gpu_mem_gb=self.gpu_mem_gb,
            fs_bw_gbs=self.fs_bw_gbs,
            gpus_per_group=self.gpus_per_group,
            rates=self.rates(),
        )


@dataclass(frozen=True)
class ConfigFile:
    """A fully defaulted, validated configuration."""

    cluster: ClusterTemplate = field(default_factory=ClusterTemplate)
    scaling: ScalingConstants = field(default_factory=ScalingConstants)
    resilience: ResilienceConfig = field(default_factory=ResilienceConfig)
    growth: GrowthModel = field(default_factory=GrowthModel)
    scenario: Scenario = field(default_factory=lambda: SCENARIOS["best_guess"])
    market: MarketModel = field(default_factory=MarketModel)
    defaulted: tuple[str, ...] = field(default=(), compare=False)


def _positive(x) -> bool:
    return x > 0


def _non_negative(x) -> bool:
    return x >= 0


def _fraction_half_open(x) -> bool:
    return 0.0 <= x < 1.0


@dataclass(frozen=True)
class _Key:
    name: str
    kind: type  # int, float or str
    check: Callable | None = None
    hint: str = ""


_SCHEMA: dict[str, list[_Key]] = {
    "cluster": [
        _Key("gpu_mem_gb", float, _positive, "> 0"),
        _Key("gpu_mtbf_h", float, _positive, "> 0"),
        _Key("cpu_mtbf_h", float, _positive, "> 0"),
        _Key("gpus_per_cpu", int, lambda x: x >= 1, ">= 1"),
        _Key("tf_per_gpu", float, _positive, "> 0"),
        _Key("fs_bw_gbs", float, _positive, "> 0"),
        _Key("gpus_per_group", int, lambda x: x >= 1, ">= 1"),
        _Key("cost_per_gpu_h", float, _positive, "> 0"),
        _Key("cloud_multiplier", float, _positive, "> 0"),
    ],
    "scaling": [
        _Key("flop_per_token", float, _positive, "> 0"),
        _Key("tokens_per_param", float, _positive, "> 0"),
        _Key("token_scaling", float, lambda x: 1.0 <= x <= 2.5, "in [1.0, 2.5]"),
    ],
    "resilience": [
        _Key("ckpt_mem_fraction", float, lambda x: 0 < x <= 1, "in (0, 1]"),
        _Key("ft_f", int, _non_negative, ">= 0"),
        _Key("ft_g", int, lambda x: x >= 1, ">= 1"),
        _Key("ttr_h", float, _non_negative, ">= 0"),
        _Key("seq_comp", float, _fraction_half_open, "in [0, 1)"),
    ],
    "growth": [
        _Key("base_year", int),
        _Key("base_params", float, _positive, "> 0"),
        _Key("param_growth", float, _positive, "> 0"),
        _Key("gpu_perf_doubling_years", float, _positive, "> 0"),
        _Key("gpu_perf_growth", float, _positive, "> 0"),
        _Key("supercomputer_growth", float, _positive, "> 0"),
        _Key("compute_doubling_months", float, _positive, "> 0"),
    ],
    "scenario": [
        _Key("name", str, lambda x: x in ("best_case", "best_guess", "worst_case", "custom"),
             "one of best_case|best_guess|worst_case|custom"),
        _Key("experts_per_year", float, _non_negative, ">= 0"),
        _Key("flop_per_param", float, _positive, "> 0"),
        _Key("base_experts", int, lambda x: x >= 1, ">= 1"),
        _Key("token_scaling", float, lambda x: 1.0 <= x <= 2.5, "in [1.0, 2.5]"),
    ],
    "market": [
        _Key("gpu_base_usd", float, _positive, "> 0"),
        _Key("gpu_base_growth", float, lambda x: x > -1, "> -1"),
        _Key("it_spend_usd", float, lambda x: x > 0, "> 0"),
        _Key("it_spend_growth", float, lambda x: x > -1, "> -1"),
    ],
}

_GROWTH_FIELD_BY_KEY = {
    "base_year": "base_year",
    "base_params": "base_params",
    "param_growth": "param_growth_per_year",
    "gpu_perf_doubling_years": "gpu_perf_per_dollar_doubling_years",
    "gpu_perf_growth": "gpu_perf_growth_per_year",
    "supercomputer_growth": "supercomputer_growth_per_year",
    "compute_doubling_months": "compute_doubling_months",
}


def _defaults_for(section: str, scenario_name: str) -> dict:
    if section == "cluster":
        template = ClusterTemplate()
        return {f.name: getattr(template, f.name) for f in fields(template)}
    if section == "scaling":
        constants = ScalingConstants()
        return {
            "flop_per_token": constants.flop_per_token,
            "tokens_per_param": constants.tokens_per_param,
            "token_scaling": constants.token_scaling,
        }
    if section == "resilience":
        res = ResilienceConfig()
        return {
            "ckpt_mem_fraction": res.ckpt_mem_fraction,
            "ft_f": res.tolerated_group_failures,
            "ft_g": res.group_count_cap,
            "ttr_h": res.ttr_h,
            "seq_comp": res.seq_fraction,
        }
    if section == "growth":
        growth = GrowthModel()
        return {key: getattr(growth, attr) for key, attr in _GROWTH_FIELD_BY_KEY.items()}
    if section == "scenario":
        preset = SCENARIOS.get(scenario_name, SCENARIOS["best_guess"])
        return {
            "name": scenario_name,
            "experts_per_year": preset.experts_per_year,
            "flop_per_param": preset.flop_per_param_with_tokens,
            "base_experts": preset.base_experts,
            "token_scaling": preset.token_scaling,
        }
    if section == "market":
        market = MarketModel()
        return {
            "gpu_base_usd": market.gpu_installed_base_usd,
            "gpu_base_growth": market.gpu_installed_base_growth,
            "it_spend_usd": market.it_spend_usd,
            "it_spend_growth": market.it_spend_growth,
        }
    raise AssertionError(section)


def _coerce(raw: str, key: _Key, path: str, line: int):
    if key.kind is str:
        return raw
    text = raw
    if text.lstrip("+-").startswith("."):  # YAML spellings .inf / .nan
        text = text.replace(".inf", "inf").replace(".nan", "nan")
    try:
        value = float(text)
    except ValueError:
        raise ConfigError(f"{path}: expected a number, got {raw!r} (line {line})")
    if not math.isfinite(value) and key.kind is int:
        raise ConfigError(f"{path}: expected an integer, got {raw!r} (line {line})")
    if key.kind is int:
        if value != int(value):
            raise ConfigError(f"{path}: expected an integer, got {raw!r} (line {line})")
        return int(value)
    return value


def _scan(text: str) -> dict[str, dict[str, tuple[str, int]]]:
    """Raw (section, key) -> (scalar string, line) mapping with line numbers."""
    try:
        root = yaml.compose(text, Loader=yaml.SafeLoader)
    except yaml.YAMLError as exc:
        raise ConfigError(f"malformed config: {exc}")
    if root is None:
        return {}
    if not isinstance(root, yaml.MappingNode):
        raise ConfigError("config must be a mapping of sections")
    out: dict[str, dict[str, tuple[str, int]]] = {}
    for section_node, body_node in root.value:
        section = str(section_node.value)
        line = section_node.start_mark.line + 1
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section {section!r} (line {line})")
        if not isinstance(body_node, yaml.MappingNode):
            if isinstance(body_node, yaml.ScalarNode) and body_node.value == "":
                out.setdefault(section, {})
                continue
            raise ConfigError(f"section {section!r} must be a mapping (line {line})")
        known = {key.name for key in _SCHEMA[section]}
        entries = out.setdefault(section, {})
        for key_node, value_node in body_node.value:
            key_name = str(key_node.value)
            key_line = key_node.start_mark.line + 1
            if key_name not in known:
                raise ConfigError(
                    f"unknown key {section}.{key_name!r} (line {key_line})"
                )
            if not isinstance(value_node, yaml.ScalarNode):
                raise ConfigError(
                    f"{section}.{key_name}: expected a scalar (line {key_line})"
                )
            if key_name in entries:
                raise ConfigError(
                    f"duplicate key {section}.{key_name!r} (line {key_line})"
                )
            entries[key_name] = (value_node.value, key_line)
    return out


def parse_config(text: str) -> ConfigFile:
    """Parse and validate a config document; empty input means all defaults."""
    raw = _scan(text)

    scenario_name = "best_guess"
    if "scenario" in raw and "name" in raw["scenario"]:
        scenario_name = raw["scenario"]["name"][0]

    values: dict[str, dict] = {}
    defaulted: list[str] = []
    for section, keys in _SCHEMA.items():
        defaults = _defaults_for(section, scenario_name)
        section_raw = raw.get(section, {})
        section_values = {}
        for key in keys:
            path = f"{section}.{key.name}"
            if key.name in section_raw:
                raw_value, line = section_raw[key.name]
                value = _coerce(raw_value, key, path, line)
                if key.check is not None and not key.check(value):
                    raise ConfigError(
                        f"{path}: value {raw_value!r} out of range, must be {key.hint} (line {line})"
                    )
                section_values[key.name] = value
            else:
                section_values[key.name] = defaults[key.name]
                defaulted.append(path)
        values[section] = section_values

    res = values["resilience"]
    if res["ft_f"] >= res["ft_g"]:
        line = raw.get("resilience", {}).get("ft_f", ("", 0))[1]
        where = f" (line {line})" if line else ""
        raise ConfigError(f"resilience.ft_f: must be < resilience.ft_g{where}")

    try:
        return ConfigFile(
            cluster=ClusterTemplate(**values["cluster"]),
            scaling=ScalingConstants(**values["scaling"]),
            resilience=ResilienceConfig(
                ckpt_mem_fraction=res["ckpt_mem_fraction"],
                tolerated_group_failures=res["ft_f"],
                group_count_cap=res["ft_g"],
                ttr_h=res["ttr_h"],
                seq_fraction=res["seq_comp"],
            ),
            growth=GrowthModel(
                **{attr: values["growth"][key] for key, attr in _GROWTH_FIELD_BY_KEY.items()}
            ),
            scenario=Scenario(
                name=values["scenario"]["name"],
                experts_per_year=values["scenario"]["experts_per_year"],
                flop_per_param_with_tokens=values["scenario"]["flop_per_param"],
                base_experts=values["scenario"]["base_experts"],
                token_scaling=values["scenario"]["token_scaling"],
            ),
            market=MarketModel(
                gpu_installed_base_usd=values["market"]["gpu_base_usd"],
                gpu_installed_base_growth=values["market"]["gpu_base_growth"],
                it_spend_usd=values["market"]["it_spend_usd"],
                it_spend_growth=values["market"]["it_spend_growth"],
            ),
            defaulted=tuple(defaulted),
        )
    except ValueError as exc:
        raise ConfigError(str(exc))


def load_config(path: str) -> ConfigFile:
    with open(path, "r", encoding="utf-8") as handle:
        return parse_config(handle.read())


def _format_value(value) -> str:
    if isinstance(value, bool):
        raise AssertionError("no boolean config values")
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        return repr(value)
    return str(value)


def serialize(config: ConfigFile) -> str:
    """Render a config with every key explicit; parse(serialize(c)) == c."""
    sections = {
        "cluster": {
            f.name: getattr(config.cluster, f.name) for f in fields(config.cluster)
        },
        "scaling": {
            "flop_per_token": config.scaling.flop_per_token,
            "tokens_per_param": config.scaling.tokens_per_param,
            "token_scaling": config.scaling.token_scaling,
        },
        "resilience": {
            "ckpt_mem_fraction": config.resilience.ckpt_mem_fraction,
            "ft_f": config.resilience.tolerated_group_failures,
            "ft_g": config.resilience.group_count_cap,
            "ttr_h": config.resilience.ttr_h,
            "seq_comp": config.resilience.seq_fraction,
        },
        "growth": {
            key: getattr(config.growth, attr)
            for key, attr in _GROWTH_FIELD_BY_KEY.items()
        },
        "scenario": {
            "name": config.scenario.name,
            "experts_per_year": config.scenario.experts_per_year,
            "flop_per_param": config.scenario.flop_per_param_with_tokens,
            "base_experts": config.scenario.base_experts,
            "token_scaling": config.scenario.token_scaling,
        },
        "market": {
            "gpu_base_usd": config.market.gpu_installed_base_usd,
            "gpu_base_growth": config.market.gpu_installed_base_growth,
            "it_spend_usd": config.market.it_spend_usd,
            "it_spend_growth": config.market.it_spend_growth,
        },
    }
    lines = []
    for section in _SCHEMA:
        lines.append(f"{section}:")
        for key in _SCHEMA[section]:
            lines.append(f"  {key.name}: {_format_value(sections[section][key.name])}")
    return "\n".join(lines) + "\n"
