import pytest
from hypothesis import given, settings, strategies as st

from traincost.config import (
    ClusterTemplate,
    ConfigError,
    ConfigFile,
    parse_config,
    serialize,
)
from traincost.projection import SCENARIOS


def total_keys():
    from traincost.config import _SCHEMA

    return sum(len(keys) for keys in _SCHEMA.values())


class TestDefaults:
    def test_empty_document_gives_all_defaults(self):
        config = parse_config("")
        assert config == ConfigFile()
        assert len(config.defaulted) == total_keys()
        assert "cluster.gpu_mtbf_h" in config.defaulted

    def test_whitespace_only_document(self):
        assert parse_config("\n\n") == ConfigFile()

    def test_explicit_keys_not_in_provenance(self):
        config = parse_config("cluster:\n  gpu_mtbf_h: 500000\n")
        assert "cluster.gpu_mtbf_h" not in config.defaulted
        assert config.cluster.gpu_mtbf_h == 500000.0
        assert len(config.defaulted) == total_keys() - 1


class TestValidation:
    def test_negative_mtbf_names_key_and_line(self):
        with pytest.raises(ConfigError) as err:
            parse_config("cluster:\n  gpu_mtbf_h: -5\n")
        assert "gpu_mtbf_h" in str(err.value)
        assert "line 2" in str(err.value)

    def test_unknown_key_rejected(self):
        with pytest.raises(ConfigError) as err:
            parse_config("cluster:\n  warp_drive: 9\n")
        assert "warp_drive" in str(err.value)
        assert "line 2" in str(err.value)

    def test_unknown_section_rejected(self):
        with pytest.raises(ConfigError) as err:
            parse_config("nonsense:\n  a: 1\n")
        assert "nonsense" in str(err.value)

    def test_malformed_yaml(self):
        with pytest.raises(ConfigError) as err:
            parse_config("cluster:\n  - a\n - b\n")
        assert "malformed" in str(err.value) or "mapping" in str(err.value)

    def test_non_scalar_value_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("cluster:\n  gpu_mem_gb: [1, 2]\n")

    def test_duplicate_key_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("cluster:\n  gpu_mem_gb: 80\n  gpu_mem_gb: 90\n")

    def test_integer_keys_reject_fractions(self):
        with pytest.raises(ConfigError) as err:
            parse_config("cluster:\n  gpus_per_group: 512.5\n")
        assert "gpus_per_group" in str(err.value)

    def test_integer_valued_floats_accepted(self):
        config = parse_config("cluster:\n  gpus_per_group: 512.0\n")
        assert config.cluster.gpus_per_group == 512

    def test_non_numeric_rejected(self):
        with pytest.raises(ConfigError):
            parse_config("cluster:\n  gpu_mem_gb: plenty\n")

    def test_yaml_inf_spelling_accepted(self):
        config = parse_config("cluster:\n  gpu_mtbf_h: .inf\n")
        assert config.cluster.gpu_mtbf_h == float("inf")
        assert parse_config(serialize(config)) == config

    def test_nan_rejected_by_range_check(self):
        with pytest.raises(ConfigError):
            parse_config("cluster:\n  gpu_mtbf_h: .nan\n")

    def test_ft_f_must_be_below_ft_g(self):
        with pytest.raises(ConfigError) as err:
            parse_config("resilience:\n  ft_f: 100\n  ft_g: 100\n")
        assert "ft_f" in str(err.value)

    def test_fraction_bounds(self):
        with pytest.raises(ConfigError):
            parse_config("resilience:\n  ckpt_mem_fraction: 0\n")
        with pytest.raises(ConfigError):
            parse_config("resilience:\n  seq_comp: 1.0\n")


class TestResilienceMapping:
    def test_k_out_of_n_keys(self):
        config = parse_config("resilience:\n  ft_f: 5\n  ft_g: 100\n")
        assert config.resilience.tolerated_group_failures == 5
        assert config.resilience.group_count_cap == 100


class TestScenarioPresets:
    def test_best_case_preset_fills_defaults(self):
        config = parse_config("scenario:\n  name: best_case\n")
        assert config.scenario == SCENARIOS["best_case"]

    def test_explicit_value_overrides_preset(self):
        config = parse_config(
            "scenario:\n  name: best_case\n  flop_per_param: 33\n"
        )
        assert config.scenario.flop_per_param_with_tokens == 33.0
        assert config.scenario.experts_per_year == 8.0

    def test_custom_scenario(self):
        config = parse_config(
            "scenario:\n  name: custom\n  experts_per_year: 2\n  base_experts: 4\n"
        )
        assert config.scenario.name == "custom"
        assert config.scenario.base_experts == 4

    def test_unknown_scenario_name(self):
        with pytest.raises(ConfigError):
            parse_config("scenario:\n  name: utopia\n")


class TestRoundTrip:
    def test_default_round_trip(self):
        config = ConfigFile()
        assert parse_config(serialize(config)) == config

    def test_round_trip_preserves_every_field(self):
        text = (
            "cluster:\n  gpu_mem_gb: 96\n  tf_per_gpu: 312.5\n"
            "scaling:\n  token_scaling: 1.91\n"
            "resilience:\n  ft_f: 3\n  ttr_h: 0.25\n"
            "growth:\n  param_growth: 1.25\n"
            "scenario:\n  name: worst_case\n"
            "market:\n  gpu_base_growth: 0.19\n"
        )
        config = parse_config(text)
        assert parse_config(serialize(config)) == config

    def test_serialized_defaults_match_empty_parse(self):
        assert parse_config(serialize(ConfigFile())) == parse_config("")

    def test_serialization_is_deterministic(self):
        assert serialize(ConfigFile()) == serialize(ConfigFile())


def config_strategy():
    return st.builds(
        lambda mem, mtbf, frac, f, ttr, growth_rate, anchor: (
            f"cluster:\n  gpu_mem_gb: {mem}\n  gpu_mtbf_h: {mtbf}\n"
            f"resilience:\n  ckpt_mem_fraction: {frac}\n  ft_f: {f}\n  ttr_h: {ttr}\n"
            f"growth:\n  param_growth: {growth_rate}\n"
            f"market:\n  gpu_base_usd: {anchor}\n"
        ),
        st.floats(min_value=1.0, max_value=1e4),
        st.floats(min_value=1.0, max_value=1e9),
        st.floats(min_value=1e-3, max_value=1.0, exclude_min=True),
        st.integers(min_value=0, max_value=99),
        st.floats(min_value=0.0, max_value=100.0),
        st.floats(min_value=1e-3, max_value=10.0),
        st.floats(min_value=1e6, max_value=1e15),
    )


@settings(max_examples=20, deadline=None)
@given(config_strategy())
def test_round_trip_property(text):
    config = parse_config(text)
    again = parse_config(serialize(config))
    assert again == config


def test_cluster_template_builds_spec():
    template = ClusterTemplate(tf_per_gpu=150.0, cost_per_gpu_h=2.5)
    spec = template.cluster_spec(50_000)
    assert spec.n_gpus == 50_000
    assert spec.rates.sustained_flops_per_gpu == 150e12
    assert spec.rates.dollars_per_gpu_hour == 2.5
