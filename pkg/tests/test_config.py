"""Tests for GdtlConfig presets, validation and environment overrides."""

import pytest

from gdtl.config import FUEL_ENV_VAR, GdtlConfig


class TestPresets:
    def test_default_budgets(self):
        config = GdtlConfig.default()
        assert config.fuel == 100_000
        assert config.norm_fuel == 10_000

    def test_quick_is_smaller(self):
        quick, default = GdtlConfig.quick(), GdtlConfig.default()
        assert quick.fuel < default.fuel
        assert quick.norm_fuel < default.norm_fuel

    def test_thorough_is_larger(self):
        assert GdtlConfig.thorough().fuel > GdtlConfig.default().fuel


class TestValidation:
    @pytest.mark.parametrize("name", ["fuel", "norm_fuel", "property_fuel", "stutter"])
    def test_budgets_may_be_zero(self, name):
        assert getattr(GdtlConfig(**{name: 0}), name) == 0
        with pytest.raises(ValueError, match=f"{name} must be non-negative"):
            GdtlConfig(**{name: -1})

    @pytest.mark.parametrize("name", ["gen_size", "max_retries"])
    def test_sizes_must_be_positive(self, name):
        with pytest.raises(ValueError, match=f"{name} must be at least 1"):
            GdtlConfig(**{name: 0})

    def test_unknown_rate_is_a_probability(self):
        with pytest.raises(ValueError, match="unknown_rate"):
            GdtlConfig(unknown_rate=1.5)


class TestEnvironment:
    def test_fuel_override(self):
        assert GdtlConfig.from_env({FUEL_ENV_VAR: "250"}).fuel == 250

    def test_empty_environment(self):
        assert GdtlConfig.from_env({}) == GdtlConfig.default()

    def test_base_kept(self):
        base = GdtlConfig.quick()
        config = GdtlConfig.from_env({FUEL_ENV_VAR: "7"}, base)
        assert config.fuel == 7
        assert config.norm_fuel == base.norm_fuel
        assert base.fuel == 10_000

    def test_not_an_integer(self):
        with pytest.raises(ValueError, match="GDTL_FUEL must be an integer"):
            GdtlConfig.from_env({FUEL_ENV_VAR: "many"})

    def test_zero_allowed(self):
        assert GdtlConfig.from_env({FUEL_ENV_VAR: "0"}).fuel == 0

    def test_negative_rejected(self):
        with pytest.raises(ValueError, match="fuel must be non-negative"):
            GdtlConfig.from_env({FUEL_ENV_VAR: "-3"})


class TestSerialization:
    def test_dict_round_trip(self):
        config = GdtlConfig(fuel=42, stutter=1, unicode_evidence=False)
        assert GdtlConfig.from_dict(config.to_dict()) == config

    def test_unknown_keys_ignored(self):
        assert GdtlConfig.from_dict({"fuel": 9, "learning_rate": 0.1}).fuel == 9
