"""
Unit tests for settings and RunConfig.

Core claims:
    - Stored text is coerced back to the type of the default
    - Environment overrides win over stored values
    - save/load/reset round through the sqlite store in the app home
    - RunConfig rejects small or composite primes and bad counts
"""

import os

import pytest

from hermite_staircase.settings import (
    ConfigError,
    RunConfig,
    coerce,
    database_file,
    get_default_settings,
    load_settings,
    reset_settings,
    save_settings,
)


# -- Helpers -----------------------------------------------------------------

@pytest.fixture(autouse=True)
def home(tmp_path, monkeypatch):
    monkeypatch.setenv("HERMITE_STAIRCASE_HOME", str(tmp_path))
    for key in get_default_settings():
        monkeypatch.delenv("HERMITE_STAIRCASE_" + key.upper(), raising=False)
    return tmp_path


# == 1. Coercion ============================================================

class TestCoerce:
    def test_int(self):
        assert coerce("12", 8) == 12

    def test_str(self):
        assert coerce("json", "text") == "json"

    def test_missing_value(self):
        assert coerce(None, 8) == 8

    def test_unusable_value_falls_back(self):
        assert coerce("many", 8) == 8
        assert coerce("2.5", 8) == 8


# == 2. The store ===========================================================

class TestStore:
    def test_defaults_without_database(self, home):
        assert load_settings() == get_default_settings()
        assert not os.path.exists(database_file())

    def test_save_and_load(self, home):
        save_settings({"trials": 3, "format": "csv"})
        assert database_file().startswith(str(home))
        settings = load_settings()
        assert settings["trials"] == 3
        assert settings["format"] == "csv"
        assert settings["seed"] == 20240601

    def test_env_override(self, monkeypatch):
        save_settings({"trials": 3})
        monkeypatch.setenv("HERMITE_STAIRCASE_TRIALS", "5")
        assert load_settings()["trials"] == 5
        assert load_settings(use_env=False)["trials"] == 3

    def test_reset(self):
        save_settings({"jobs": 4})
        reset_settings()
        assert load_settings()["jobs"] == 1


# == 3. RunConfig ===========================================================

class TestRunConfig:
    def test_from_defaults(self):
        config = RunConfig.from_settings(get_default_settings())
        assert config == RunConfig()
        assert config.full is False

    def test_small_prime(self):
        with pytest.raises(ConfigError):
            RunConfig(prime=101)

    def test_composite(self):
        with pytest.raises(ConfigError):
            RunConfig(prime=2 ** 61 + 1)

    def test_smallest_accepted_prime(self):
        assert RunConfig(prime=2147483659).prime == 2147483659

    @pytest.mark.parametrize("field", ["trials", "jobs", "budget"])
    def test_non_positive(self, field):
        with pytest.raises(ConfigError):
            RunConfig(**{field: 0})

    def test_format(self):
        with pytest.raises(ConfigError):
            RunConfig(output_format="xml")

    def test_probe(self):
        probe = RunConfig(trials=9).probe()
        assert probe.trials == 2
        assert probe.exact_threshold == 0
        assert probe.prime == RunConfig().prime
