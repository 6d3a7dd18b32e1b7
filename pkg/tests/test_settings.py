import pytest

from wguide.errors import ConfigError
from wguide.settings import ENV_CONFIG, Settings, resolve_config_path, validate


def test_validate_rejects_unknown_sections_and_keys():
    validate({"solver": {"mode": "direct"}, "output": None})
    with pytest.raises(ConfigError):
        validate({"plots": {}})
    with pytest.raises(ConfigError):
        validate({"solver": {"mdoe": "direct"}})
    with pytest.raises(ConfigError):
        validate(["solver"])
    with pytest.raises(ConfigError):
        validate({"solver": "direct"})


def test_settings_from_file(config_dict, write_config):
    settings = Settings(config_path=write_config(config_dict))
    assert settings.get("experiment.alpha") == 0.0
    assert settings.get("experiment.regime", "main") == "main"
    assert settings.section("solver")["j_max"] == 10
    assert settings.section("oracle") == {}


def test_settings_from_dict(config_dict):
    settings = Settings.from_dict(config_dict)
    assert settings.get("potential.name") == "box"


def test_missing_and_malformed_files(tmp_path):
    with pytest.raises(ConfigError):
        Settings(config_path=str(tmp_path / "absent.yaml")).load_config()
    broken = tmp_path / "broken.yaml"
    broken.write_text("solver: [unclosed\n", encoding="utf-8")
    with pytest.raises(ConfigError):
        Settings(config_path=str(broken)).load_config()


def test_config_path_from_dotenv(tmp_path, monkeypatch):
    monkeypatch.setenv(ENV_CONFIG, "unset")
    monkeypatch.delenv(ENV_CONFIG)
    monkeypatch.chdir(tmp_path)
    (tmp_path / ".env").write_text(f"{ENV_CONFIG}=custom.yaml\n", encoding="utf-8")
    assert resolve_config_path() == "custom.yaml"


def test_config_path_from_environment(monkeypatch):
    monkeypatch.setenv(ENV_CONFIG, "from_env.yaml")
    assert Settings().config_path == "from_env.yaml"
