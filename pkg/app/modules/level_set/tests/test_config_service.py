import pytest

from app.core.exceptions import ConfigError
from app.modules.level_set.config import LSESettings
from app.modules.level_set.core.schemas.gp_schemas import KernelFamily
from app.modules.level_set.core.services import config_service
from app.shared.schemas import Method


def write_config(tmp_path, text, name="experiment.toml"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_minimal_config_gets_defaults(tmp_path):
    path = write_config(tmp_path, 'problem = "mc2d"\nmethod = "c2lse"\n')
    config = config_service.parse_config(path)
    assert config.method == Method.C2LSE
    assert config.kernel == KernelFamily.MATERN_5_2
    assert config.kernel.value == LSESettings.KERNEL
    assert config.epsilon == LSESettings.EPSILON
    assert config.beta == LSESettings.BETA
    assert config.budget == LSESettings.BUDGET
    assert config.seeds == list(LSESettings.SEEDS)
    assert config.n_init is None

    resolved = config.resolved(2)
    assert resolved.n_init == 5
    assert resolved.n_raw_samples == 1024


def test_override_beats_file_value(tmp_path):
    path = write_config(tmp_path, "epsilon = 0.01\n")
    config = config_service.parse_config(path, ["epsilon=0.1"])
    assert config.epsilon == 0.1


def test_negative_epsilon_names_the_rule():
    with pytest.raises(ConfigError) as excinfo:
        config_service.parse_config(None, ["epsilon=-1"])
    assert "epsilon > 0" in str(excinfo.value)
    assert excinfo.value.key == "epsilon"


def test_unknown_key(tmp_path):
    path = write_config(tmp_path, "epsilom = 0.1\n")
    with pytest.raises(ConfigError) as excinfo:
        config_service.parse_config(path)
    assert excinfo.value.key == "epsilom"
    assert "unknown key" in str(excinfo.value)


def test_unknown_table_key():
    with pytest.raises(ConfigError) as excinfo:
        config_service.parse_config(None, ["search.restarts=3"])
    assert excinfo.value.key == "search"


def test_type_mismatch_names_key():
    with pytest.raises(ConfigError) as excinfo:
        config_service.parse_config(None, ["budget=lots"])
    assert excinfo.value.key == "budget"
    assert "lots" in str(excinfo.value)


def test_method_spellings_normalized():
    assert config_service.parse_config(None, ["method=C2LSE"]).method == Method.C2LSE
    assert config_service.parse_config(None, ["method=lse-ambiguity"]).method == Method.LSE_AMBIGUITY


def test_empty_seed_list_rejected():
    with pytest.raises(ConfigError) as excinfo:
        config_service.parse_config(None, ["seeds=[]"])
    assert "seeds must not be empty" in str(excinfo.value)


def test_dump_parses_back(tmp_path):
    config = config_service.parse_config(None, ["epsilon=0.2", "seeds=[1, 2]", "method=straddle"])
    path = write_config(tmp_path, config_service.dump_config(config.resolved(2)), "resolved_config.toml")
    assert config_service.parse_config(path) == config.resolved(2)


def test_parse_override_values():
    assert config_service.parse_override("seeds=[0, 1]") == ("seeds", [0, 1])
    assert config_service.parse_override("epsilon = 0.1") == ("epsilon", 0.1)
    assert config_service.parse_override("record_wall_time=true") == ("record_wall_time", True)
    assert config_service.parse_override("problem=mc2d") == ("problem", "mc2d")
    assert config_service.parse_override('problem="data/a b.csv"') == ("problem", "data/a b.csv")


def test_parse_override_needs_key_and_value():
    with pytest.raises(ConfigError):
        config_service.parse_override("epsilon")
    with pytest.raises(ConfigError):
        config_service.parse_override("=0.1")


def test_missing_config_file(tmp_path):
    with pytest.raises(ConfigError):
        config_service.parse_config(tmp_path / "absent.toml")


def test_invalid_toml(tmp_path):
    path = write_config(tmp_path, "epsilon = = 0.1\n")
    with pytest.raises(ConfigError):
        config_service.parse_config(path)


def test_dataset_path_relative_to_config(tmp_path, toy_dataset):
    path = write_config(tmp_path, 'problem = "toy.csv"\nthreshold = 2.5\n')
    config = config_service.parse_config(path)
    assert config.is_tabular
    assert config.problem == str(toy_dataset.resolve())
