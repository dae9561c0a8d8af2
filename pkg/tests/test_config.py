import pytest

from edgeworth import config as aee_config
from edgeworth.errors import ConfigError

def test_defaults():
    config = aee_config.load(environ={})
    assert aee_config.max_order(config) == 5
    assert config.getint('combinatorics', 'cap') == 12
    assert config.getfloat('diagnostics', 'step') == 0.01

def test_file_overrides_defaults(tmp_path):
    path = tmp_path / 'aee.ini'
    path.write_text("[engine]\nmax_order = 3\n\n[pool]\nsize = 8\n")
    config = aee_config.load(str(path), environ={})
    assert aee_config.max_order(config) == 3
    assert config.getint('pool', 'size') == 8
    assert config.get('engine', 'cache') == 'memory'

def test_environment_overrides_file(tmp_path):
    path = tmp_path / 'aee.ini'
    path.write_text("[engine]\nmax_order = 3\n")
    config = aee_config.load(str(path), environ={'AEE_MAX_ORDER': '6'})
    assert aee_config.max_order(config) == 6

@pytest.mark.parametrize('value', ['0', '7', 'five'])
def test_invalid_max_order(value):
    with pytest.raises(ConfigError):
        aee_config.load(environ={'AEE_MAX_ORDER': value})

def test_missing_file(tmp_path):
    with pytest.raises(ConfigError):
        aee_config.load(str(tmp_path / 'absent.ini'), environ={})
