import pytest

from mammo_augment.commands.common import build_config, parse_list, parse_size
from mammo_augment.config import CliConfig
from mammo_augment.errors import UsageError
from mammo_augment.models import Command, Strategy


@pytest.fixture(autouse=True)
def clean_env(monkeypatch, tmp_path):
    for name in ("MAMMO_IMAGE_ROOT", "MAMMO_SEED", "MAMMO_WORKERS", "MAMMO_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    # keep a developer's .env out of the picture
    monkeypatch.chdir(tmp_path)


def test_defaults_resolve_from_manifest(tmp_path):
    manifest = tmp_path / "data" / "manifest.csv"
    config = build_config(Command.AUGMENT, manifest)
    assert config.image_root == tmp_path / "data"
    assert config.out_root == tmp_path / "data" / "augment"
    assert config.seed == 0
    assert config.workers == 1
    assert config.strategy == Strategy.TRANSPARENCY


def test_env_vars_are_respected(monkeypatch, tmp_path):
    monkeypatch.setenv("MAMMO_IMAGE_ROOT", str(tmp_path / "images"))
    monkeypatch.setenv("MAMMO_SEED", "42")
    monkeypatch.setenv("MAMMO_WORKERS", "3")

    settings = CliConfig()
    assert settings.image_root == tmp_path / "images"

    config = build_config(Command.SPLIT, tmp_path / "m.csv")
    assert config.image_root == tmp_path / "images"
    assert config.seed == 42
    assert config.workers == 3


def test_flags_override_env(monkeypatch, tmp_path):
    monkeypatch.setenv("MAMMO_SEED", "42")
    config = build_config(
        Command.SPLIT, tmp_path / "m.csv", image_root=tmp_path / "x", seed=7, workers=2
    )
    assert config.seed == 7
    assert config.workers == 2
    assert config.image_root == tmp_path / "x"


def test_dotenv_file_is_read(tmp_path):
    (tmp_path / ".env").write_text("MAMMO_SEED=11\n", encoding="utf-8")
    assert CliConfig().seed == 11


def test_invalid_env_value_is_usage_error(monkeypatch, tmp_path):
    monkeypatch.setenv("MAMMO_WORKERS", "0")
    with pytest.raises(UsageError, match="MAMMO_WORKERS"):
        build_config(Command.SPLIT, tmp_path / "m.csv")


def test_invalid_flag_is_usage_error(tmp_path):
    with pytest.raises(UsageError, match="strategy"):
        build_config(Command.AUGMENT, tmp_path / "m.csv", strategy="mixup")


def test_parse_helpers():
    assert parse_list("0.7, 0.1,0.2", "--ratios", 3) == [0.7, 0.1, 0.2]
    assert parse_size("1024x768") == (1024, 768)
    with pytest.raises(UsageError):
        parse_list("a,b", "--alpha", 2)
    with pytest.raises(UsageError):
        parse_size("1024")
