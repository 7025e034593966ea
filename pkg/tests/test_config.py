import pytest
from loguru import logger
from pydantic import ValidationError

from qharness.config import Settings, load_settings, thread_count
from qharness.logging_setup import configure_logging
from qharness.markov import step_measure
from qharness.qcore import ProcessParams


# Test defaults
def test_defaults(clean_env):
    """Test the built-in defaults when no file or environment is present."""
    settings = load_settings()
    assert settings.quadrature.nodes == 80
    assert settings.quadrature.max_nodes == 200
    assert settings.verification.nodes == 12
    assert settings.verification.seed == 20240601
    assert settings.output.format == "csv"
    assert settings.logging.json_records is False
    assert thread_count(settings) == 1

def test_missing_file_gives_defaults(clean_env):
    """Test that an explicit but missing file logs and falls back to defaults."""
    assert load_settings("missing.yaml") == Settings()

# Test file and environment layers
def test_yaml_merge(clean_env):
    """Test that a YAML file overrides only the keys it names."""
    (clean_env / "run.yaml").write_text("quadrature:\n  nodes: 40\nlogging:\n  json: true\n")
    settings = load_settings(clean_env / "run.yaml")
    assert settings.quadrature.nodes == 40
    assert settings.quadrature.max_nodes == 200
    assert settings.logging.json_records is True

def test_default_file_in_working_directory(clean_env):
    """Test that qharness.yaml is picked up from the working directory."""
    (clean_env / "qharness.yaml").write_text("verification:\n  sweep: 7\n")
    assert load_settings().verification.sweep == 7

def test_config_env_variable(clean_env, monkeypatch):
    """Test that QHARNESS_CONFIG points at the file to load."""
    (clean_env / "other.yaml").write_text("output:\n  format: json\n")
    monkeypatch.setenv("QHARNESS_CONFIG", str(clean_env / "other.yaml"))
    assert load_settings().output.format == "json"

def test_environment_overrides(clean_env, monkeypatch):
    """Test QHARNESS_<SECTION>_<KEY> and QHARNESS_THREADS over the file."""
    (clean_env / "run.yaml").write_text("quadrature:\n  nodes: 40\n")
    monkeypatch.setenv("QHARNESS_QUADRATURE_NODES", "33")
    monkeypatch.setenv("QHARNESS_THREADS", "4")
    settings = load_settings(clean_env / "run.yaml")
    assert settings.quadrature.nodes == 33
    assert thread_count(settings) == 4

def test_invalid_values_are_rejected(clean_env):
    """Test that out-of-range values fail validation."""
    (clean_env / "bad.yaml").write_text("sampling:\n  threads: 0\n")
    with pytest.raises(ValidationError):
        load_settings(clean_env / "bad.yaml")

def test_malformed_yaml_gives_defaults(clean_env):
    """Test that an unparsable file is logged and ignored."""
    (clean_env / "broken.yaml").write_text("quadrature: [nodes: 40\n")
    assert load_settings(clean_env / "broken.yaml") == Settings()

# Test logging setup
def test_configure_logging(capsys):
    """Test that records go to stderr and never to stdout."""
    configure_logging("INFO")
    logger.info("stderr only")
    captured = capsys.readouterr()
    assert "stderr only" in captured.err
    assert captured.out == ""

def test_configure_logging_json(capsys):
    """Test serialized records."""
    configure_logging("DEBUG", json=True)
    logger.debug("as json")
    captured = capsys.readouterr()
    assert '"text"' in captured.err
    assert "as json" in captured.err

def test_library_is_silent_until_configured():
    """Test that building kernels logs nothing before configure_logging and DEBUG records after."""
    params = ProcessParams(theta=0.31, tau=0.17, q=0.43)
    records = []
    logger.add(records.append, level="DEBUG")
    step_measure(params, 0.11, 0.5, 1.0, 8)
    assert records == []

    configure_logging("DEBUG")
    logger.add(records.append, level="DEBUG")
    step_measure(params, -0.23, 0.5, 1.0, 8)
    assert any("kernel recurrence" in record for record in records)
