# Standard library
import hashlib
from pathlib import Path

# Third-party
import pytest

# Local imports
from stochreach.core.config import Settings, load_settings
from stochreach.core.storage import get_manifest_path, prepare_output
from stochreach.core.utils import (
    as_fraction,
    compute_file_hash,
    format_probability,
    parse_probability,
)
from stochreach.core.validation import ValidationError
from stochreach.managers.manager import fresh_seed, parse_target

# -----------------------------
# Probabilities
# -----------------------------


@pytest.mark.parametrize(
    ("raw", "expected"),
    [("2/3", 2 / 3), (" 0.25 ", 0.25), (1, 1.0), (0.5, 0.5), ("1", 1.0)],
)
def test_parse_probability(raw: object, expected: float) -> None:
    assert parse_probability(raw) == pytest.approx(expected)


@pytest.mark.parametrize("raw", [True, "one third", "1/0", [0.5], None])
def test_parse_probability_rejects(raw: object) -> None:
    with pytest.raises(ValidationError):
        parse_probability(raw)


def test_format_probability() -> None:
    assert format_probability(2 / 3) == "2/3"
    assert format_probability(1.0) == "1"
    assert format_probability(0.0) == "0"
    assert format_probability(0.5, decimal=True) == "0.5"
    assert format_probability(1 / 7, max_denominator=5) == repr(1 / 7)


def test_as_fraction_tolerance() -> None:
    assert str(as_fraction(1 / 3 + 1e-12)) == "1/3"
    assert as_fraction(0.3334, max_denominator=10) is None
    assert str(as_fraction(0.3334, tolerance=1e-3, max_denominator=10)) == "1/3"


# -----------------------------
# Settings
# -----------------------------


def test_settings_defaults(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.delenv("STOCHREACH_PSET_CAP", raising=False)
    monkeypatch.delenv("STOCHREACH_LOG_LEVEL", raising=False)
    assert load_settings() == Settings()


def test_settings_from_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("STOCHREACH_PSET_CAP", "5000")
    monkeypatch.setenv("STOCHREACH_VI_TOL", "1e-6")
    settings = load_settings(log_level="DEBUG", horizon_cap=None)

    assert settings.pset_cap == 5000
    assert settings.vi_tol == pytest.approx(1e-6)
    assert settings.log_level == "DEBUG"
    assert settings.horizon_cap == Settings().horizon_cap


def test_settings_reject_bad_environment(monkeypatch: pytest.MonkeyPatch) -> None:
    monkeypatch.setenv("STOCHREACH_PSET_CAP", "many")
    with pytest.raises(ValidationError, match="STOCHREACH_PSET_CAP"):
        load_settings()


# -----------------------------
# Files
# -----------------------------


def test_manifest_path_sits_next_to_output() -> None:
    assert get_manifest_path(Path("runs/reach.csv")) == Path(
        "runs/reach.csv.manifest.json"
    )


def test_prepare_output_creates_parents(tmp_path: Path) -> None:
    path = prepare_output(tmp_path / "a" / "b" / "out.csv")
    assert path.parent.is_dir()


def test_file_hash(tmp_path: Path) -> None:
    path = tmp_path / "data.bin"
    path.write_bytes(b"stochastic digraph")
    assert compute_file_hash(path) == hashlib.sha256(b"stochastic digraph").hexdigest()


# -----------------------------
# CLI helpers
# -----------------------------


def test_parse_target() -> None:
    assert parse_target("4") == [4]
    assert parse_target("2, 3,") == [2, 3]
    with pytest.raises(ValidationError):
        parse_target("a,b")
    with pytest.raises(ValidationError, match="nonempty"):
        parse_target(",")


def test_fresh_seed_range() -> None:
    seed = fresh_seed()
    assert 0 <= seed < 2**63
