# Standard library
import os
from dataclasses import dataclass, fields, replace

# Local imports
from stochreach.core.validation import ValidationError

# -----------------------------
# Settings
# -----------------------------

VERSION = "0.1.0"
ENV_PREFIX = "STOCHREACH_"


@dataclass(frozen=True)
class Settings:
    """Solver and output defaults; every field can be set from the environment."""

    pset_cap: int = 1_000_000
    vi_tol: float = 1e-9
    vi_max_iter: int = 100_000
    horizon_cap: int = 1_000
    fraction_tolerance: float = 1e-9
    fraction_max_denominator: int = 1_000_000
    mc_chunk_size: int = 1_000
    sir_state_cap: int = 200_000
    log_level: str = "WARNING"


def load_settings(**overrides: object) -> Settings:
    """Build Settings from defaults, STOCHREACH_* variables, then overrides.

    Example:
        STOCHREACH_PSET_CAP=5000 -> Settings(pset_cap=5000, ...)
    """
    settings = Settings()
    updates: dict[str, object] = {}

    for spec in fields(Settings):
        raw: str | None = os.getenv(ENV_PREFIX + spec.name.upper())
        if raw is None:
            continue
        kind = type(getattr(settings, spec.name))
        try:
            updates[spec.name] = kind(raw)
        except ValueError as exc:
            msg = f"Environment variable {ENV_PREFIX}{spec.name.upper()}={raw!r}"
            raise ValidationError(msg) from exc

    updates.update({k: v for k, v in overrides.items() if v is not None})
    return replace(settings, **updates)  # type: ignore[arg-type]
