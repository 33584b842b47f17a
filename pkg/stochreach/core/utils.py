# Standard library
import hashlib
from fractions import Fraction
from pathlib import Path

# Local imports
from stochreach.core.validation import ValidationError

# -----------------------------
# Constants
# -----------------------------

FRACTION_TOLERANCE = 1e-9
FRACTION_MAX_DENOMINATOR = 1_000_000
HASH_CHUNK_SIZE = 1 << 16

# -----------------------------
# Probability parsing and formatting
# -----------------------------


def parse_probability(raw: object) -> float:
    """Parse a probability given as a number or a decimal / "p/q" string."""
    if isinstance(raw, bool):
        msg = f"Boolean {raw!r} is not a probability"
        raise ValidationError(msg)
    if isinstance(raw, int | float):
        return float(raw)
    if isinstance(raw, str):
        try:
            return float(Fraction(raw.strip()))
        except (ValueError, ZeroDivisionError) as exc:
            msg = f"Cannot parse probability {raw!r}"
            raise ValidationError(msg) from exc
    msg = f"Unsupported probability value {raw!r}"
    raise ValidationError(msg)


def as_fraction(
    value: float,
    tolerance: float = FRACTION_TOLERANCE,
    max_denominator: int = FRACTION_MAX_DENOMINATOR,
) -> Fraction | None:
    """Return p/q within tolerance of value (q <= max_denominator), else None."""
    candidate: Fraction = Fraction(value).limit_denominator(max_denominator)
    if abs(float(candidate) - value) <= tolerance:
        return candidate
    return None


def format_probability(
    value: float,
    *,
    decimal: bool = False,
    tolerance: float = FRACTION_TOLERANCE,
    max_denominator: int = FRACTION_MAX_DENOMINATOR,
) -> str:
    """Format a probability as a reduced fraction when one is close enough.

    Example:
        0.6666666666666666 -> "2/3", 1.0 -> "1", 0.0 -> "0"
    """
    if not decimal:
        fraction: Fraction | None = as_fraction(value, tolerance, max_denominator)
        if fraction is not None:
            return str(fraction)
    return repr(float(value))


# -----------------------------
# Hash computation utilities
# -----------------------------


def compute_file_hash(path: Path) -> str:
    """SHA-256 of a file's bytes."""
    digest = hashlib.sha256()
    with path.open("rb") as handle:
        for chunk in iter(lambda: handle.read(HASH_CHUNK_SIZE), b""):
            digest.update(chunk)
    return digest.hexdigest()
