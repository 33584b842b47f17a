# Standard library
from pathlib import Path

# -----------------------------
# Output locations
# -----------------------------


def get_manifest_path(out_path: Path) -> Path:
    """
    Get the manifest path written next to an output file.

    Example:
        out="runs/reach.csv" -> runs/reach.csv.manifest.json
    """
    return out_path.with_name(f"{out_path.name}.manifest.json")


def prepare_output(path: Path) -> Path:
    """Create the parent directory of an output file."""
    path.parent.mkdir(parents=True, exist_ok=True)
    return path
