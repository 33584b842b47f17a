# Standard library
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import TextIO

# Third-party
import polars as pl

# Local imports
from stochreach.core.models import RunManifest
from stochreach.core.storage import prepare_output
from stochreach.core.validation import ValidationError

# -----------------------------
# Output Repository
# -----------------------------


class OutputRepository:
    """Repository for tables, JSON documents and run manifests.

    Tables go to stdout as CSV unless a path is given, in which case the
    suffix picks CSV, Parquet or JSON.
    """

    def __init__(
        self, stdout: TextIO | None = None, stderr: TextIO | None = None
    ) -> None:
        self._stdout: TextIO = stdout or sys.stdout
        self._stderr: TextIO = stderr or sys.stderr

    def write_frame(self, frame: pl.DataFrame, out: Path | None = None) -> None:
        """Write a table to stdout or to out."""
        if out is None:
            self._stdout.write(frame.write_csv())
            return

        prepare_output(out)
        suffix: str = out.suffix.lower()
        if suffix == ".csv":
            frame.write_csv(out)
        elif suffix == ".parquet":
            frame.write_parquet(out)
        elif suffix == ".json":
            frame.write_json(out)
        else:
            msg = f"Unsupported output type: {suffix or out.name}"
            raise ValidationError(msg)

    def write_document(
        self, payload: dict[str, object], out: Path | None = None
    ) -> None:
        """Write a JSON document with sorted keys."""
        text: str = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        if out is None:
            self._stdout.write(text)
            return
        prepare_output(out).write_text(text)

    def write_manifest(self, manifest: RunManifest, out: Path | None = None) -> None:
        """Write a run manifest to out, or to stderr when out is None."""
        text: str = json.dumps(asdict(manifest), indent=2, sort_keys=True) + "\n"
        if out is None:
            self._stderr.write(text)
            return
        prepare_output(out).write_text(text)
