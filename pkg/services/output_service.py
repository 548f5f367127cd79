"""
Output Service

Writes plot-ready CSV tables and JSON reports. Every file starts with a
provenance header (config hash, model, parameters, tolerances); numbers are
written with 17 significant digits so identical runs give identical files.
"""

import io
import json
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from pydantic import BaseModel

from config.logging_utils import log_debug
from config.settings import settings
from models.run_config import RunConfig


logger = logging.getLogger(__name__)

NUMBER_FORMAT = "%.17g"


class OutputServiceError(Exception):
    """Raised when a result cannot be written."""
    pass


class OutputService:
    """Service for emitting tables and reports."""

    def provenance(self, config: RunConfig) -> dict:
        """Header fields identifying the run that produced a file."""
        return {
            "tool": f"{settings.APP_NAME} {settings.APP_VERSION}",
            "config_hash": config.config_hash(),
            "model": config.model,
            "params": config.params.model_dump(mode="json"),
            "tolerances": config.tolerances.model_dump(mode="json"),
        }

    def _header_lines(self, config: RunConfig, columns: Sequence[str]) -> str:
        lines = [f"{key}: {json.dumps(value, sort_keys=True)}" for key, value in self.provenance(config).items()]
        lines.append(",".join(columns))
        return "\n".join(lines)

    def format_table(self, config: RunConfig, columns: Sequence[str], rows) -> str:
        """
        Render rows as CSV text with a commented provenance header.

        Args:
            config: Run configuration
            columns: Column names
            rows: Row data, shape (n, len(columns)); real numbers only

        Returns:
            The CSV text
        """
        table = np.asarray(rows, dtype=float)
        if table.size == 0:
            table = table.reshape(0, len(columns))
        if table.ndim != 2 or table.shape[1] != len(columns):
            raise OutputServiceError(f"table shape {table.shape} does not match {len(columns)} columns")
        buffer = io.StringIO()
        np.savetxt(
            buffer,
            table,
            fmt=NUMBER_FORMAT,
            delimiter=",",
            header=self._header_lines(config, columns),
            comments="# ",
        )
        return buffer.getvalue()

    def format_report(self, config: RunConfig, report: BaseModel | list | dict) -> str:
        """Render a report as JSON with the provenance under "provenance"."""
        if isinstance(report, BaseModel):
            body = json.loads(report.model_dump_json())
        elif isinstance(report, list):
            body = [json.loads(item.model_dump_json()) if isinstance(item, BaseModel) else item for item in report]
        else:
            body = report
        payload = {"provenance": self.provenance(config), "result": body}
        return json.dumps(payload, indent=2, sort_keys=True) + "\n"

    def emit(self, text: str, out: Optional[str]) -> None:
        """Write text to a file, or to stdout when no path is given."""
        if out is None:
            sys.stdout.write(text)
            return
        path = Path(out)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(text, encoding="utf-8")
        except OSError as e:
            raise OutputServiceError(f"cannot write {path}: {e}") from e
        log_debug("wrote %d bytes to %s", len(text), path, prefix="CLI")

    def write(
        self,
        config: RunConfig,
        columns: Sequence[str],
        rows,
        report: Optional[BaseModel | list | dict] = None,
    ) -> None:
        """
        Emit a result in the configured format.

        CSV writes the table; JSON writes the report when one is given and
        otherwise the table as a list of records.
        """
        if config.format == "csv":
            text = self.format_table(config, columns, rows)
        else:
            if report is None:
                table = np.asarray(rows, dtype=float).reshape(-1, len(columns))
                report = [dict(zip(columns, (float(v) for v in row))) for row in table]
            text = self.format_report(config, report)
        self.emit(text, config.out)


output_service = OutputService()
