from __future__ import unicode_literals

import io
import json

import numpy as np

from . import click
from .logging import log
from .utils import format_real, to_builtin

FORMAT_VERSION = 1
# verbosity below which the human table is suppressed (-qq)
TABLE_VERBOSITY = -1


def _is_real(value):
    return isinstance(value, (float, np.floating, int, np.integer)) and not isinstance(
        value, bool
    )


def _format_value(value):
    if value is None or _is_real(value):
        return format_real(value)
    if isinstance(value, (bool, str)):
        return str(value)
    array = np.asarray(value)
    if array.dtype.kind not in "fiu":
        return str(to_builtin(value))
    if array.ndim == 1:
        return " ".join(format_real(v) for v in array)
    return "max |.| {}".format(format_real(np.abs(array).max()))


def _flatten(prefix, value):
    if isinstance(value, dict):
        for key in sorted(value, key=str):
            name = "{}.{}".format(prefix, key) if prefix else str(key)
            for item in _flatten(name, value[key]):
                yield item
    elif isinstance(value, (list, tuple)) and value and isinstance(value[0], dict):
        for index, item in enumerate(value):
            for entry in _flatten("{}[{}]".format(prefix, index), item):
                yield entry
    else:
        yield prefix, value


class ReportWriter(object):
    """Emits one report as a human table on stdout and as a JSON document."""

    def __init__(self, kind, dst_path=None, dry_run=False, context=None):
        self.kind = kind
        self.dst_path = dst_path
        self.dry_run = dry_run
        self.context = context or {}

    def document(self, payload):
        document = {"__format__": FORMAT_VERSION, "kind": self.kind}
        document.update(payload)
        # the full scenario record wins over a bare scenario id in the payload
        document.update(self.context)
        return to_builtin(document)

    def _iter_lines(self, payload):
        scenario = self.context.get("scenario", {})
        if isinstance(scenario, dict) and scenario:
            yield "{} on {} (n = {})".format(
                self.kind, scenario.get("id"), scenario.get("n")
            )
        else:
            yield self.kind
        for key, value in _flatten("", payload):
            if key in ("scenario", "points"):
                continue
            yield "  {:40} {}".format(key, _format_value(value))

    def dumps(self, payload):
        """Deterministic JSON: sorted keys, floats by repr."""
        return json.dumps(self.document(payload), sort_keys=True, indent=2)

    def write(self, payload):
        if log.verbosity > TABLE_VERBOSITY:
            for line in self._iter_lines(payload):
                click.echo(line)
        if self.dst_path and not self.dry_run:
            with io.open(self.dst_path, "w", encoding="utf-8") as f:
                f.write(self.dumps(payload))
                f.write("\n")
            log.debug("wrote {}".format(self.dst_path))

    def write_error(self, error):
        """Machine-readable record of an :class:`ObstructionLabError`."""
        if not self.dst_path or self.dry_run:
            return
        record = {
            "__format__": FORMAT_VERSION,
            "kind": "error",
            "command": self.kind,
            "error": type(error).__name__,
            "exit_code": error.exit_code,
            "message": str(error),
        }
        with io.open(self.dst_path, "w", encoding="utf-8") as f:
            f.write(json.dumps(to_builtin(record), sort_keys=True, indent=2))
            f.write("\n")
