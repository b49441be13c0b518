"""Weighted-energy diagnostics for 1-D quasilinear wave systems on the half-line.

Every entry point takes keyword settings using the same keys as the CLI
config files (``model``, ``epsilon``, ``L``, ``Nx``, ``T_final``, ...).
"""

import json
import tempfile
from pathlib import Path

from . import _core
from ._core import ConfigError, DEFAULT_DISSIPATION, Error, LookupError, catalog_names, phi_theta

__all__ = [
    "ConfigError",
    "DEFAULT_DISSIPATION",
    "Error",
    "LookupError",
    "catalog_names",
    "check_null",
    "config",
    "energies",
    "phi_theta",
    "run_subcommand",
    "solve",
    "sweep",
]


def _text(settings):
    lines = []
    for key, value in settings.items():
        if isinstance(value, (list, tuple)):
            value = ", ".join(repr(float(v)) for v in value)
        elif isinstance(value, float):
            value = repr(value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"


def config(**settings):
    """Validated configuration with defaults filled in."""
    return json.loads(_core.config_json(_text(settings)))


def check_null(model):
    """Null-condition verdict for a catalog model."""
    return json.loads(_core.check_null(model))


def solve(**settings):
    """Final state (x, u, v, w as arrays) and run summary."""
    return _core.solve(_text(settings))


def energies(**settings):
    """Energy time series E[k-1], EE[k-1] for k = 1..4, Q and check reports."""
    out = _core.energies(_text(settings))
    out["checks"] = json.loads(out["checks"])
    out["flux"] = json.loads(out["flux"])
    return out


def run_subcommand(subcommand, out_dir, **settings):
    """Runs a CLI subcommand; returns (exit code, log line)."""
    return _core.run_subcommand(subcommand, _text(settings), str(out_dir))


def sweep(kind, **settings):
    """``kind`` is "bootstrap" or "blowup"; returns (exit code, sweep report)."""
    if kind not in ("bootstrap", "blowup"):
        raise ValueError("kind must be bootstrap or blowup")
    with tempfile.TemporaryDirectory() as tmp:
        code, _ = run_subcommand(f"sweep-{kind}", tmp, **settings)
        report = Path(tmp) / "sweep.json"
        return code, json.loads(report.read_text()) if report.exists() else None
