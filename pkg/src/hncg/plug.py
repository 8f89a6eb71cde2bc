"""External-process plug protocol.

Neural models (synthesizers, segmenters, blenders, feature extractors)
attach as subprocesses: the caller writes PNG inputs into a fresh temp
directory, substitutes absolute paths into the command template, runs the
command, and reads the PNG output.  The command must exit 0 within the time
budget and produce an output matching the input dimensions.  Temp files are
removed on every path.

Template placeholders: {in} (primary input), {out} (output), plus {in_color}
for synthesizers (color-coded labels) and {mask} for blenders.  The
HNCG_PLUG_TIMEOUT environment variable overrides the default 120 s budget;
an explicit PlugConfig timeout wins over both.
"""

from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import (
    PlugDimensionError,
    PlugOutputError,
    PlugProcessError,
    PlugTimeoutError,
    ValidationError,
)

DEFAULT_TIMEOUT_S = 120.0


@dataclass(frozen=True)
class PlugConfig:
    """Command template with {in}/{out} placeholders, time budget, workdir."""

    command: str
    timeout_s: Optional[float] = None
    workdir: Optional[str] = None

    def __post_init__(self):
        if "{in}" not in self.command or "{out}" not in self.command:
            raise ValidationError("plug command must contain {in} and {out} placeholders")

    @property
    def effective_timeout(self) -> float:
        if self.timeout_s is not None:
            return float(self.timeout_s)
        env = os.environ.get("HNCG_PLUG_TIMEOUT")
        return float(env) if env else DEFAULT_TIMEOUT_S


def run_plug(plug: PlugConfig, write_inputs, read_output, substitutions: Optional[dict] = None):
    """Run one plug invocation.

    write_inputs(tmpdir) must write the input files and return a dict of
    placeholder -> absolute path.  read_output(out_path) parses the produced
    file.  Raises distinct errors for nonzero exit, timeout, missing or
    unreadable output.
    """
    with tempfile.TemporaryDirectory(prefix="hncg_plug_") as tmp:
        tmpdir = Path(tmp)
        paths = dict(write_inputs(tmpdir))
        out_path = tmpdir / "out.png"
        paths.setdefault("{out}", str(out_path))
        if substitutions:
            paths.update(substitutions)

        tokens = []
        for token in shlex.split(plug.command):
            for key, value in paths.items():
                token = token.replace(key, str(value))
            tokens.append(token)

        try:
            proc = subprocess.run(
                tokens,
                cwd=plug.workdir,
                timeout=plug.effective_timeout,
                capture_output=True,
                text=True,
            )
        except subprocess.TimeoutExpired:
            raise PlugTimeoutError(
                f"plug timed out after {plug.effective_timeout:.0f} s: {plug.command}"
            ) from None
        except OSError as exc:
            raise PlugProcessError(f"plug failed to start: {exc}", returncode=-1) from None
        if proc.returncode != 0:
            tail = (proc.stderr or "").strip().splitlines()[-3:]
            raise PlugProcessError(
                f"plug exited {proc.returncode}: {plug.command}" + ("; stderr: " + " | ".join(tail) if tail else ""),
                returncode=proc.returncode,
            )
        if not out_path.exists():
            raise PlugOutputError(f"plug produced no output file: {plug.command}")
        try:
            return read_output(out_path)
        except (PlugDimensionError, PlugOutputError):
            raise
        except ValidationError as exc:
            raise PlugOutputError(f"plug output unreadable: {exc}") from None


def check_dims(shape, expected_hw, what: str) -> None:
    if tuple(shape[:2]) != tuple(expected_hw):
        raise PlugDimensionError(
            f"{what}: expected {expected_hw[0]}x{expected_hw[1]}, got {shape[0]}x{shape[1]}"
        )
