"""Run configuration for the command line.

Defaults can be overridden by a YAML file, ``~/.loopalg/config.yaml`` unless
another path is given; command-line flags override both.
"""

import logging
import pathlib
from dataclasses import dataclass

import yaml

from loopalg import LoopAlgError
from loopalg.linalg.scalars import FieldSpec

logger = logging.getLogger(__name__)

DEFAULT_CONFIG = pathlib.Path.home() / ".loopalg" / "config.yaml"
CONFIG_KEYS = ("max_degree", "degree_cap", "field", "format")
COMMANDS = (
    "validate",
    "loop-homology",
    "omega-homology",
    "intersection",
    "hochschild",
    "e2",
    "examples",
)


class UsageError(LoopAlgError):
    """Bad flags, commands or configuration."""


class ConfigFileError(LoopAlgError):
    """The configuration file cannot be read."""


def parse_field_flag(value: str | int | dict | None) -> FieldSpec:  # type: ignore[type-arg]
    """Read ``q``, ``5``, ``fp:5``, ``F5`` or ``{"fp": 5}``.

    Raises
    ------
    UsageError
        If the value names no field or the characteristic is not prime.
    """
    if value is None:
        return FieldSpec.rationals()
    try:
        if isinstance(value, dict) and set(value) == {"fp"}:
            return FieldSpec.prime(int(value["fp"]))
        if isinstance(value, int) and not isinstance(value, bool):
            return FieldSpec.prime(value)
        if isinstance(value, str):
            text = value.strip().lower()
            if text in ("q", "rationals", "qq"):
                return FieldSpec.rationals()
            for prefix in ("fp:", "f"):
                if text.startswith(prefix) and text[len(prefix) :].isdigit():
                    return FieldSpec.prime(int(text[len(prefix) :]))
            if text.isdigit():
                return FieldSpec.prime(int(text))
    except (ValueError, LoopAlgError) as e:
        raise UsageError(f"bad field {value!r}: {e}") from e
    raise UsageError(f"bad field {value!r}; use q, p or fp:p")


def load_config(path: pathlib.Path | None = None) -> dict:  # type: ignore[type-arg]
    """Defaults from a YAML file; an absent default file gives ``{}``.

    Raises
    ------
    ConfigFileError
        If an explicitly given file is missing or unreadable.
    UsageError
        If the file holds unknown keys.
    """
    if path is None:
        if not DEFAULT_CONFIG.exists():
            return {}
        path = DEFAULT_CONFIG
    try:
        with open(path) as f:
            config = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigFileError(f"cannot read {path}: {e}") from e
    if not isinstance(config, dict):
        raise UsageError(f"{path} must hold a mapping")
    unknown = set(config) - set(CONFIG_KEYS)
    if unknown:
        raise UsageError(f"unknown keys in {path}: {sorted(unknown)}")
    logger.debug(f"loaded {config} from {path}")
    return config


@dataclass
class RunConfig:
    """Everything one ``loopalg`` invocation needs.

    Parameters
    ----------
    command
        One of :data:`COMMANDS`.
    algebra
        Path to an algebra file.
    builtin
        Builtin example name, used when `algebra` is not given.
    field
        Coefficient field; the file's own, or ℚ for builtins, when `None`.
    max_degree
        Top of the window.
    min_degree
        Bottom of the window. By default the lowest degree of the complex:
        ``-d`` with coefficients ``A`` (loop homology, the E2 page and the
        intersection), ``0`` for the cobar construction and coefficients ``k``
        or ``A^``.
    coefficients
        ``self``, ``trivial`` or ``dual`` for the hochschild command.
    format
        ``table`` or ``json``.
    output
        Where to write the report; standard output when `None`.
    degree_cap
        Largest allowed `max_degree` unless `allow_large`.
    """

    command: str
    algebra: pathlib.Path | None = None
    builtin: str | None = None
    field: FieldSpec | None = None
    max_degree: int = 8
    min_degree: int | None = None
    coefficients: str = "self"
    format: str = "table"
    output: pathlib.Path | None = None
    degree_cap: int = 16
    allow_large: bool = False
    timings: bool = False
    lift_check: bool = False
    verbose: int = 0

    def check(self) -> None:
        """Raise :class:`UsageError` when the options cannot be run."""
        if self.command not in COMMANDS:
            raise UsageError(f"unknown command {self.command!r}")
        if self.command != "examples" and (self.algebra is None) == (self.builtin is None):
            raise UsageError("give exactly one of --algebra and --builtin")
        if self.coefficients not in ("self", "trivial", "dual"):
            raise UsageError(f"unknown coefficients {self.coefficients!r}")
        if self.format not in ("table", "json"):
            raise UsageError(f"unknown format {self.format!r}")
        if self.min_degree is not None and self.max_degree <= self.min_degree:
            raise UsageError(
                f"max degree {self.max_degree} must exceed min degree {self.min_degree}"
            )
        if self.max_degree > self.degree_cap and not self.allow_large:
            raise UsageError(
                f"max degree {self.max_degree} is above the cap {self.degree_cap};"
                " pass --allow-large to run it anyway"
            )

    def as_dict(self) -> dict:  # type: ignore[type-arg]
        return {
            "command": self.command,
            "algebra": self.algebra.name if self.algebra is not None else None,
            "builtin": self.builtin,
            "field": self.field,
            "max_degree": self.max_degree,
            "min_degree": self.min_degree,
            "coefficients": self.coefficients if self.command == "hochschild" else None,
        }
