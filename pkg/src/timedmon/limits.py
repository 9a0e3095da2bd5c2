"""Resource guards for the exponential searches.

Defaults can be overridden with the ``TIMEDMON_MAX_ZONES`` and
``TIMEDMON_MAX_SEQUENCES`` environment variables.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

DEFAULT_MAX_ZONES = 100_000
DEFAULT_MAX_SEQUENCES = 4096


class ResourceLimitExceeded(RuntimeError):
    """A search grew past its configured guard."""


@dataclass(frozen=True)
class Limits:
    max_zones: int = DEFAULT_MAX_ZONES
    max_sequences: int = DEFAULT_MAX_SEQUENCES

    @classmethod
    def from_env(cls) -> "Limits":
        return cls(
            max_zones=_env_int("TIMEDMON_MAX_ZONES", DEFAULT_MAX_ZONES),
            max_sequences=_env_int("TIMEDMON_MAX_SEQUENCES", DEFAULT_MAX_SEQUENCES),
        )

    def check_zones(self, count: int, what: str = "zones") -> None:
        if count > self.max_zones:
            raise ResourceLimitExceeded(f"{what}: more than {self.max_zones} zones")

    def check_sequences(self, count: int) -> None:
        if count > self.max_sequences:
            raise ResourceLimitExceeded(
                f"letter-sequence enumeration needs {count} sequences, limit is {self.max_sequences}"
            )


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"{name} must be an integer, got {raw!r}") from None
    if value <= 0:
        raise ValueError(f"{name} must be positive")
    return value


def current() -> Limits:
    return Limits.from_env()
