from __future__ import annotations

import os

DEFAULT_ENUM_CAP = 5_000_000
SCHEMA_VERSION = 1


class CapExceeded(ValueError):
    """An enumeration would exceed the configured cap."""


def enumeration_cap() -> int:
    raw = os.environ.get("HRTOOL_CAP")
    if raw:
        try:
            return int(raw)
        except ValueError:
            raise ValueError(f"HRTOOL_CAP must be an integer, got {raw!r}") from None
    return DEFAULT_ENUM_CAP


def check_cap(count: int, what: str) -> None:
    cap = enumeration_cap()
    if count > cap:
        raise CapExceeded(f"{what}: {count} items exceeds enumeration cap {cap} (set HRTOOL_CAP)")
