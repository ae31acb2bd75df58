"""Backport of enum.StrEnum for Python < 3.11."""

import sys

if sys.version_info >= (3, 11):
    from enum import StrEnum
else:
    from enum import Enum

    class StrEnum(str, Enum):
        def __str__(self) -> str:
            return str.__str__(self)

__all__ = ["StrEnum"]
