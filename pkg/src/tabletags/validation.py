"""Small argument-checking helpers shared across the package."""

from __future__ import annotations

from typing import Sequence, TypeVar

T = TypeVar("T")


def check_choice(name: str, value: T, choices: Sequence[T]) -> T:
    if value not in choices:
        allowed = ", ".join(repr(c) for c in choices)
        raise ValueError(f"{name} must be one of {allowed}; got {value!r}")
    return value


def check_positive_int(name: str, value: int, minimum: int = 1) -> int:
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ValueError(f"{name} must be an integer >= {minimum}; got {value!r}")
    return value
