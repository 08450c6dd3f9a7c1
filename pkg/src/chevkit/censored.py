"""Censored numeric values: quantities known only to meet a lower bound."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class AtLeast:
    """A value known only to be >= bound (truncation-censored)."""

    bound: int

    def __str__(self):
        return f">={self.bound}"


def is_censored(value):
    return isinstance(value, AtLeast)


def value_to_json(value):
    """JSON form: plain int for exact values, {"at_least": n} for censored."""
    if isinstance(value, AtLeast):
        return {"at_least": value.bound}
    return value


def format_value(value):
    return str(value)
