"""Parse device-friendly numbers such as ``500pH``, ``0.33 ps`` or ``180ueV`` into SI."""

from __future__ import annotations

import re

from .constants import e

_PREFIX = {"f": 1e-15, "p": 1e-12, "n": 1e-9, "u": 1e-6, "µ": 1e-6, "m": 1e-3, "": 1.0, "k": 1e3, "M": 1e6, "G": 1e9}

# base unit -> SI factor
_BASE = {"H": 1.0, "F": 1.0, "A": 1.0, "s": 1.0, "ohm": 1.0, "Ohm": 1.0, "Ω": 1.0, "eV": e, "J": 1.0, "V": 1.0}

_NUMBER = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"
_PATTERN = re.compile(rf"^\s*({_NUMBER})\s*([a-zA-Zµ]*)\s*$")

# metre is separate so that "m" alone keeps meaning metre, not milli-
_LENGTH = {"m": 1.0, "mm": 1e-3, "um": 1e-6, "µm": 1e-6, "nm": 1e-9, "pm": 1e-12}


def _unit_factor(unit: str) -> float:
    if unit in _LENGTH:
        return _LENGTH[unit]
    if unit in _BASE:
        return _BASE[unit]
    for base in sorted(_BASE, key=len, reverse=True):
        if unit.endswith(base):
            prefix = unit[: -len(base)]
            if prefix in _PREFIX:
                return _PREFIX[prefix] * _BASE[base]
    raise ValueError(f"unknown unit {unit!r}")


def parse_quantity(text: str | float) -> float:
    """Return ``text`` in SI units; a bare number is taken as already SI."""
    if isinstance(text, (int, float)):
        return float(text)
    match = _PATTERN.match(text)
    if not match:
        raise ValueError(f"cannot parse quantity {text!r}")
    number, unit = match.groups()
    value = float(number)
    return value * _unit_factor(unit) if unit else value
