"""Parsing and formatting of unit-tagged quantities.

Config files carry every physical quantity as a string with an explicit
unit ("559 MHz", "4 K", "100 aF").  Bare numbers are rejected for
physical fields; dimensionless fields accept plain numbers.
"""

from __future__ import annotations

import re

from .errors import ConfigError

_SI_PREFIXES = {
    "a": 1e-18,
    "f": 1e-15,
    "p": 1e-12,
    "n": 1e-9,
    "u": 1e-6,
    "µ": 1e-6,
    "m": 1e-3,
    "": 1.0,
    "k": 1e3,
    "M": 1e6,
    "G": 1e9,
    "T": 1e12,
}

# Base units accepted, keyed by dimension name used in the config schema.
_BASE_UNITS = {
    "frequency": ("Hz",),
    "temperature": ("K",),
    "voltage": ("V",),
    "capacitance": ("F",),
    "inductance": ("H",),
    "resistance": ("ohm", "Ohm", "Ω"),
    "time": ("s",),
    "decibel": ("dB",),
}

_QTY_RE = re.compile(r"^\s*([+-]?[0-9.eE+-]+)\s*([a-zA-ZµΩΩ]*)\s*$")


def parse_quantity(text, dimension, field=""):
    """Parse '559 MHz' -> 559e6 for the given dimension.

    Returns the value in SI base units (dB values are returned as dB).
    Raises ConfigError if the unit is missing or does not match.
    """
    where = f" in field '{field}'" if field else ""
    if isinstance(text, (int, float)):
        raise ConfigError(
            f"unitless value {text!r}{where}: physical quantities require "
            f"an explicit unit (e.g. '559 MHz')"
        )
    m = _QTY_RE.match(str(text))
    if not m:
        raise ConfigError(f"cannot parse quantity {text!r}{where}")
    number, unit = m.group(1), m.group(2)
    try:
        value = float(number)
    except ValueError:
        raise ConfigError(f"bad number in quantity {text!r}{where}") from None
    if not unit:
        raise ConfigError(
            f"missing unit on {text!r}{where}: expected a "
            f"{dimension} unit such as {_BASE_UNITS[dimension][0]!r}"
        )
    for base in _BASE_UNITS[dimension]:
        if unit == base:
            return value
        for prefix, scale in _SI_PREFIXES.items():
            if prefix and unit == prefix + base:
                return value * scale
    raise ConfigError(
        f"unit {unit!r}{where} does not match dimension {dimension!r}"
    )


def format_quantity(value, dimension):
    """Format an SI value back to canonical text (base unit, repr float)."""
    base = _BASE_UNITS[dimension][0]
    return f"{float(value)!r} {base}"
