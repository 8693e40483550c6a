"""Unit-suffix parsing for material files and CLI arguments.

A quantity is written as ``<number>[ <unit>]``. The unit suffix is optional;
bare numbers are interpreted in the SI base unit of the quantity kind.
Accepted suffixes per kind (conversion factor to SI in parentheses):

    density        kg/m3 (1), g/cm3 (1e3)
    stiffness      Pa (1), kPa (1e3), MPa (1e6), GPa (1e9)
    length         m (1), cm (1e-2), mm (1e-3), um (1e-6)
    piezo          C/m2 (1)
    permittivity   F/m (1), nF/m (1e-9)
    capacitance    F/m2 (1), mF/m2 (1e-3), uF/m2 (1e-6), nF/m2 (1e-9)
    frequency      rad/s (1), krad/s (1e3), Mrad/s (1e6),
                   Hz (2*pi), kHz, MHz, GHz (angular conversion)

``^`` exponents (``m^3``) and the micro sign are accepted alongside the
plain ASCII spellings.
"""

from __future__ import annotations

import math

__all__ = ["UnitError", "parse_quantity", "UNIT_TABLES"]

_TWO_PI = 2.0 * math.pi


class UnitError(ValueError):
    """Raised for an unknown unit suffix or a malformed quantity."""


UNIT_TABLES: dict[str, dict[str, float]] = {
    "density": {"kg/m3": 1.0, "g/cm3": 1e3},
    "stiffness": {"Pa": 1.0, "kPa": 1e3, "MPa": 1e6, "GPa": 1e9},
    "length": {"m": 1.0, "cm": 1e-2, "mm": 1e-3, "um": 1e-6},
    "piezo": {"C/m2": 1.0},
    "permittivity": {"F/m": 1.0, "nF/m": 1e-9},
    "capacitance": {"F/m2": 1.0, "mF/m2": 1e-3, "uF/m2": 1e-6, "nF/m2": 1e-9},
    # Cycle frequencies convert to angular frequency.
    "frequency": {
        "rad/s": 1.0,
        "krad/s": 1e3,
        "Mrad/s": 1e6,
        "Hz": _TWO_PI,
        "kHz": _TWO_PI * 1e3,
        "MHz": _TWO_PI * 1e6,
        "GHz": _TWO_PI * 1e9,
    },
}


def _normalize_unit(unit: str) -> str:
    # "µF/m^2" and "uF/m2" are the same suffix.
    return unit.replace("µ", "u").replace("^", "").strip()


def parse_quantity(text: str, kind: str) -> float:
    """Parse ``<number>[ <unit>]`` into an SI value for the given kind.

    Args:
        text: Quantity string, e.g. ``"-11 uF/m2"``, ``"75 GPa"``, ``"1mm"``.
        kind: One of the keys of ``UNIT_TABLES``.

    Returns:
        The value converted to SI units (angular rad/s for ``frequency``).

    Raises:
        UnitError: If the number cannot be parsed or the suffix is not
            valid for the requested kind.
    """
    try:
        table = UNIT_TABLES[kind]
    except KeyError:
        raise UnitError(f"unknown quantity kind {kind!r}") from None

    s = text.strip()
    if not s:
        raise UnitError("empty quantity")

    # Longest prefix of s that parses as a float is the number; the rest
    # is the unit suffix.
    split = len(s)
    while split > 0:
        try:
            value = float(s[:split])
            break
        except ValueError:
            split -= 1
    else:
        raise UnitError(f"no number found in {text!r}")

    unit = s[split:].strip()
    if not unit:
        return value
    key = _normalize_unit(unit)
    for name, factor in table.items():
        if _normalize_unit(name) == key:
            return value * factor
    allowed = ", ".join(table)
    raise UnitError(f"unit {unit!r} not valid for {kind} (expected one of: {allowed})")
