import pytest

from squid_interface import constants as const
from squid_interface.units import parse_quantity


@pytest.mark.parametrize(
    "text,expected",
    [
        ("500pH", 500e-12),
        ("50fF", 50e-15),
        ("2uA", 2e-6),
        ("2 µA", 2e-6),
        ("10um", 10e-6),
        ("1ns", 1e-9),
        ("0.33ps", 0.33e-12),
        ("25.8ohm", 25.8),
        ("1kohm", 1e3),
        ("100 mm", 0.1),
        ("3m", 3.0),
        ("1e-9", 1e-9),
        ("-2.5mA", -2.5e-3),
        (".5nH", 0.5e-9),
    ],
)
def test_parse(text, expected):
    assert parse_quantity(text) == pytest.approx(expected, rel=1e-15)


def test_electronvolts():
    assert parse_quantity("180ueV") == pytest.approx(180e-6 * const.e, rel=1e-15)
    assert parse_quantity("180ueV") == pytest.approx(const.AL_GAP, rel=1e-15)


def test_numbers_pass_through():
    assert parse_quantity(3) == 3.0
    assert parse_quantity(2.5e-6) == 2.5e-6


@pytest.mark.parametrize("bad", ["", "pH", "5 parsecs", "1xH", "1..2F"])
def test_rejects(bad):
    with pytest.raises(ValueError):
        parse_quantity(bad)
