"""Scenario configuration files: flat INI, one section per scenario."""

from __future__ import annotations

import configparser

from .errors import InvalidInputError, ParseError
from .scenarios import Scenario

_FLOAT_KEYS = {
    "launch_year",
    "n_b0",
    "a_innovation",
    "b_imitation",
    "n_g0",
    "k",
    "a",
    "delay",
    "pm_over_p0",
    "r",
    "q",
    "t_p",
    "r2",
    "q2",
    "t_p2",
    "market_size",
}
_BOOL_KEYS = {"recurrent"}
_REQUIRED = {"launch_year", "n_b0", "a_innovation", "b_imitation"}

# INI keys are case-insensitive, so the mixed-case scenario fields get
# explicit spellings
_FIELD_NAMES = {
    "a_innovation": "A",
    "b_imitation": "B",
    "n_b0": "n_B0",
    "n_g0": "n_G0",
    "r": "R",
    "q": "Q",
    "r2": "R2",
    "q2": "Q2",
}


def load_config(path) -> dict:
    """Read scenarios from an INI file keyed by section name.

    Keys mirror the scenario fields, with the innovation and imitation
    rates spelled ``a_innovation`` and ``b_imitation`` to keep the file
    case-insensitive.
    """
    parser = configparser.ConfigParser()
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except configparser.Error as exc:
        raise ParseError(f"{path}: {exc}") from None
    scenarios = {}
    for section in parser.sections():
        raw = dict(parser.items(section))
        unknown = set(raw) - _FLOAT_KEYS - _BOOL_KEYS
        if unknown:
            raise InvalidInputError(
                f"{path}: [{section}] has unknown keys {sorted(unknown)}"
            )
        missing = _REQUIRED - set(raw)
        if missing:
            raise InvalidInputError(
                f"{path}: [{section}] is missing keys {sorted(missing)}"
            )
        kwargs = {"name": section}
        for key, text in raw.items():
            if key in _BOOL_KEYS:
                try:
                    kwargs[key] = parser.getboolean(section, key)
                except ValueError:
                    raise ParseError(
                        f"{path}: [{section}] {key} must be a boolean, got {text!r}"
                    ) from None
                continue
            try:
                value = float(text)
            except ValueError:
                raise ParseError(
                    f"{path}: [{section}] {key} must be numeric, got {text!r}"
                ) from None
            kwargs[_FIELD_NAMES.get(key, key)] = value
        scenarios[section] = Scenario(**kwargs)
    if not scenarios:
        raise InvalidInputError(f"{path}: no scenario sections")
    return scenarios


def dump_config(scenarios: dict, path) -> None:
    """Write scenarios back out in the same INI layout."""
    parser = configparser.ConfigParser()
    for name, sc in scenarios.items():
        d = sc.to_dict()
        d.pop("name")
        section = {}
        for key, value in d.items():
            if value is None:
                continue
            if key == "A":
                key = "a_innovation"
            elif key == "B":
                key = "b_imitation"
            section[key] = str(value)
        parser[name] = section
    with open(path, "w") as fh:
        parser.write(fh)
