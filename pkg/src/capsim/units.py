"""Unit-suffixed configuration fields.

All internal rates are angular (rad/s), times are seconds, lengths are
meters.  Config files attach an explicit suffix to every dimensionful key
("gamma_2pi_MHz", "sigma_t_ns", "l_cav_cm"); ingestion strips the suffix
and rescales.  Keys without a known suffix pass through unchanged and are
assumed to already be in base units.
"""

import math

# Suffix -> multiplicative factor to base units.  Longest match wins.
_SUFFIXES = {
    "_2pi_THz": 2 * math.pi * 1e12,
    "_2pi_GHz": 2 * math.pi * 1e9,
    "_2pi_MHz": 2 * math.pi * 1e6,
    "_2pi_kHz": 2 * math.pi * 1e3,
    "_2pi_Hz": 2 * math.pi,
    "_rad_s": 1.0,
    "_per_s": 1.0,
    "_ns": 1e-9,
    "_us": 1e-6,
    "_ms": 1e-3,
    "_s": 1.0,
    "_cm": 1e-2,
    "_mm": 1e-3,
    "_m": 1.0,
}

_ORDERED = sorted(_SUFFIXES, key=len, reverse=True)


def strip_suffix(key, reserved=()):
    """Return (base_name, factor) for a possibly unit-suffixed key.

    Keys listed in reserved are canonical names (possibly ending in what
    looks like a suffix, e.g. 'r_m') and pass through unscaled.
    """
    if key in reserved:
        return key, 1.0
    for suf in _ORDERED:
        if key.endswith(suf) and len(key) > len(suf):
            return key[: -len(suf)], _SUFFIXES[suf]
    return key, 1.0


def normalize(mapping, reserved=()):
    """Convert a {key: value} mapping to base units, stripping suffixes.

    Non-numeric values pass through untouched.  Raises ValueError when two
    keys collapse onto the same base name.
    """
    out = {}
    for key, value in mapping.items():
        base, factor = strip_suffix(key, reserved)
        if base in out:
            raise ValueError(f"duplicate parameter after unit conversion: {base!r}")
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            out[base] = value
        else:
            out[base] = value * factor
    return out
