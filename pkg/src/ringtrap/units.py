"""Unit conversions between the report/config vocabulary and internal SI.

Field amplitudes are quoted in gauss, gradients in G/cm, frequencies in MHz
and phases in degrees at the configuration boundary; everything internal is
tesla, T/m, rad/s and radians. Each supported conversion is an exact linear
map, so round trips are identities to machine precision.
"""

from __future__ import annotations

import math

from .constants import K_B
from .errors import UnitError

# multiplicative factors, keyed by (from, to)
_FACTORS = {
    ("G", "T"): 1e-4,
    ("G/cm", "T/m"): 1e-2,
    ("MHz", "rad/s"): 2 * math.pi * 1e6,
    ("deg", "rad"): math.pi / 180.0,
    ("uK", "J"): K_B * 1e-6,
}
for (a, b), f in list(_FACTORS.items()):
    _FACTORS[(b, a)] = 1.0 / f

_ALIASES = {"µK": "uK", "μK": "uK", "gauss": "G", "degree": "deg"}


def convert_units(value: float, from_unit: str, to_unit: str) -> float:
    """Convert ``value`` between a supported unit pair.

    Supported pairs (either direction): G<->T, G/cm<->T/m, MHz<->rad/s,
    deg<->rad, uK<->J. Anything else raises :class:`UnitError`.
    """
    fu = _ALIASES.get(from_unit, from_unit)
    tu = _ALIASES.get(to_unit, to_unit)
    if fu == tu:
        raise UnitError(f"no conversion defined from {from_unit!r} to itself")
    try:
        factor = _FACTORS[(fu, tu)]
    except KeyError:
        raise UnitError(
            f"unsupported unit pair {from_unit!r} -> {to_unit!r}"
        ) from None
    return value * factor


def gauss_to_tesla(b_gauss: float) -> float:
    return b_gauss * 1e-4


def tesla_to_gauss(b_tesla: float) -> float:
    return b_tesla * 1e4


def gauss_per_cm_to_tesla_per_m(grad: float) -> float:
    return grad * 1e-2


def tesla_per_m_to_gauss_per_cm(grad: float) -> float:
    return grad * 1e2


def mhz_to_rad_per_s(f_mhz: float) -> float:
    return f_mhz * 2 * math.pi * 1e6


def rad_per_s_to_mhz(omega: float) -> float:
    return omega / (2 * math.pi * 1e6)


def joule_to_microkelvin(energy: float) -> float:
    return energy / (K_B * 1e-6)


def microkelvin_to_joule(t_uk: float) -> float:
    return t_uk * K_B * 1e-6
