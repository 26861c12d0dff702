"""Radio profiles and per-symbol transmit-energy pricing.

Three transmission modes are priced:

* ``ebt``  - both bit values are energized symbols (conventional on-air
  coding); every symbol costs TX-state current.
* ``size`` - silent-zero binary: 1 bits cost TX current, 0 bits are silence
  and cost only the active-state current.
* ``rbn``  - silent-zero redundant binary: non-zero digits cost TX current,
  zeros are silence.

Units are fixed at volts, milliamps and microseconds; energies come out in
microjoules.  All arithmetic is exact `Fraction` arithmetic so that the
savings ratios keep the two-decimal savings figures exact instead of float-noisy.

The fractional-savings laws implemented here:

    savings(f) = (1 - f) * (1 - i_low / i_high)

where f is the fraction of energized symbols per binary payload bit.
Silent-zero binary sits at f = 1/2 on average; the redundant-binary encoder
sits at f = (n + 2) / (4 n) for n-bit frames.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from typing import Sequence, Union

Number = Union[int, float, str, Fraction]

MODE_EBT = "ebt"
MODE_SIZE = "size"
MODE_RBN = "rbn"
MODES = (MODE_EBT, MODE_SIZE, MODE_RBN)

_UJ_PER_V_MA_US = Fraction(1, 1000)  # V * mA * us = nJ; 1000 nJ per uJ


def as_fraction(value: Number) -> Fraction:
    """Exact Fraction from int/str/Fraction; floats go through repr."""
    if isinstance(value, float):
        return Fraction(repr(value))
    return Fraction(value)


@dataclass(frozen=True)
class DeviceProfile:
    """Electrical parameters of one radio.

    data_rate is in kilobits/second, symbol_duration and t_on in
    microseconds, v_cc in volts, currents in milliamps.  i_high is the
    TX-state draw, i_low the active-state draw.
    """

    name: str
    data_rate_kbps: Fraction
    symbol_duration_us: Fraction
    v_cc: Fraction
    i_high_ma: Fraction
    i_low_ma: Fraction
    t_on_us: Fraction

    def __post_init__(self):
        if self.symbol_duration_us <= 0:
            raise ValueError("symbol duration must be positive")
        if not self.i_high_ma > self.i_low_ma >= 0:
            raise ValueError("need i_high > i_low >= 0")
        # rate and duration describe the same clock: rate = 1/duration
        product = self.data_rate_kbps * self.symbol_duration_us  # kbit/s * us
        if abs(product - 1000) > 10:  # 1% of the 1000 (kbps*us per bit) ideal
            raise ValueError(
                f"data rate {self.data_rate_kbps} kbps inconsistent with "
                f"symbol duration {self.symbol_duration_us} us"
            )

    @classmethod
    def create(cls, name: str, data_rate_kbps: Number, symbol_duration_us: Number,
               v_cc: Number, i_high_ma: Number, i_low_ma: Number,
               t_on_us: Number) -> "DeviceProfile":
        return cls(
            name=name,
            data_rate_kbps=as_fraction(data_rate_kbps),
            symbol_duration_us=as_fraction(symbol_duration_us),
            v_cc=as_fraction(v_cc),
            i_high_ma=as_fraction(i_high_ma),
            i_low_ma=as_fraction(i_low_ma),
            t_on_us=as_fraction(t_on_us),
        )

    @property
    def energy_high_uj(self) -> Fraction:
        """Energy of one energized symbol."""
        return self.v_cc * self.i_high_ma * self.symbol_duration_us * _UJ_PER_V_MA_US

    @property
    def energy_low_uj(self) -> Fraction:
        """Energy of one silent symbol (radio stays in the active state)."""
        return self.v_cc * self.i_low_ma * self.symbol_duration_us * _UJ_PER_V_MA_US

    @property
    def energy_turn_on_uj(self) -> Fraction:
        """Energy of one silent-to-energized transient."""
        return self.v_cc * self.i_high_ma * self.t_on_us * _UJ_PER_V_MA_US


@dataclass(frozen=True)
class EnergyBreakdown:
    """Energy of one symbol stream under one mode, in microjoules."""

    mode: str
    tx_uj: Fraction
    idle_uj: Fraction
    transient_uj: Fraction

    @property
    def total_uj(self) -> Fraction:
        return self.tx_uj + self.idle_uj + self.transient_uj


def gamma_size(profile: DeviceProfile) -> Fraction:
    """Fractional savings of silent-zero binary over fully energized binary."""
    return (profile.i_high_ma - profile.i_low_ma) / (2 * profile.i_high_ma)


def gamma_dev(profile: DeviceProfile, n: int) -> Fraction:
    """Fractional savings of the RBN encoder over fully energized binary."""
    if n < 1:
        raise ValueError("frame size must be at least 1 bit")
    return (1 - Fraction(n + 2, 4 * n)) * (1 - profile.i_low_ma / profile.i_high_ma)


def savings_vs_ebt(nonzero_fraction: Number, profile: DeviceProfile) -> Fraction:
    """Savings for an arbitrary energized-symbol fraction per payload bit."""
    f = as_fraction(nonzero_fraction)
    if not 0 <= f <= 1:
        raise ValueError(f"nonzero fraction must be within [0, 1], got {f}")
    return (1 - f) * (1 - profile.i_low_ma / profile.i_high_ma)


def frame_energy(symbols: Sequence[int], profile: DeviceProfile, mode: str,
                 count_transients: bool = False) -> EnergyBreakdown:
    """Price a symbol stream under the given transmission mode.

    ``ebt`` and ``size`` accept binary streams only; ``rbn`` accepts digits
    from {-1, 0, +1}.  With ``count_transients``, each silent-to-energized
    edge (including an energized first symbol) adds one turn-on transient;
    under ``ebt`` the transmitter stays on for the whole stream.
    """
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}; expected one of {MODES}")
    if mode == MODE_RBN:
        allowed = (-1, 0, 1)
    else:
        allowed = (0, 1)
    for s in symbols:
        if s not in allowed:
            raise ValueError(f"symbol {s!r} invalid for mode {mode!r}")

    e_high = profile.energy_high_uj
    e_low = profile.energy_low_uj
    tx = idle = Fraction(0)
    transitions = 0
    if mode == MODE_EBT:
        tx = len(symbols) * e_high
        transitions = 1 if symbols else 0
    else:
        previous_silent = True
        for s in symbols:
            if s:
                tx += e_high
                if previous_silent:
                    transitions += 1
                previous_silent = False
            else:
                idle += e_low
                previous_silent = True
    transient = transitions * profile.energy_turn_on_uj if count_transients else Fraction(0)
    return EnergyBreakdown(mode=mode, tx_uj=tx, idle_uj=idle, transient_uj=transient)


# --- shipped radio profiles -------------------------------------------------

def _profiles_from_config(config: dict) -> dict[str, DeviceProfile]:
    if config.get("version") != 1:
        raise ValueError(f"unsupported radio config version {config.get('version')!r}")
    profiles = {}
    for entry in config["profiles"]:
        profile = DeviceProfile.create(
            name=entry["name"],
            data_rate_kbps=entry["data_rate_kbps"],
            symbol_duration_us=entry["symbol_duration_us"],
            v_cc=entry["v_cc_v"],
            i_high_ma=entry["i_high_ma"],
            i_low_ma=entry["i_low_ma"],
            t_on_us=entry["t_on_us"],
        )
        profiles[profile.name] = profile
    return profiles


def load_device_profiles(path: str | None = None) -> dict[str, DeviceProfile]:
    """Load radio profiles from a config file (default: the shipped set)."""
    if path is None:
        text = resources.files("rbnsize").joinpath("radios.json").read_text()
    else:
        with open(path, "r", encoding="utf-8") as fh:
            text = fh.read()
    return _profiles_from_config(json.loads(text))


def get_profile(name: str, path: str | None = None) -> DeviceProfile:
    """Look up a profile by exact or case/space-insensitive name."""
    profiles = load_device_profiles(path)
    if name in profiles:
        return profiles[name]
    folded = name.casefold().replace(" ", "").replace("-", "").replace("_", "")
    for profile in profiles.values():
        if profile.name.casefold().replace(" ", "") == folded:
            return profile
    raise KeyError(f"no radio profile named {name!r}; known: {sorted(profiles)}")


def shipped_radio_names() -> list[str]:
    """The four radios shipped with the package, in config order."""
    return ["Maxim 2820", "Chipcon CC2510Fx", "RFM TR1000", "Maxim 1479"]
