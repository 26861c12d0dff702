"""Bit-exact construction and parsing of the silent-zero MAC frame formats.

Two frame classes exist on air:

* data frames: binary header (preamble, dest, src, type, length, sync),
  redundant-binary payload, binary trailer (CRC-32 over the *pre-encoding*
  payload bits);
* control frames (RTS / CTS / ACK): all binary, with the CRC-32 covering
  every field after the preamble.

Layout conventions pinned by this implementation (and locked by the golden
fixtures under tests/fixtures/):

* octet fields go on air least-significant bit first within each octet,
  octets in natural order; multi-octet integers are big-endian;
* the 2-bit frame type sits in the two high-order bits of a full octet,
  the remaining six bits are reserved-zero;
* the RBN payload goes on air most-significant digit first and always
  holds 8 * length + 1 digits (the carry slot);
* the length field counts pre-encoding payload octets;
* CRC-32 uses the usual reflected polynomial 0xEDB88320 with all-ones
  initial value and final complement, transmitted as 4 big-endian octets.

Header and trailer symbols are conventional energized binary: a 0 bit is a
distinguishable energized waveform, not silence.  Only payload zeros are
silent.  `energized_spans` exposes that distinction for carrier sensing and
energy pricing.

Symbol streams are tuples over {-1, 0, +1}; a channel may replace symbols
with ``None`` to mark garbling, and parsers treat such symbols as corruption
of the region they fall in.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from rbnsize import codec
from rbnsize.codec import RbnDecodeError
from rbnsize.energy import DeviceProfile, EnergyBreakdown

PREAMBLE_OCTETS = b"\xaa\xaa"  # 10101010 twice
SYNC_OCTETS = b"\xaa\xaa"
ADDRESS_OCTETS = 6
MAX_PAYLOAD_OCTETS = 1500

TYPE_DATA = 0
TYPE_RTS = 1
TYPE_CTS = 2
TYPE_ACK = 3
CONTROL_TYPE_NAMES = {TYPE_RTS: "RTS", TYPE_CTS: "CTS", TYPE_ACK: "ACK"}

DATA_HEADER_OCTETS = 19   # preamble 2, dest 6, src 6, type 1, length 2, sync 2
DATA_HEADER_SYMBOLS = DATA_HEADER_OCTETS * 8
TRAILER_SYMBOLS = 32
CONTROL_OCTETS = 21       # preamble 2, dest 6, src 6, type 1, length 2, crc 4
CONTROL_SYMBOLS = CONTROL_OCTETS * 8

_CRC_POLY_REFLECTED = 0xEDB88320


class FrameError(ValueError):
    """Base class for frame parse failures."""


class BadPreamble(FrameError):
    pass


class BadHeader(FrameError):
    """Garbled or invalid dest/src/type fields."""


class BadLength(FrameError):
    """Truncated stream or unusable length field."""


class BadSync(FrameError):
    pass


class CrcMismatch(FrameError):
    """Payload garbled: checksum failed or the payload would not decode."""


def crc32(bits: Sequence[int]) -> int:
    """CRC-32 of a bit sequence, consumed in stream order.

    Reflected form: init all-ones, one shift per bit, final complement.
    Feeding a byte string lsb-first per octet gives the familiar IEEE 802.3
    byte-stream CRC.
    """
    crc = 0xFFFFFFFF
    for b in bits:
        if b != 0 and b != 1:
            raise ValueError(f"CRC input must be bits, got {b!r}")
        crc ^= b
        crc = (crc >> 1) ^ _CRC_POLY_REFLECTED if crc & 1 else crc >> 1
    return crc ^ 0xFFFFFFFF


def crc32_octets(data: bytes) -> int:
    return crc32(codec.bits_from_octets(data))


@dataclass(frozen=True)
class Address:
    """6-octet node address; the high-order bit of octet 0 marks a group."""

    octets: bytes

    def __post_init__(self):
        if len(self.octets) != ADDRESS_OCTETS:
            raise ValueError(f"address needs {ADDRESS_OCTETS} octets")

    @classmethod
    def parse(cls, text: str) -> "Address":
        cleaned = text.replace(":", "").replace("-", "").strip()
        if len(cleaned) != 2 * ADDRESS_OCTETS:
            raise ValueError(f"cannot parse address {text!r}")
        return cls(bytes.fromhex(cleaned))

    @classmethod
    def broadcast(cls) -> "Address":
        return cls(b"\xff" * ADDRESS_OCTETS)

    @property
    def is_broadcast(self) -> bool:
        return self.octets == b"\xff" * ADDRESS_OCTETS

    @property
    def is_group(self) -> bool:
        return bool(self.octets[0] & 0x80)

    def __str__(self) -> str:
        return ":".join(f"{b:02x}" for b in self.octets)


def _octet_symbols(data: bytes) -> list[int]:
    """Octets as on-air symbols: lsb first within each octet."""
    return list(codec.bits_from_octets(data))


def _symbols_to_octets(symbols: Sequence, what: str, error: type) -> bytes:
    for s in symbols:
        if s != 0 and s != 1:
            raise error(f"non-binary symbol in {what}")
    return codec.octets_from_bits(tuple(symbols))


def _type_octet(code: int) -> int:
    return code << 6  # two high-order bits; low six reserved-zero


def data_symbol_count(payload_octets: int) -> int:
    """On-air symbols of a data frame with the given payload size."""
    return DATA_HEADER_SYMBOLS + 8 * payload_octets + 1 + TRAILER_SYMBOLS


def max_frame_duration(profile: DeviceProfile) -> Fraction:
    """Longest possible frame airtime in microseconds (the wait window b)."""
    return data_symbol_count(MAX_PAYLOAD_OCTETS) * profile.symbol_duration_us


@dataclass(frozen=True)
class DataFrame:
    dest: Address
    src: Address
    payload_bits: tuple[int, ...]   # pre-encoding binary payload
    payload_digits: tuple[int, ...]  # canonical RBN, 8 * length + 1 digits
    checksum: int

    @property
    def length(self) -> int:
        """Payload size in pre-encoding octets."""
        return len(self.payload_bits) // 8

    @property
    def payload_octets(self) -> bytes:
        return codec.octets_from_bits(self.payload_bits)

    def header_octets(self) -> bytes:
        return (PREAMBLE_OCTETS + self.dest.octets + self.src.octets
                + bytes([_type_octet(TYPE_DATA)])
                + self.length.to_bytes(2, "big") + SYNC_OCTETS)

    def trailer_octets(self) -> bytes:
        return self.checksum.to_bytes(4, "big")

    def symbols(self) -> tuple[int, ...]:
        out = _octet_symbols(self.header_octets())
        out.extend(reversed(self.payload_digits))  # msb-first on air
        out.extend(_octet_symbols(self.trailer_octets()))
        return tuple(out)

    def payload_span(self) -> tuple[int, int]:
        """Symbol index range [start, stop) of the RBN payload."""
        return DATA_HEADER_SYMBOLS, DATA_HEADER_SYMBOLS + len(self.payload_digits)

    def energized_spans(self) -> list[tuple[int, int]]:
        """Symbol index ranges that put energy on air (header, non-zero
        payload digits, trailer), merged where adjacent."""
        start, stop = self.payload_span()
        spans = [(0, start)]
        for idx, digit in enumerate(reversed(self.payload_digits)):
            if digit:
                pos = start + idx
                if spans[-1][1] == pos:
                    spans[-1] = (spans[-1][0], pos + 1)
                else:
                    spans.append((pos, pos + 1))
        total = stop + TRAILER_SYMBOLS
        if spans[-1][1] == stop:
            spans[-1] = (spans[-1][0], total)
        else:
            spans.append((stop, total))
        return spans


@dataclass(frozen=True)
class ControlFrame:
    kind: int  # TYPE_RTS, TYPE_CTS or TYPE_ACK
    dest: Address
    src: Address
    length: int  # payload octets the sender wants to move, or 0
    checksum: int

    @property
    def kind_name(self) -> str:
        return CONTROL_TYPE_NAMES[self.kind]

    def body_octets(self) -> bytes:
        return (self.dest.octets + self.src.octets
                + bytes([_type_octet(self.kind)]) + self.length.to_bytes(2, "big"))

    def symbols(self) -> tuple[int, ...]:
        return tuple(_octet_symbols(
            PREAMBLE_OCTETS + self.body_octets() + self.checksum.to_bytes(4, "big")))

    def energized_spans(self) -> list[tuple[int, int]]:
        return [(0, CONTROL_SYMBOLS)]  # control frames are entirely binary


def build_data_frame(dest: Address, src: Address,
                     payload_bits: Sequence[int]) -> DataFrame:
    """Assemble a data frame; the payload must be whole octets, <= 1500."""
    bits = tuple(payload_bits)
    if len(bits) % 8:
        raise ValueError("payload must be octet aligned")
    if len(bits) // 8 > MAX_PAYLOAD_OCTETS:
        raise ValueError(f"payload exceeds {MAX_PAYLOAD_OCTETS} octets")
    return DataFrame(
        dest=dest,
        src=src,
        payload_bits=bits,
        payload_digits=codec.encode_rbn(bits),
        checksum=crc32(bits),
    )


def build_control_frame(kind: int, dest: Address, src: Address,
                        length: int = 0) -> ControlFrame:
    if kind not in CONTROL_TYPE_NAMES:
        raise ValueError(f"control frame type must be RTS/CTS/ACK, got {kind}")
    if not 0 <= length <= MAX_PAYLOAD_OCTETS:
        raise ValueError(f"length must be in 0..{MAX_PAYLOAD_OCTETS}")
    body = (dest.octets + src.octets + bytes([_type_octet(kind)])
            + length.to_bytes(2, "big"))
    return ControlFrame(kind=kind, dest=dest, src=src, length=length,
                        checksum=crc32_octets(body))


def _parse_type_octet(symbols: Sequence, *, offset: int) -> int:
    octet = _symbols_to_octets(symbols[offset:offset + 8], "type field", BadHeader)[0]
    if octet & 0x3F:
        raise BadHeader("reserved type bits are not zero")
    return octet >> 6


def parse_data_frame(symbols: Sequence) -> DataFrame:
    """Parse and validate a data frame from an exact on-air symbol stream."""
    if len(symbols) < DATA_HEADER_SYMBOLS:
        raise BadLength("stream shorter than a data frame header")
    expected_preamble = _octet_symbols(PREAMBLE_OCTETS)
    if list(symbols[:16]) != expected_preamble:
        raise BadPreamble("preamble pattern mismatch")
    dest = Address(_symbols_to_octets(symbols[16:64], "destination", BadHeader))
    src = Address(_symbols_to_octets(symbols[64:112], "source", BadHeader))
    code = _parse_type_octet(symbols, offset=112)
    if code != TYPE_DATA:
        raise BadHeader(f"control frame type {code:02b} in a data-frame parse")
    length_octets = _symbols_to_octets(symbols[120:136], "length", BadLength)
    length = int.from_bytes(length_octets, "big")
    if length > MAX_PAYLOAD_OCTETS:
        raise BadLength(f"length {length} exceeds {MAX_PAYLOAD_OCTETS}")
    if list(symbols[136:152]) != _octet_symbols(SYNC_OCTETS):
        raise BadSync("sync pattern mismatch")
    total = data_symbol_count(length)
    if len(symbols) != total:
        raise BadLength(f"expected {total} symbols for length {length}, "
                        f"got {len(symbols)}")

    payload_symbols = symbols[152:152 + 8 * length + 1]
    digits = tuple(reversed(list(payload_symbols)))
    if any(d not in (-1, 0, 1) for d in digits):
        raise CrcMismatch("garbled payload symbols")
    try:
        decoded = codec.decode_rbn(digits)
    except RbnDecodeError as exc:
        raise CrcMismatch(f"payload does not decode: {exc}") from exc
    if decoded[-1] != 0:
        raise CrcMismatch("carry slot decoded non-zero")
    payload_bits = decoded[:-1]

    checksum_octets = _symbols_to_octets(symbols[total - 32:], "checksum", CrcMismatch)
    checksum = int.from_bytes(checksum_octets, "big")
    if checksum != crc32(payload_bits):
        raise CrcMismatch("checksum mismatch over decoded payload")
    return DataFrame(dest=dest, src=src, payload_bits=payload_bits,
                     payload_digits=digits, checksum=checksum)


def parse_control_frame(symbols: Sequence) -> ControlFrame:
    if len(symbols) != CONTROL_SYMBOLS:
        raise BadLength(f"control frames are {CONTROL_SYMBOLS} symbols, "
                        f"got {len(symbols)}")
    if list(symbols[:16]) != _octet_symbols(PREAMBLE_OCTETS):
        raise BadPreamble("preamble pattern mismatch")
    dest = Address(_symbols_to_octets(symbols[16:64], "destination", BadHeader))
    src = Address(_symbols_to_octets(symbols[64:112], "source", BadHeader))
    code = _parse_type_octet(symbols, offset=112)
    if code == TYPE_DATA:
        raise BadHeader("data frame type in a control-frame parse")
    length_octets = _symbols_to_octets(symbols[120:136], "length", BadLength)
    length = int.from_bytes(length_octets, "big")
    if length > MAX_PAYLOAD_OCTETS:
        raise BadLength(f"length {length} exceeds {MAX_PAYLOAD_OCTETS}")
    checksum_octets = _symbols_to_octets(symbols[136:], "checksum", CrcMismatch)
    checksum = int.from_bytes(checksum_octets, "big")
    body = (dest.octets + src.octets + bytes([_type_octet(code)])
            + length.to_bytes(2, "big"))
    if checksum != crc32_octets(body):
        raise CrcMismatch("control checksum mismatch")
    return ControlFrame(kind=code, dest=dest, src=src, length=length,
                        checksum=checksum)


def parse_frame(symbols: Sequence):
    """Dispatch on the type field: returns a DataFrame or a ControlFrame."""
    if len(symbols) < 120:
        raise BadLength("stream shorter than any frame header")
    code = _parse_type_octet(symbols, offset=112)
    if code == TYPE_DATA:
        return parse_data_frame(symbols)
    return parse_control_frame(symbols)


def frame_airtime_us(frame, profile: DeviceProfile) -> Fraction:
    return len(frame.symbols()) * profile.symbol_duration_us


def air_frame_energy(frame, profile: DeviceProfile,
                     count_transients: bool = False) -> EnergyBreakdown:
    """Price a whole on-air frame: header/trailer as energized binary,
    payload digits as silent-zero symbols."""
    symbols = frame.symbols()
    spans = frame.energized_spans()
    energized = [False] * len(symbols)
    for start, stop in spans:
        for i in range(start, stop):
            energized[i] = True
    tx = sum(1 for e in energized if e) * profile.energy_high_uj
    idle = sum(1 for e in energized if not e) * profile.energy_low_uj
    transitions = 0
    previous = False
    for e in energized:
        if e and not previous:
            transitions += 1
        previous = e
    transient = (transitions * profile.energy_turn_on_uj
                 if count_transients else Fraction(0))
    return EnergyBreakdown(mode="air", tx_uj=tx, idle_uj=idle,
                           transient_uj=transient)


# --- fixture text forms ------------------------------------------------------

_SIDECAR = {1: "+", 0: "0", -1: "-"}
_SIDECAR_INV = {"+": 1, "0": 0, "-": -1}


def symbols_to_sidecar(symbols: Sequence[int]) -> str:
    """One character per symbol: + for +1, 0 for silence/zero, - for -1."""
    return "".join(_SIDECAR[s] for s in symbols)


def sidecar_to_symbols(text: str) -> tuple[int, ...]:
    return tuple(_SIDECAR_INV[c] for c in text.strip())
