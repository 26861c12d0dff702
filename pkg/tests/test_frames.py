"""Frame-layer tests: CRC vectors, golden fixture, parse errors, corruption sweep."""

import random
import zlib
from pathlib import Path

import pytest

from rbnsize import codec, frames
from rbnsize.energy import get_profile
from rbnsize.frames import (
    Address,
    BadHeader,
    BadLength,
    BadPreamble,
    BadSync,
    CrcMismatch,
    TYPE_ACK,
    TYPE_CTS,
    TYPE_RTS,
    build_control_frame,
    build_data_frame,
    crc32,
    crc32_octets,
    parse_control_frame,
    parse_data_frame,
    parse_frame,
)

FIXTURES = Path(__file__).parent / "fixtures"


def make_data_frame(payload: bytes, dest="ff:ff:ff:ff:ff:ff",
                    src="00:00:00:00:00:01"):
    return build_data_frame(Address.parse(dest), Address.parse(src),
                            codec.bits_from_octets(payload))


# --- CRC ---------------------------------------------------------------------

def test_crc_check_value():
    assert crc32_octets(b"123456789") == 0xCBF43926


def test_crc_empty_input():
    assert crc32(()) == 0


def test_crc_matches_zlib_reference():
    rng = random.Random(17)
    for _ in range(100):
        data = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 80)))
        assert crc32_octets(data) == zlib.crc32(data)


def test_single_bit_flip_always_changes_crc():
    bits = list(codec.bits_from_octets(b"\xde\xad\xbe\xef"))
    reference = crc32(tuple(bits))
    for i in range(len(bits)):
        flipped = list(bits)
        flipped[i] ^= 1
        assert crc32(tuple(flipped)) != reference


# --- addresses ---------------------------------------------------------------

def test_address_forms():
    addr = Address.parse("02:00:00:00:00:07")
    assert str(addr) == "02:00:00:00:00:07"
    assert not addr.is_group and not addr.is_broadcast
    assert Address.parse("80:00:00:00:00:00").is_group
    assert Address.broadcast().is_broadcast and Address.broadcast().is_group


def test_address_validation():
    with pytest.raises(ValueError):
        Address(b"\x00\x01")
    with pytest.raises(ValueError):
        Address.parse("00:01")


# --- golden fixture ------------------------------------------------------------

def test_golden_vector_bit_exact():
    frame = make_data_frame(b"\xab")
    image = frame.header_octets() + frame.payload_octets + frame.trailer_octets()
    assert image.hex() == (FIXTURES / "golden_data_frame.hex").read_text().strip()
    sidecar = (FIXTURES / "golden_data_frame.symbols").read_text().strip()
    assert frames.symbols_to_sidecar(frame.symbols()) == sidecar
    assert parse_data_frame(frames.sidecar_to_symbols(sidecar)) == frame


# --- building ------------------------------------------------------------------

def test_payload_0xff_symbols():
    frame = make_data_frame(b"\xff")
    assert frame.length == 1
    assert codec.rbn_to_text(frame.payload_digits, ascii_minus=True) == "10000000T"


def test_empty_payload_frame():
    frame = make_data_frame(b"")
    assert frame.length == 0
    assert frame.payload_digits == (0,)
    assert frame.checksum == crc32(())
    assert parse_data_frame(frame.symbols()) == frame


def test_oversize_payload_rejected():
    with pytest.raises(ValueError):
        make_data_frame(b"\x00" * 1501)
    with pytest.raises(ValueError):
        build_data_frame(Address.broadcast(), Address.broadcast(), (1, 0, 1))


def test_data_frame_symbol_budget():
    profile = get_profile("Maxim 2820")
    assert frames.max_frame_duration(profile) == 243700
    frame = make_data_frame(b"\x00" * 1500)
    assert len(frame.symbols()) * profile.symbol_duration_us == 243700
    small = make_data_frame(b"\xaa" * 3)
    assert frames.frame_airtime_us(small, profile) < 243700


def test_max_duration_scales_with_symbol_time():
    from rbnsize.energy import load_device_profiles

    for profile in load_device_profiles().values():
        assert (frames.max_frame_duration(profile)
                == 12185 * profile.symbol_duration_us)


def test_round_trip_random_payloads():
    rng = random.Random(5)
    for _ in range(40):
        payload = bytes(rng.randrange(256) for _ in range(rng.randrange(0, 24)))
        frame = make_data_frame(payload)
        parsed = parse_data_frame(frame.symbols())
        assert parsed == frame
        assert parsed.payload_octets == payload


# --- control frames --------------------------------------------------------------

@pytest.mark.parametrize("kind", [TYPE_RTS, TYPE_CTS, TYPE_ACK])
def test_control_round_trip(kind):
    frame = build_control_frame(kind, Address.parse("00:00:00:00:00:02"),
                                Address.parse("00:00:00:00:00:01"), length=17)
    parsed = parse_control_frame(frame.symbols())
    assert parsed == frame
    assert parsed.kind_name == frames.CONTROL_TYPE_NAMES[kind]


def test_ack_with_zero_length():
    ack = build_control_frame(TYPE_ACK, Address.parse("00:00:00:00:00:01"),
                              Address.parse("00:00:00:00:00:02"))
    assert ack.length == 0
    assert parse_control_frame(ack.symbols()).length == 0


def test_data_type_rejected_in_control_parse():
    data = make_data_frame(b"")
    with pytest.raises(BadHeader):
        parse_control_frame(data.symbols()[:frames.CONTROL_SYMBOLS])


def test_control_type_rejected_in_data_parse():
    rts = build_control_frame(TYPE_RTS, Address.broadcast(), Address.broadcast())
    padded = rts.symbols() + (0,) * (frames.data_symbol_count(0) - 168)
    with pytest.raises(BadHeader):
        parse_data_frame(padded)


def test_build_control_rejects_bad_kind():
    with pytest.raises(ValueError):
        build_control_frame(frames.TYPE_DATA, Address.broadcast(),
                            Address.broadcast())


def test_parse_frame_dispatch():
    data = make_data_frame(b"\x42")
    rts = build_control_frame(TYPE_RTS, Address.broadcast(), Address.broadcast())
    assert parse_frame(data.symbols()) == data
    assert parse_frame(rts.symbols()) == rts


# --- parse errors -----------------------------------------------------------------

def test_truncated_stream():
    frame = make_data_frame(b"\xab\xcd")
    with pytest.raises(BadLength):
        parse_data_frame(frame.symbols()[:80])
    with pytest.raises(BadLength):
        parse_data_frame(frame.symbols()[:-5])


def test_bad_preamble():
    symbols = list(make_data_frame(b"\xab").symbols())
    symbols[0] ^= 1
    with pytest.raises(BadPreamble):
        parse_data_frame(symbols)


def test_bad_sync():
    symbols = list(make_data_frame(b"\xab").symbols())
    symbols[136] ^= 1
    with pytest.raises(BadSync):
        parse_data_frame(symbols)


def test_garbled_header_symbol():
    symbols = list(make_data_frame(b"\xab").symbols())
    symbols[20] = None
    with pytest.raises(BadHeader):
        parse_data_frame(symbols)


def test_garbled_length_field():
    symbols = list(make_data_frame(b"\xab").symbols())
    symbols[125] = None
    with pytest.raises(BadLength):
        parse_data_frame(symbols)


def test_garbled_payload_symbol():
    symbols = list(make_data_frame(b"\xab").symbols())
    start, stop = make_data_frame(b"\xab").payload_span()
    symbols[start + 2] = None
    with pytest.raises(CrcMismatch):
        parse_data_frame(symbols)


def test_flipping_nonzero_payload_symbol_to_silence_is_caught():
    frame = make_data_frame(b"\x37\x99\x00\xf1")
    symbols = list(frame.symbols())
    start, stop = frame.payload_span()
    for i in range(start, stop):
        if symbols[i] != 0:
            corrupted = list(symbols)
            corrupted[i] = 0
            with pytest.raises(CrcMismatch):
                parse_data_frame(corrupted)


def test_corruption_sweep_never_silently_wrong():
    # every single-symbol substitution in the payload region either raises
    # or decodes to the identical payload
    frame = make_data_frame(b"\x37\x99\x00\xf1")
    symbols = list(frame.symbols())
    start, stop = frame.payload_span()
    outcomes = {"error": 0, "identical": 0}
    for i in range(start, stop):
        for replacement in (-1, 0, 1):
            if replacement == symbols[i]:
                continue
            corrupted = list(symbols)
            corrupted[i] = replacement
            try:
                parsed = parse_data_frame(corrupted)
            except frames.FrameError:
                outcomes["error"] += 1
            else:
                assert parsed.payload_bits == frame.payload_bits
                outcomes["identical"] += 1
    assert outcomes["error"] > 0


def test_trailer_corruption_is_crc_mismatch():
    frame = make_data_frame(b"\x10\x20")
    symbols = list(frame.symbols())
    symbols[-1] ^= 1
    with pytest.raises(CrcMismatch):
        parse_data_frame(symbols)


# --- energy pricing of whole frames ---------------------------------------------

def test_air_energy_prices_header_as_energized_binary():
    profile = get_profile("Maxim 2820")
    frame = make_data_frame(b"\x00\x00")  # payload all silence
    out = frames.air_frame_energy(frame, profile)
    header_trailer = frames.DATA_HEADER_SYMBOLS + frames.TRAILER_SYMBOLS
    assert out.tx_uj == header_trailer * profile.energy_high_uj
    assert out.idle_uj == 17 * profile.energy_low_uj


def test_air_energy_transients():
    profile = get_profile("Maxim 2820")
    frame = make_data_frame(b"\x0f")  # one run: one energized island mid-payload
    on = frames.air_frame_energy(frame, profile, count_transients=True)
    off = frames.air_frame_energy(frame, profile)
    assert on.tx_uj == off.tx_uj and on.idle_uj == off.idle_uj
    assert on.transient_uj > 0 and off.transient_uj == 0


def test_sidecar_round_trip():
    frame = make_data_frame(b"\x5a")
    text = frames.symbols_to_sidecar(frame.symbols())
    assert frames.sidecar_to_symbols(text) == frame.symbols()
