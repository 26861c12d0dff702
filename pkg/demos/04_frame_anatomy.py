"""Build a data frame, look at its on-air anatomy, and corrupt it.

Run with:  python demos/04_frame_anatomy.py
"""

from rbnsize.codec import bits_from_octets, rbn_to_text
from rbnsize.frames import (
    Address,
    CrcMismatch,
    build_control_frame,
    build_data_frame,
    parse_data_frame,
    symbols_to_sidecar,
    TYPE_RTS,
)

dest = Address.parse("02:1a:00:00:00:07")
src = Address.parse("00:00:00:00:00:01")
frame = build_data_frame(dest, src, bits_from_octets(b"\xab\x00\xff"))

print("header octets :", frame.header_octets().hex())
print("payload bits  :", frame.payload_octets.hex(), f"({frame.length} octets)")
print("payload on air:", rbn_to_text(frame.payload_digits, ascii_minus=True))
print("checksum      :", f"{frame.checksum:08x}", "(over the binary payload only)")

symbols = frame.symbols()
start, stop = frame.payload_span()
print(f"\non-air stream : {len(symbols)} symbols "
      f"(header {start}, payload {stop - start}, trailer {len(symbols) - stop})")
print("sidecar       :", symbols_to_sidecar(symbols)[:80], "...")

# Header and trailer are conventional energized binary; only payload zeros
# are silent. That is what the energized spans describe:
spans = frame.energized_spans()
energized = sum(b - a for a, b in spans)
print(f"energized     : {energized}/{len(symbols)} symbols in {len(spans)} spans")

# Round-trip, then corrupt one payload symbol: the checksum catches it.
assert parse_data_frame(symbols) == frame
damaged = list(symbols)
damaged[start + 5] = 0 if damaged[start + 5] else 1
try:
    parse_data_frame(damaged)
except CrcMismatch as exc:
    print(f"\ncorrupting one payload symbol -> CrcMismatch: {exc}")

rts = build_control_frame(TYPE_RTS, dest, src, length=3)
print(f"\nRTS control frame: {len(rts.symbols())} symbols, "
      f"length field {rts.length} announces the payload to come")
