"""Lossless recoding between binary and redundant-binary (RBN) strings.

An RBN string is a radix-2 number written with digits from {-1, 0, +1}.
Because the digit set is redundant, a run of consecutive ones can be
rewritten as a single +1 above the run and a single -1 at its foot, turning
the interior of the run into zeros.  When zeros are transmitted as silence,
that rewrite converts most of a frame's energized symbols into free air
time.

Conventions used throughout this package:

* bit/digit sequences are tuples with index 0 = least significant position;
* an n-bit input always encodes to n+1 digits (the top "carry slot" is 0
  unless a run of ones reaches the most significant bit);
* text renderings are most-significant-digit first, with -1 written as
  "1̄" (1 + combining macron) or the ASCII alias "T";
* encoder output is *canonical*: it never contains two adjacent digits of
  opposite sign, which is what makes the decoder's single scan unambiguous.

All functions are pure and operate on immutable tuples; they are safe to
call concurrently.
"""

from __future__ import annotations

from typing import Iterable, Sequence

Bits = tuple[int, ...]
RbnDigits = tuple[int, ...]

MACRON_ONE = "1̄"  # text form of the digit -1


class RbnDecodeError(ValueError):
    """Raised when a digit string is not valid canonical encoder output."""


def _check_bits(bits: Sequence[int]) -> None:
    for b in bits:
        if b != 0 and b != 1:
            raise ValueError(f"bit values must be 0 or 1, got {b!r}")


def _check_digits(digits: Sequence[int]) -> None:
    for d in digits:
        if d not in (-1, 0, 1):
            raise ValueError(f"RBN digits must be -1, 0 or +1, got {d!r}")


def replace_runs(bits: Sequence[int]) -> RbnDigits:
    """Rewrite every run of k > 1 ones as +1 at position k+i, -1 at position i.

    Isolated ones are copied unchanged.  The output has exactly one digit
    more than the input; the extra top slot stays 0 unless a run of ones
    ends at the most significant bit.  A single scan from the least
    significant bit; runs formed by the rewrite itself are not re-scanned.
    """
    _check_bits(bits)
    n = len(bits)
    out = [0] * (n + 1)
    i = 0
    while i < n:
        if bits[i] == 0:
            i += 1
            continue
        j = i
        while j < n and bits[j] == 1:
            j += 1
        k = j - i
        if k == 1:
            out[i] = 1
        else:
            out[i] = -1
            out[j] = 1  # j == k + i; lands on a zero of the input or the carry slot
        i = j
    return tuple(out)


def fold_pairs(digits: Sequence[int]) -> RbnDigits:
    """Replace each adjacent pair (-1 at p+1, +1 at p) by (0 at p+1, -1 at p).

    One pass from the least significant digit.  On run-rewritten input a
    single pass is complete: the rewrite can never place a +1 directly
    below a foldable pair, so no new pair can appear behind the scan.
    """
    _check_digits(digits)
    out = list(digits)
    for p in range(len(out) - 1):
        if out[p] == 1 and out[p + 1] == -1:
            out[p] = -1
            out[p + 1] = 0
    return tuple(out)


def encode_rbn(bits: Sequence[int]) -> RbnDigits:
    """Encode an n-bit string into its (n+1)-digit canonical RBN form.

    The result preserves the numeric value of the input and never has more
    non-zero digits than the input has ones.
    """
    digits = fold_pairs(replace_runs(bits))
    assert is_canonical(digits), "encoder produced a non-canonical string"
    return digits


def decode_rbn(digits: Sequence[int], *, check_value: bool = False) -> Bits:
    """Decode canonical RBN digits back to the binary string of equal length.

    Scans from the least significant digit with a single run flag:

    * -1 opens a run (emit 1) or, inside a run, marks a folded zero (emit 0);
    * +1 closes a run (emit 0) or is an isolated one (emit 1);
    * 0 inside a run emits 1, outside a run emits 0.

    Only canonical encoder output is accepted.  Input with adjacent
    opposite-sign digits, or whose final run is never closed, cannot have
    come from the encoder and raises :class:`RbnDecodeError`.  With
    ``check_value`` the decoded bits are additionally re-priced through the
    value identity as a debugging safety net.

    Note the output includes the carry slot: callers that encoded an n-bit
    frame receive n+1 bits and drop the (always zero) top bit.
    """
    _check_digits(digits)
    for p in range(len(digits) - 1):
        if digits[p] * digits[p + 1] == -1:
            raise RbnDecodeError(
                f"adjacent opposite-sign digits at positions {p} and {p + 1}"
            )
    out = []
    runflag = False
    for d in digits:
        if d == -1:
            out.append(0 if runflag else 1)
            runflag = True
        elif d == 1:
            out.append(0 if runflag else 1)
            runflag = False
        else:
            out.append(1 if runflag else 0)
    if runflag:
        raise RbnDecodeError("run opened by -1 is never closed by a +1")
    bits = tuple(out)
    if check_value and value_of_bits(bits) != value_of_rbn(digits):
        raise RbnDecodeError("decoded value does not match digit value")
    return bits


def value_of_bits(bits: Sequence[int]) -> int:
    """Numeric value of a binary string (bit i weighs 2**i)."""
    _check_bits(bits)
    value = 0
    for i, b in enumerate(bits):
        if b:
            value += 1 << i
    return value


def value_of_rbn(digits: Sequence[int]) -> int:
    """Numeric value of an RBN string; may be negative for foreign input."""
    _check_digits(digits)
    value = 0
    for i, d in enumerate(digits):
        if d:
            value += d << i if d > 0 else -(1 << i)
    return value


def weight(digits: Sequence[int]) -> int:
    """Number of non-zero digits, i.e. energized symbols on air."""
    _check_digits(digits)
    return sum(1 for d in digits if d)


def popcount(bits: Sequence[int]) -> int:
    """Number of ones in a binary string."""
    _check_bits(bits)
    return sum(bits)


def is_canonical(digits: Sequence[int]) -> bool:
    """True when no two adjacent digits have opposite signs."""
    return all(digits[p] * digits[p + 1] != -1 for p in range(len(digits) - 1))


# --- conversions ---------------------------------------------------------

def int_to_bits(value: int, width: int) -> Bits:
    """Binary string of the given width for a non-negative integer."""
    if value < 0:
        raise ValueError("value must be non-negative")
    if width < 0 or (width > 0 and value >> width):
        raise ValueError(f"value {value} does not fit in {width} bits")
    if width == 0 and value:
        raise ValueError(f"value {value} does not fit in 0 bits")
    return tuple((value >> i) & 1 for i in range(width))


def bits_from_text(text: str) -> Bits:
    """Parse a most-significant-bit-first 0/1 string."""
    stripped = text.strip()
    if any(c not in "01" for c in stripped):
        raise ValueError(f"binary text may contain only 0 and 1: {text!r}")
    return tuple(int(c) for c in reversed(stripped))


def bits_to_text(bits: Sequence[int]) -> str:
    """Render bits most-significant first."""
    _check_bits(bits)
    return "".join(str(b) for b in reversed(bits))


def rbn_from_text(text: str) -> RbnDigits:
    """Parse a most-significant-digit-first RBN string.

    -1 is accepted either as "1̄" (1 + combining macron) or as the
    ASCII alias "T"/"t".
    """
    digits: list[int] = []
    chars = text.strip()
    i = 0
    while i < len(chars):
        c = chars[i]
        if c == "1" and i + 1 < len(chars) and chars[i + 1] == "̄":
            digits.append(-1)
            i += 2
        elif c == "1":
            digits.append(1)
            i += 1
        elif c == "0":
            digits.append(0)
            i += 1
        elif c in ("T", "t"):
            digits.append(-1)
            i += 1
        else:
            raise ValueError(f"invalid RBN character {c!r} at index {i}")
    return tuple(reversed(digits))


def rbn_to_text(digits: Sequence[int], *, ascii_minus: bool = False) -> str:
    """Render RBN digits most-significant first; -1 as "1̄" or "T"."""
    _check_digits(digits)
    minus = "T" if ascii_minus else MACRON_ONE
    return "".join(
        "1" if d == 1 else minus if d == -1 else "0" for d in reversed(digits)
    )


def bits_from_octets(data: bytes) -> Bits:
    """Bit string of a byte sequence; bit 0 of octet 0 is the frame's lsb."""
    out = []
    for byte in data:
        for i in range(8):
            out.append((byte >> i) & 1)
    return tuple(out)


def octets_from_bits(bits: Sequence[int]) -> bytes:
    """Inverse of :func:`bits_from_octets`; the length must be a multiple of 8."""
    _check_bits(bits)
    if len(bits) % 8:
        raise ValueError(f"bit count {len(bits)} is not a multiple of 8")
    out = bytearray(len(bits) // 8)
    for i, b in enumerate(bits):
        if b:
            out[i >> 3] |= 1 << (i & 7)
    return bytes(out)


def encode_frames(bits: Sequence[int], frame_bits: int) -> Iterable[RbnDigits]:
    """Encode a long bit stream frame by frame.

    Frames are independent: a run of ones crossing a frame boundary is
    treated as two separate runs.  The final partial frame is kept.
    """
    if frame_bits < 1:
        raise ValueError("frame_bits must be positive")
    for start in range(0, len(bits), frame_bits):
        yield encode_rbn(tuple(bits[start:start + frame_bits]))
