"""Walk through the two-step recoding that turns bit runs into silence.

Run with:  python demos/01_recoding_walkthrough.py
"""

from rbnsize.codec import (
    bits_from_text,
    decode_rbn,
    encode_rbn,
    fold_pairs,
    popcount,
    rbn_to_text,
    replace_runs,
    value_of_bits,
    value_of_rbn,
    weight,
)

text = "110111"
bits = bits_from_text(text)
print(f"input bits        : {text}   (value {value_of_bits(bits)})")

# Step 1: every run of two or more ones becomes one +1 above the run and
# one -1 at its foot. The string grows by one digit (the carry slot).
step1 = replace_runs(bits)
print(f"after run rewrite : {rbn_to_text(step1, ascii_minus=True)}   "
      f"(value {value_of_rbn(step1)})")

# Step 2: a -1 directly above a +1 marks a single zero trapped between two
# runs; the pair folds into a single -1, saving one energized symbol.
step2 = fold_pairs(step1)
print(f"after pair fold   : {rbn_to_text(step2, ascii_minus=True)}   "
      f"(value {value_of_rbn(step2)})")

encoded = encode_rbn(bits)
assert encoded == step2
print(f"energized symbols : {popcount(bits)} ones -> {weight(encoded)} non-zeros")

# The receiver runs a single scan with one flag and recovers the bits;
# the top (carry) digit always decodes to a zero bit and is dropped.
decoded = decode_rbn(encoded)
print(f"decoded           : {''.join(map(str, reversed(decoded[:-1])))}")
assert decoded[:-1] == bits

# Longer runs save more: a frame of 1024 ones collapses to two symbols.
solid = (1,) * 1024
print(f"\n1024 ones encode to {weight(encode_rbn(solid))} energized symbols; "
      "everything between them is silent air")
