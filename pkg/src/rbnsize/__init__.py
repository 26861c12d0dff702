"""Redundant-binary silent-zero transmission toolkit.

Subpackages and modules:

* :mod:`rbnsize.codec` - binary <-> RBN recoding and value oracles
* :mod:`rbnsize.runstats` - run-length statistics over all n-bit strings
* :mod:`rbnsize.energy` - radio profiles and per-symbol energy pricing
* :mod:`rbnsize.frames` - data/control frame construction and parsing
* :mod:`rbnsize.sim` - discrete-event CSMA/CA simulation over a silent-zero channel
* :mod:`rbnsize.bench` - corpus framing benchmarks
* :mod:`rbnsize.cli` - command line front end
"""

from rbnsize.codec import (
    RbnDecodeError,
    bits_from_octets,
    bits_from_text,
    bits_to_text,
    decode_rbn,
    encode_rbn,
    fold_pairs,
    int_to_bits,
    is_canonical,
    octets_from_bits,
    popcount,
    rbn_from_text,
    rbn_to_text,
    replace_runs,
    value_of_bits,
    value_of_rbn,
    weight,
)

__version__ = "0.1.0"

__all__ = [
    "RbnDecodeError",
    "bits_from_octets",
    "bits_from_text",
    "bits_to_text",
    "decode_rbn",
    "encode_rbn",
    "fold_pairs",
    "int_to_bits",
    "is_canonical",
    "octets_from_bits",
    "popcount",
    "rbn_from_text",
    "rbn_to_text",
    "replace_runs",
    "value_of_bits",
    "value_of_rbn",
    "weight",
    "__version__",
]
