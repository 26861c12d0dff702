"""Price symbol streams on real radios and reproduce the savings table.

Run with:  python demos/03_radio_energy.py
"""

from fractions import Fraction

from rbnsize.codec import bits_from_text, encode_rbn
from rbnsize.energy import (
    frame_energy,
    gamma_dev,
    gamma_size,
    load_device_profiles,
    savings_vs_ebt,
)

radios = load_device_profiles()

print("theoretical fractional savings at 1024-bit frames:")
print(f"  {'device':18s} {'silent zeros':>12s} {'RBN encoder':>12s}")
for profile in radios.values():
    print(f"  {profile.name:18s} {float(gamma_size(profile)):>11.2%} "
          f"{float(gamma_dev(profile, 1024)):>11.2%}")

# Both columns are points on one law: savings(f) = (1 - f)(1 - Ilow/Ihigh),
# where f is the energized-symbol fraction per payload bit. Plain binary
# with silent zeros sits at f = 1/2; the encoder sits at (n + 2)/(4n).
maxim = radios["Maxim 2820"]
assert savings_vs_ebt(Fraction(1, 2), maxim) == gamma_size(maxim)
assert savings_vs_ebt(Fraction(1026, 4096), maxim) == gamma_dev(maxim, 1024)

# Pricing concrete streams, microjoules per frame:
bits = bits_from_text("110111" * 8)
digits = encode_rbn(bits)
for mode, stream in (("ebt", bits), ("size", bits), ("rbn", digits)):
    priced = frame_energy(stream, maxim, mode)
    print(f"\n{mode:4s} mode: tx {float(priced.tx_uj):8.3f} uJ  "
          f"idle {float(priced.idle_uj):7.3f} uJ  "
          f"total {float(priced.total_uj):8.3f} uJ")

# The turn-on transient is an optional refinement: each silence-to-energy
# edge costs one t_on at TX current when enabled.
with_transients = frame_energy(digits, maxim, "rbn", count_transients=True)
print(f"\nwith transients: +{float(with_transients.transient_uj):.3f} uJ "
      "over the steady-state pricing")
