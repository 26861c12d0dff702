"""Measure real files: how much of their airtime the encoder silences.

Run with:  python demos/06_corpus_measurements.py

The shipped mini corpus keeps this runnable offline; point SUITE_DIR at a
downloaded compression corpus for real measurements
(rbnsize bench download --dest corpora --record-checksums).
"""

from pathlib import Path

from rbnsize.bench import (
    analyze_dir,
    device_report,
    frame_size_sweep,
    mini_corpus_dir,
)
from rbnsize.energy import load_device_profiles

SUITE_DIR = mini_corpus_dir()

report = analyze_dir(SUITE_DIR)
print(f"suite: {report.suite}  ({report.total_bits // 8} bytes)")
print(f"  {'file':16s} {'zero frac':>10s} {'rbn nonzero':>12s} {'ideal save':>11s}")
for record in report.files:
    print(f"  {record.name:16s} {float(record.zero_fraction_binary):>10.4f} "
          f"{float(record.nonzero_fraction_rbn):>12.4f} "
          f"{float(record.gamma_rbn_ideal):>11.4f}")
print(f"  {'WEIGHTED':16s} {float(report.zero_fraction_binary):>10.4f} "
      f"{float(report.nonzero_fraction_rbn):>12.4f} "
      f"{float(report.gamma_rbn_ideal):>11.4f}")

# Larger frames keep longer runs intact, so savings climb then plateau.
text_file = Path(SUITE_DIR) / "english.txt"
print("\nframe-size sweep on english.txt:")
for size, savings in frame_size_sweep(text_file.read_bytes()):
    print(f"  {size:5d} bits -> ideal savings {float(savings):.4f}")

# Real radios dilute the ideal numbers by their idle draw.
print("\nmeasured fractions applied to the shipped radios:")
for row in device_report(report, load_device_profiles()):
    print(f"  {row.device:18s} size {float(row.gamma_size_sim):7.2%}   "
          f"rbn {float(row.gamma_dev_sim):7.2%}")
