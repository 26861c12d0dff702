"""Corpus framing benchmarks: how much of a real file becomes silence.

Files are split into fixed-size frames (default 1024 bits, final partial
frame kept) and each frame is encoded independently.  Two fractions are
measured per file:

* ``zero_fraction_binary`` - zeros among the raw bits; silent-zero binary
  transmission saves exactly this fraction on an ideal radio;
* ``nonzero_fraction_rbn`` - encoder output weight per *binary payload
  bit*.  The denominator is the pre-encoding bit count, which makes
  ``1 - nonzero_fraction_rbn`` the ideal-radio savings against a fully
  energized transmission of the same payload (the carry slot adds airtime
  but no energy).

Suite aggregates are reported both symbol-count weighted (total counts
over total bits, invariant under file order) and as an unweighted mean of
per-file fractions, since either averaging convention is defensible.

The classic compression corpora are external downloads; `download_corpora`
fetches and unpacks them with an integrity manifest.  A small built-in
mini corpus ships with the package so the benchmark is exercised offline.
"""

from __future__ import annotations

import hashlib
import io
import json
import tarfile
import urllib.request
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

from rbnsize.codec import bits_from_octets, encode_rbn
from rbnsize.energy import DeviceProfile, savings_vs_ebt

DEFAULT_FRAME_BITS = 1024

# canonical archive locations of the benchmark suites
CORPUS_SOURCES = {
    "canterbury": "https://corpus.canterbury.ac.nz/resources/cantrbry.tar.gz",
    "large_canterbury": "https://corpus.canterbury.ac.nz/resources/large.tar.gz",
    "calgary": "https://corpus.canterbury.ac.nz/resources/calgary.tar.gz",
}
CHECKSUM_MANIFEST = "checksums.json"


@dataclass(frozen=True)
class FileRecord:
    name: str
    size_bytes: int
    frames: int
    zero_fraction_binary: Fraction
    nonzero_fraction_rbn: Fraction

    @property
    def gamma_size_ideal(self) -> Fraction:
        """Ideal-radio savings of silent-zero binary for this file."""
        return self.zero_fraction_binary

    @property
    def gamma_rbn_ideal(self) -> Fraction:
        """Ideal-radio savings of the encoder for this file."""
        return 1 - self.nonzero_fraction_rbn


@dataclass(frozen=True)
class SuiteReport:
    suite: str
    files: tuple[FileRecord, ...]
    total_bits: int
    zero_fraction_binary: Fraction      # symbol-count weighted
    nonzero_fraction_rbn: Fraction      # symbol-count weighted

    @property
    def gamma_size_ideal(self) -> Fraction:
        return self.zero_fraction_binary

    @property
    def gamma_rbn_ideal(self) -> Fraction:
        return 1 - self.nonzero_fraction_rbn

    @property
    def mean_zero_fraction(self) -> Fraction:
        return sum(f.zero_fraction_binary for f in self.files) / len(self.files)

    @property
    def mean_nonzero_fraction(self) -> Fraction:
        return sum(f.nonzero_fraction_rbn for f in self.files) / len(self.files)


def measure_bits(bits, frame_bits: int = DEFAULT_FRAME_BITS) -> tuple[int, int, int]:
    """(zeros, rbn nonzeros, frames) of a bit stream framed independently."""
    if frame_bits < 1:
        raise ValueError("frame_bits must be positive")
    zeros = len(bits) - sum(bits)
    nonzeros = 0
    frames = 0
    for start in range(0, len(bits), frame_bits):
        digits = encode_rbn(bits[start:start + frame_bits])
        nonzeros += sum(1 for d in digits if d)
        frames += 1
    return zeros, nonzeros, frames


def analyze_bytes(name: str, data: bytes,
                  frame_bits: int = DEFAULT_FRAME_BITS) -> FileRecord:
    bits = bits_from_octets(data)
    if not bits:
        raise ValueError(f"{name}: empty input")
    zeros, nonzeros, nframes = measure_bits(bits, frame_bits)
    return FileRecord(
        name=name,
        size_bytes=len(data),
        frames=nframes,
        zero_fraction_binary=Fraction(zeros, len(bits)),
        nonzero_fraction_rbn=Fraction(nonzeros, len(bits)),
    )


def analyze_file(path, frame_bits: int = DEFAULT_FRAME_BITS) -> FileRecord:
    path = Path(path)
    return analyze_bytes(path.name, path.read_bytes(), frame_bits)


def analyze_suite(suite: str, paths,
                  frame_bits: int = DEFAULT_FRAME_BITS) -> SuiteReport:
    records = tuple(analyze_file(p, frame_bits) for p in sorted(map(Path, paths)))
    if not records:
        raise ValueError(f"suite {suite!r} has no files")
    total_bits = sum(8 * r.size_bytes for r in records)
    zeros = sum(r.zero_fraction_binary * 8 * r.size_bytes for r in records)
    nonzeros = sum(r.nonzero_fraction_rbn * 8 * r.size_bytes for r in records)
    return SuiteReport(
        suite=suite,
        files=records,
        total_bits=total_bits,
        zero_fraction_binary=Fraction(zeros, total_bits),
        nonzero_fraction_rbn=Fraction(nonzeros, total_bits),
    )


def analyze_dir(path, frame_bits: int = DEFAULT_FRAME_BITS) -> SuiteReport:
    path = Path(path)
    files = [p for p in sorted(path.iterdir()) if p.is_file()]
    return analyze_suite(path.name, files, frame_bits)


def frame_size_sweep(data: bytes, sizes=None) -> list[tuple[int, Fraction]]:
    """Ideal encoder savings per frame size; larger frames keep longer runs."""
    if sizes is None:
        sizes = [8 << i for i in range(10)]  # 8 .. 4096
    bits = bits_from_octets(data)
    out = []
    for size in sizes:
        _, nonzeros, _ = measure_bits(bits, size)
        out.append((size, 1 - Fraction(nonzeros, len(bits))))
    return out


@dataclass(frozen=True)
class DeviceRow:
    device: str
    gamma_size_sim: Fraction
    gamma_dev_sim: Fraction


def device_report(report: SuiteReport,
                  profiles: dict[str, DeviceProfile]) -> list[DeviceRow]:
    """Apply measured fractions to real radios (the simulated-savings table)."""
    rows = []
    for name, profile in profiles.items():
        ones = 1 - report.zero_fraction_binary
        rows.append(DeviceRow(
            device=name,
            gamma_size_sim=savings_vs_ebt(ones, profile),
            gamma_dev_sim=savings_vs_ebt(report.nonzero_fraction_rbn, profile),
        ))
    return rows


# --- report serialization ----------------------------------------------------

def report_to_dict(report: SuiteReport) -> dict:
    return {
        "suite": report.suite,
        "total_bits": report.total_bits,
        "weighted": {
            "zero_fraction_binary": float(report.zero_fraction_binary),
            "nonzero_fraction_rbn": float(report.nonzero_fraction_rbn),
            "gamma_size_ideal": float(report.gamma_size_ideal),
            "gamma_rbn_ideal": float(report.gamma_rbn_ideal),
        },
        "unweighted_mean": {
            "zero_fraction_binary": float(report.mean_zero_fraction),
            "nonzero_fraction_rbn": float(report.mean_nonzero_fraction),
        },
        "files": [
            {
                "name": r.name,
                "bytes": r.size_bytes,
                "frames": r.frames,
                "zero_fraction_binary": float(r.zero_fraction_binary),
                "nonzero_fraction_rbn": float(r.nonzero_fraction_rbn),
                "gamma_rbn_ideal": float(r.gamma_rbn_ideal),
            }
            for r in report.files
        ],
    }


def report_to_csv(report: SuiteReport) -> str:
    lines = ["name,bytes,frames,zero_fraction_binary,nonzero_fraction_rbn,"
             "gamma_rbn_ideal"]
    for r in report.files:
        lines.append(
            f"{r.name},{r.size_bytes},{r.frames},"
            f"{float(r.zero_fraction_binary):.6f},"
            f"{float(r.nonzero_fraction_rbn):.6f},{float(r.gamma_rbn_ideal):.6f}")
    lines.append(
        f"TOTAL,{report.total_bits // 8},,"
        f"{float(report.zero_fraction_binary):.6f},"
        f"{float(report.nonzero_fraction_rbn):.6f},"
        f"{float(report.gamma_rbn_ideal):.6f}")
    return "\n".join(lines) + "\n"


# --- corpora on disk -----------------------------------------------------------

def mini_corpus_dir() -> Path:
    """Directory of the small corpus shipped with the package."""
    return Path(str(resources.files("rbnsize").joinpath("data/mini_corpus")))


def _load_manifest(dest: Path) -> dict:
    manifest = dest / CHECKSUM_MANIFEST
    if manifest.exists():
        return json.loads(manifest.read_text())
    return {}


def download_corpora(dest, suites=None, record_checksums: bool = False) -> dict:
    """Fetch and unpack benchmark suites into dest/<suite>/.

    Integrity: archives are checked against sha256 entries in
    dest/checksums.json when present.  With ``record_checksums`` the
    observed digests are written there on first fetch, pinning every later
    download.  Returns {suite: extracted directory}.
    """
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    manifest = _load_manifest(dest)
    extracted = {}
    for suite in suites or list(CORPUS_SOURCES):
        url = CORPUS_SOURCES[suite]
        suite_dir = dest / suite
        if suite_dir.is_dir() and any(suite_dir.iterdir()):
            extracted[suite] = suite_dir
            continue
        with urllib.request.urlopen(url) as response:
            blob = response.read()
        digest = hashlib.sha256(blob).hexdigest()
        pinned = manifest.get(suite)
        if pinned is not None and pinned != digest:
            raise RuntimeError(
                f"{suite}: sha256 {digest} does not match pinned {pinned}")
        if pinned is None and record_checksums:
            manifest[suite] = digest
        suite_dir.mkdir(parents=True, exist_ok=True)
        with tarfile.open(fileobj=io.BytesIO(blob), mode="r:gz") as archive:
            for member in archive.getmembers():
                if not member.isfile() or ".." in member.name:
                    continue
                out = suite_dir / Path(member.name).name  # flatten
                out.write_bytes(archive.extractfile(member).read())
        extracted[suite] = suite_dir
    if record_checksums:
        (dest / CHECKSUM_MANIFEST).write_text(json.dumps(manifest, indent=2))
    return extracted
