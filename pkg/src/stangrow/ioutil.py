"""Small shared helpers for file output: float formatting and hashing."""

import hashlib
from pathlib import Path


def fmt_float(x: float) -> str:
    """Render a float with the shortest digit string that round-trips.

    Python's repr of a float is already the shortest representation that
    parses back to the same IEEE-754 double, so every value written through
    this helper survives a write/read cycle bit for bit.
    """
    return repr(float(x))


def sha256_file(path: Path | str) -> str:
    """Hex SHA-256 digest of a file's bytes."""
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()
