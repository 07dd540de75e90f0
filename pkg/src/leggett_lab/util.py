"""Small shared helpers: deterministic seeding and number formatting."""

from __future__ import annotations

import hashlib


def stable_seed(*parts) -> int:
    """Derive a reproducible 32-bit seed from arbitrary labels.

    Hash-based so that nested tasks (grid point index, start index, ...)
    get independent streams that do not depend on execution order.
    """
    payload = "::".join(str(p) for p in parts).encode("utf-8")
    digest = hashlib.sha256(payload).digest()
    return int.from_bytes(digest[:8], "little") % (2**32)


def fmt12(x) -> str:
    """Format a number with 12 significant digits (CSV cell format)."""
    if x is None:
        return ""
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, int):
        return str(x)
    return f"{float(x):.12g}"
