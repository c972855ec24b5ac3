"""Deterministic number formatting for CSV/JSON output.

``repr`` of a Python float is the shortest decimal string that round-trips
to the same value (at most 17 significant digits, '.' separator, no locale
effects), which makes byte-identical output reproducible across runs.
The stdlib ``json`` module already formats floats with ``repr``.
"""


def fmt(value):
    """Shortest round-trip decimal representation of a float."""
    return repr(float(value))
