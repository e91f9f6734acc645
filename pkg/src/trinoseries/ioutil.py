"""Formatting, parsing and reproducibility helpers for the CLI."""

from __future__ import annotations

import hashlib
import json
from fractions import Fraction


def parse_fraction(text: str) -> Fraction:
    return Fraction(text.strip())


def parse_fraction_vector(text: str) -> tuple[Fraction, ...]:
    return tuple(parse_fraction(part) for part in text.split(","))


def parse_complex_vector(text: str) -> tuple[complex, ...]:
    return tuple(complex(part.strip()) for part in text.split(","))


def format_fraction(q: Fraction) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}" if q.denominator != 1 else str(q.numerator)


def format_complex(z: complex) -> str:
    """Lossless (re, im) pair with 17 significant digits."""
    return f"({z.real:.17g}, {z.imag:.17g})"


def format_rat_matrix(M) -> str:
    return "[" + ", ".join(
        "[" + ", ".join(format_fraction(v) for v in row) + "]" for row in M
    ) + "]"


def input_hash(payload: dict) -> str:
    """sha256 over the canonical JSON of the resolved inputs."""
    canon = json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canon.encode()).hexdigest()


def header_line(version: str, seed, payload: dict) -> str:
    return f"# trinoseries {version} seed={seed} input-sha256={input_hash(payload)}\n"
