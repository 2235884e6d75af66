"""Numeric modes and shared tolerance defaults.

Every quantity in the library is either a float or an exact
``fractions.Fraction``.  Exactness is inferred from the data: a state whose
probabilities and Gibbs weights are all rational is processed without any
tolerance by the ordering, curve, and witness machinery.  Floats get the
tolerances below.  Curve-tangency verdicts are the reason this distinction
exists at all; everything else would be happy with plain floats.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

# Default tolerances (Float64 mode).
NORM_TOL = 1e-12     # |sum(p) - 1| allowed at state construction
CMP_TOL = 1e-10      # curve dominance comparisons
TIE_TOL = 1e-12      # beta-ordering tie detection
SLOPE_TOL = 1e-9     # concavity validation of Lorenz curves

FLOAT64 = "float"
EXACT_RATIONAL = "rational"


@dataclass(frozen=True)
class NumericMode:
    """Numeric regime plus the tolerance set used for verdicts."""

    kind: str
    norm_tol: float = NORM_TOL
    cmp_tol: float = CMP_TOL
    tie_tol: float = TIE_TOL

    def __post_init__(self):
        if self.kind not in (FLOAT64, EXACT_RATIONAL):
            raise ValueError(f"unknown numeric mode {self.kind!r}")

    @classmethod
    def float64(cls, **tols) -> "NumericMode":
        return cls(FLOAT64, **tols)

    @classmethod
    def rational(cls) -> "NumericMode":
        return cls(EXACT_RATIONAL, norm_tol=0.0, cmp_tol=0.0, tie_tol=0.0)

    @property
    def is_exact(self) -> bool:
        return self.kind == EXACT_RATIONAL


def is_exact_number(x) -> bool:
    """True for values carried exactly (ints and Fractions, not bools)."""
    return isinstance(x, (int, Fraction)) and not isinstance(x, bool)


def all_exact(values) -> bool:
    return all(is_exact_number(v) for v in values)


def exact_sum(values):
    """Sum that stays rational for rational input and is compensated for floats."""
    vals = list(values)
    if all_exact(vals):
        return sum(vals, Fraction(0))
    return math.fsum(float(v) for v in vals)


def to_fraction(x) -> Fraction:
    """Exact conversion; floats are dyadic rationals, so nothing is lost."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"cannot represent {x!r} as a rational")
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot convert {type(x).__name__} to Fraction")


def parse_number(obj):
    """JSON value -> number. Strings are exact rationals ('2/3'), ints stay
    exact, floats stay floats. NaN and infinities are rejected."""
    if isinstance(obj, bool):
        raise ValueError("booleans are not numbers here")
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise ValueError(f"non-finite number {obj!r} in input")
        return obj
    if isinstance(obj, str):
        return Fraction(obj)
    raise ValueError(f"expected a number, got {type(obj).__name__}")


def encode_number(x):
    """Number -> JSON value, bit-exact round trip in both modes."""
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return x
    if isinstance(x, Fraction):
        if x.denominator == 1:
            return int(x)
        return f"{x.numerator}/{x.denominator}"
    if isinstance(x, float):
        return x
    raise TypeError(f"cannot encode {type(x).__name__}")
