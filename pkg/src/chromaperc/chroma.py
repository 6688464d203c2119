"""Color distributions, colorings, and the subsets they induce.

Colors are small integers: a=0, b=1, c=2, d=3, and the diamond filler color
of the 5-color deformation is 4.  A color mask is a frozenset of color
indices; ``mask_bits`` turns it into the bitmask the kernels consume.
Element subsets are plain numpy bool arrays over the ground set.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import reduce

import numpy as np

from .rng import RandomStream

COLOR_LETTERS = "abcd⋄"

MASK_AB = frozenset({0, 1})
MASK_AC = frozenset({0, 2})
MASK_AD = frozenset({0, 3})
MASK_BC = frozenset({1, 2})

#: mask triples for the two standard inequality patterns
PATTERN_MASKS = {
    "bc": (MASK_AB, MASK_AC, MASK_BC),
    "ad": (MASK_AB, MASK_AC, MASK_AD),
}

#: the four 8-color masks whose induced half-percolations are 3-wise independent
OCTO_MASKS = (
    frozenset({0, 1, 2, 3}),
    frozenset({0, 1, 4, 5}),
    frozenset({0, 2, 4, 6}),
    frozenset({0, 3, 5, 6}),
)


def mask_from_letters(letters: str) -> frozenset:
    """Parse a mask like "ab" or "ad" into color indices."""
    try:
        return frozenset(COLOR_LETTERS.index(ch) for ch in letters)
    except ValueError:
        raise ValueError(f"unknown color letter in {letters!r}")


def mask_bits(mask: frozenset) -> int:
    bits = 0
    for c in mask:
        bits |= 1 << c
    return bits


@dataclass(frozen=True)
class ColorDistribution:
    """Color weights; rational weights keep exact mode exact."""

    num_colors: int
    weights: tuple

    def __post_init__(self):
        if self.num_colors < 2:
            raise ValueError("need at least 2 colors")
        if len(self.weights) != self.num_colors:
            raise ValueError("weights length must equal num_colors")
        if any(w < 0 for w in self.weights):
            raise ValueError("weights must be nonnegative")
        total = sum(self.weights)
        if isinstance(total, Fraction):
            if total != 1:
                raise ValueError(f"weights must sum to 1, got {total}")
        elif abs(float(total) - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {total}")

    @classmethod
    def uniform(cls, m: int) -> "ColorDistribution":
        return cls(m, tuple(Fraction(1, m) for _ in range(m)))

    @classmethod
    def deformed(cls, alpha) -> "ColorDistribution":
        """5-color deformation: a,b,c,d with weight alpha, filler 1-4*alpha."""
        if not 0 <= alpha <= Fraction(1, 4):
            raise ValueError(f"alpha must be in [0, 1/4], got {alpha}")
        return cls(5, (alpha, alpha, alpha, alpha, 1 - 4 * alpha))

    def cum_weights(self) -> np.ndarray:
        """Cumulative weights as float64, for the sampling kernels."""
        cw = np.cumsum(np.array([float(w) for w in self.weights]))
        cw[-1] = 1.0
        return cw

    def packed_bits(self) -> int:
        """log2(num_colors) when uniform over a power-of-two alphabet, else 0.

        Selects the bit-sliced sampler; part of the draw-order contract.
        """
        m = self.num_colors
        if m & (m - 1) == 0 and len(set(self.weights)) == 1:
            return m.bit_length() - 1
        return 0

    def validate_mask(self, mask: frozenset) -> None:
        if not mask or not mask < set(range(self.num_colors)):
            raise ValueError(
                f"mask {sorted(mask)} must be a nonempty proper subset of "
                f"{self.num_colors} colors"
            )


def sample_coloring(ground_size: int, dist: ColorDistribution,
                    stream: RandomStream) -> np.ndarray:
    """i.i.d. colors per element; deterministic in (seed, stream, draw order)."""
    if ground_size < 0:
        raise ValueError("ground_size must be nonnegative")
    return stream.colors(ground_size, dist.cum_weights(), dist.packed_bits())


def pair_subset(coloring: np.ndarray, mask: frozenset) -> np.ndarray:
    """Elements whose color lies in the mask, as a bool array."""
    bits = mask_bits(mask)
    return ((bits >> coloring.astype(np.int64)) & 1).astype(bool)


def xor_subset(subsets: list) -> np.ndarray:
    """Elementwise parity of membership across subsets."""
    if not subsets:
        raise ValueError("xor_subset needs at least one subset")
    n = len(subsets[0])
    for s in subsets:
        if len(s) != n:
            raise ValueError("subset lengths differ")
    return reduce(np.logical_xor, subsets)


def independent_half_percolations(k: int, ground_size: int,
                                  stream: RandomStream) -> list:
    """k i.i.d. uniform subsets plus their XOR as subset k+1.

    Any k of the k+1 are mutually independent; for k=1 the second subset
    duplicates the first.
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    half = ColorDistribution(2, (Fraction(1, 2), Fraction(1, 2)))
    subsets = [
        sample_coloring(ground_size, half, stream).astype(bool) for _ in range(k)
    ]
    subsets.append(xor_subset(subsets))
    return subsets


def subset_to_bytes(subset: np.ndarray) -> bytes:
    """Compact debug serialization of an element subset."""
    return np.packbits(subset.astype(np.uint8)).tobytes()
