"""Monotone properties (upward/downward-closed set families) and their
evaluation on element subsets.

Connectivity kinds (crossing, triple connection, center-to-shell) delegate
to the union-find kernels; abstract kinds (majority, contains, generated)
are evaluated directly.  ``table()`` materializes membership over every
subset of a small ground set, which is what the exact-enumeration module
iterates over.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .lattice import Lattice
from .rng import RandomStream

MAX_ENUM_GROUND = 24  # hard guard for 2**n subset tables
MAX_MONOTONE_GROUND = 12

_EMPTY_SEG = np.empty(0, dtype=np.int32)


@dataclass(frozen=True, eq=False)
class MonotoneProperty:
    """One upward- or downward-closed predicate on subsets of a ground set."""

    kind: str  # crossing | triple_connection | center_to_shell | majority | contains_element | generated
    direction: str  # upward | downward
    ground_size: int
    lattice: Lattice | None = None
    segments: tuple = ()
    threshold: int = -1
    element: int = -1
    generators: tuple = ()
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    # -- constructors -------------------------------------------------------

    @staticmethod
    def crossing(lat: Lattice, seg_a: str, seg_b: str) -> "MonotoneProperty":
        if seg_a == seg_b:
            raise ValueError(f"crossing needs two distinct segments, got {seg_a!r}")
        lat.segment(seg_a), lat.segment(seg_b)  # fail fast on bad labels
        return MonotoneProperty("crossing", "upward", lat.num_elements,
                                lattice=lat, segments=(seg_a, seg_b))

    @staticmethod
    def triple_connection(lat: Lattice, segs=("12", "34", "56")) -> "MonotoneProperty":
        if lat.mode != "site":
            raise ValueError("triple connection is defined for site lattices")
        return MonotoneProperty("triple_connection", "upward", lat.num_elements,
                                lattice=lat, segments=tuple(segs))

    @staticmethod
    def center_to_shell(lat: Lattice) -> "MonotoneProperty":
        if lat.center < 0:
            raise ValueError(f"lattice {lat.geometry!r} has no center vertex")
        return MonotoneProperty("center_to_shell", "upward", lat.num_elements,
                                lattice=lat, segments=("shell",))

    @staticmethod
    def majority(ground_size: int, threshold: int) -> "MonotoneProperty":
        return MonotoneProperty("majority", "upward", ground_size,
                                threshold=threshold)

    @staticmethod
    def contains_element(ground_size: int, e: int) -> "MonotoneProperty":
        if not 0 <= e < ground_size:
            raise ValueError("element out of range")
        return MonotoneProperty("contains_element", "upward", ground_size,
                                element=e)

    @staticmethod
    def generated(direction: str, ground_size: int, generators) -> "MonotoneProperty":
        """Closure of generator sets (given as int bitmasks).

        Upward: S is a member iff some generator is contained in S.
        Downward: S is a member iff S is disjoint from some generator's
        complement, i.e. S fits inside one of the permitted sets.
        """
        if direction not in ("upward", "downward"):
            raise ValueError(f"bad direction {direction!r}")
        return MonotoneProperty("generated", direction, ground_size,
                                generators=tuple(sorted(set(int(g) for g in generators))))

    # -- kernel plumbing ----------------------------------------------------

    def _kernel_args(self):
        lat = self.lattice
        kind = {"crossing": kernels.KIND_CROSSING,
                "triple_connection": kernels.KIND_TRIPLE,
                "center_to_shell": kernels.KIND_CENTER_SHELL,
                "majority": kernels.KIND_MAJORITY,
                "contains_element": kernels.KIND_CONTAINS}[self.kind]
        if lat is None:
            param = self.threshold if self.kind == "majority" else self.element
            return (kind, kernels.MODE_BOND, 0,
                    np.empty((0, 2), np.int32), np.zeros(1, np.int64),
                    np.empty(0, np.int32), param,
                    _EMPTY_SEG, _EMPTY_SEG, _EMPTY_SEG)
        mode = kernels.MODE_BOND if lat.mode == "bond" else kernels.MODE_SITE
        segs = [lat.segment(s) for s in self.segments]
        while len(segs) < 3:
            segs.append(_EMPTY_SEG)
        param = lat.center if self.kind == "center_to_shell" else -1
        return (kind, mode, lat.num_vertices, lat.edges, lat.indptr,
                lat.indices, param, segs[0], segs[1], segs[2])

    # -- evaluation ---------------------------------------------------------

    def eval(self, subset: np.ndarray) -> bool:
        """Membership of one subset, given as a bool array over elements."""
        if len(subset) != self.ground_size:
            raise ValueError(
                f"subset length {len(subset)} != ground size {self.ground_size}")
        if self.kind == "generated":
            bits = 0
            for e in range(self.ground_size):
                if subset[e]:
                    bits |= 1 << e
            return self._eval_generated(bits)
        (kind, mode, nv, edges, indptr, indices, param, s1, s2, s3) = self._kernel_args()
        parent = np.empty(nv + 2, np.int32)
        size = np.empty(nv + 2, np.int32)
        flags = np.empty(nv + 2, np.uint8)
        colors = np.ascontiguousarray(subset, dtype=np.uint8)
        return bool(kernels.eval_event(kind, mode, nv, edges, indptr, indices,
                                       colors, np.uint8(2), param, s1, s2, s3,
                                       parent, size, flags))

    def eval_bits(self, bits: int) -> bool:
        """Membership of a subset given as an int bitmask."""
        if self.ground_size <= MAX_ENUM_GROUND:
            return bool(self.table()[bits])
        subset = np.array([(bits >> e) & 1 for e in range(self.ground_size)], dtype=bool)
        return self.eval(subset)

    def _eval_generated(self, bits: int) -> bool:
        if self.direction == "upward":
            return any(g & bits == g for g in self.generators)
        full = (1 << self.ground_size) - 1
        return any(bits & (full ^ g) == bits for g in self.generators)

    def table(self) -> np.ndarray:
        """Membership over all 2**ground_size subsets (cached)."""
        if "table" in self._cache:
            return self._cache["table"]
        n = self.ground_size
        if n > MAX_ENUM_GROUND:
            raise ValueError(f"ground size {n} too large to tabulate")
        if self.kind == "generated":
            tab = self._generated_table()
        elif self.kind == "majority":
            tab = _popcounts(n) > self.threshold
        elif self.kind == "contains_element":
            tab = (np.arange(1 << n) >> self.element) & 1 == 1
        else:
            (kind, mode, nv, edges, indptr, indices, param, s1, s2, s3) = self._kernel_args()
            tab = kernels.build_event_table(kind, mode, nv, n, edges, indptr,
                                            indices, param, s1, s2, s3)
        self._cache["table"] = tab
        return tab

    def _generated_table(self) -> np.ndarray:
        n = self.ground_size
        tab = np.zeros(1 << n, dtype=bool)
        full = (1 << n) - 1
        if self.direction == "upward":
            for g in self.generators:
                tab[g] = True
            # superset-sum closure: member if any generator fits inside
            for e in range(n):
                half = tab[((np.arange(1 << n) >> e) & 1) == 0]
                idx = np.where(((np.arange(1 << n) >> e) & 1) == 1)[0]
                tab[idx] |= half
        else:
            for g in self.generators:
                tab[full ^ g] = True
            for e in range(n):
                upper = tab[((np.arange(1 << n) >> e) & 1) == 1]
                idx = np.where(((np.arange(1 << n) >> e) & 1) == 0)[0]
                tab[idx] |= upper
        return tab


def _popcounts(n: int) -> np.ndarray:
    pc = np.zeros(1 << n, dtype=np.int8)
    for k in range(n):
        pc[1 << k:1 << (k + 1)] = pc[:1 << k] + 1
    return pc


def monotone_flags(prop: MonotoneProperty) -> tuple[bool, bool]:
    """(closed upward, closed downward), by exhaustive single-element moves."""
    n = prop.ground_size
    if n > MAX_MONOTONE_GROUND:
        raise ValueError(f"ground size {n} exceeds monotonicity-check guard "
                         f"({MAX_MONOTONE_GROUND})")
    tab = prop.table()
    up = down = True
    idx = np.arange(1 << n)
    for e in range(n):
        lo = idx[(idx >> e) & 1 == 0]
        hi = lo + (1 << e)
        if np.any(tab[lo] & ~tab[hi]):
            up = False
        if np.any(tab[hi] & ~tab[lo]):
            down = False
    return up, down


def check_monotone(prop: MonotoneProperty, ground_size: int | None = None) -> str:
    """Classify a property as upward, downward, or neither by exhaustion.

    A family closed in both directions (empty or full) reports "upward".
    """
    if ground_size is not None and ground_size != prop.ground_size:
        raise ValueError("ground_size does not match the property")
    up, down = monotone_flags(prop)
    if up:
        return "upward"
    if down:
        return "downward"
    return "neither"


def random_generated_property(direction: str, ground_size: int,
                              num_generators: int, max_gen_size: int,
                              stream: RandomStream) -> MonotoneProperty:
    """Random closure-generated family; deterministic per stream."""
    if ground_size > MAX_MONOTONE_GROUND:
        raise ValueError("ground set too large for generated fuzzing")
    gens = []
    for _ in range(num_generators):
        k = stream.randint(max_gen_size + 1)
        g = 0
        for _ in range(k):
            g |= 1 << stream.randint(ground_size)
        gens.append(g)
    return MonotoneProperty.generated(direction, ground_size, gens)
