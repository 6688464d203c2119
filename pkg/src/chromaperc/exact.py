"""Exact rational probabilities over small ground sets.

Everything here enumerates: half/p-percolation probabilities run over all
2**n subsets, colored joints over all m**n colorings, and XOR-coupled
joints over all 2**(k*n) subset tuples.  Counts are integers throughout and
a single Fraction is formed at the end, so results carry no rounding.

``verify_case`` checks one instance of each correlation-inequality case and
reports the exact left/right sides, the verdict, and the exact pairwise
independence factorizations.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .chroma import OCTO_MASKS, PATTERN_MASKS, mask_bits
from .events import MonotoneProperty, _popcounts, monotone_flags

MAX_COLORINGS = 20_000_000
_CHUNK = 1 << 20

#: case name -> (alphabet, masks or None, required direction, inequality direction)
CASES = {
    "thm1_bc": (4, PATTERN_MASKS["bc"], "upward", "<="),
    "thm1_ad": (4, PATTERN_MASKS["ad"], "upward", ">="),
    "down_bc": (4, PATTERN_MASKS["bc"], "downward", ">="),
    "down_ad": (4, PATTERN_MASKS["ad"], "downward", "<="),
    "octo": (8, OCTO_MASKS, "downward", ">="),
}


@dataclass(frozen=True)
class InequalityReport:
    """Verdict for one inequality instance, all sides exact."""

    case: str
    ground_size: int
    lhs: Fraction
    rhs: Fraction
    direction: str  # "<=" or ">="
    holds: bool
    pairwise: tuple  # ((i, j, factorizes_exactly), ...)
    slack: Fraction

    def pairwise_ok(self) -> bool:
        return all(ok for _, _, ok in self.pairwise)

    def to_dict(self) -> dict:
        rat = lambda x: {"num": str(x.numerator), "den": str(x.denominator)}
        return {
            "case": self.case,
            "ground_size": self.ground_size,
            "lhs": rat(self.lhs),
            "rhs": rat(self.rhs),
            "direction": self.direction,
            "holds": self.holds,
            "pairwise": [list(p) for p in self.pairwise],
            "slack": rat(self.slack),
        }


def _common_ground(props) -> int:
    sizes = {p.ground_size for p in props}
    if len(sizes) != 1:
        raise ValueError(f"properties have mismatched ground sizes: {sorted(sizes)}")
    return sizes.pop()


def exact_half(prop: MonotoneProperty) -> Fraction:
    """P_{1/2}(prop) by enumeration over all subsets."""
    tab = prop.table()
    return Fraction(int(tab.sum()), 1 << prop.ground_size)


def exact_p(prop: MonotoneProperty, p: Fraction) -> Fraction:
    """P_p(prop) = sum over member subsets of p^|S| (1-p)^(n-|S|)."""
    p = Fraction(p)
    if not 0 <= p <= 1:
        raise ValueError(f"p must be in [0, 1], got {p}")
    n = prop.ground_size
    counts = np.bincount(_popcounts(n)[prop.table()], minlength=n + 1)
    return sum(
        Fraction(int(counts[k])) * p ** k * (1 - p) ** (n - k)
        for k in range(n + 1)
    )


def exact_joint(pairs, alphabet: int) -> Fraction:
    """P(all (property, mask) pairs hold) over uniform colorings.

    Iterates every coloring of the common ground set in the given alphabet;
    membership is looked up in each property's subset table.
    """
    props = [p for p, _ in pairs]
    n = _common_ground(props)
    total = alphabet ** n
    if total > MAX_COLORINGS:
        raise ValueError(
            f"{alphabet}^{n} = {total} colorings exceeds the enumeration guard")
    tabs = [p.table() for p in props]
    lookups = []
    for _, mask in pairs:
        bits = mask_bits(mask)
        if bits >> alphabet:
            raise ValueError(f"mask {sorted(mask)} invalid for alphabet {alphabet}")
        lookups.append(np.array([(bits >> c) & 1 for c in range(alphabet)],
                                dtype=np.int64))
    count = 0
    for lo in range(0, total, _CHUNK):
        codes = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        digits = np.empty((n, len(codes)), dtype=np.int64)
        tmp = codes.copy()
        for j in range(n):
            digits[j] = tmp % alphabet
            tmp //= alphabet
        acc = np.ones(len(codes), dtype=bool)
        for tab, lut in zip(tabs, lookups):
            sidx = np.zeros(len(codes), dtype=np.int64)
            for j in range(n):
                sidx |= lut[digits[j]] << j
            acc &= tab[sidx]
        count += int(acc.sum())
    return Fraction(count, total)


def multi_joint(props) -> Fraction:
    """P(X_1 ... X_k hold on k independent half-percolations and X_{k+1}
    holds on their XOR), enumerating all 2**(k*n) subset tuples."""
    k = len(props) - 1
    if k < 1:
        raise ValueError("need at least two properties")
    n = _common_ground(props)
    total = 1 << (k * n)
    if total > MAX_COLORINGS:
        raise ValueError(f"2^{k * n} outcomes exceeds the enumeration guard")
    tabs = [p.table() for p in props]
    full = (1 << n) - 1
    count = 0
    for lo in range(0, total, _CHUNK):
        codes = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        acc = np.ones(len(codes), dtype=bool)
        sxor = np.zeros(len(codes), dtype=np.int64)
        for i in range(k):
            s = (codes >> (i * n)) & full
            sxor ^= s
            acc &= tabs[i][s]
        acc &= tabs[k][sxor]
        count += int(acc.sum())
    return Fraction(count, total)


def _require_direction(props, direction: str, case: str) -> None:
    for i, p in enumerate(props):
        up, down = monotone_flags(p)
        ok = up if direction == "upward" else down
        if not ok:
            raise ValueError(
                f"case {case!r} requires {direction}-closed properties; "
                f"property {i} is not ({'upward' if up else 'downward' if down else 'neither'})")


def verify_case(case: str, props, k: int | None = None) -> InequalityReport:
    """Exact check of one correlation-inequality instance.

    ``case`` is one of thm1_bc, thm1_ad, down_bc, down_ad, octo, hk, or
    multi (with ``k``); ``props`` supplies the monotone properties in mask
    order (k+1 of them for multi, two for hk, three or four otherwise).
    """
    if case == "hk":
        return _verify_hk(props)
    if case == "multi":
        if k is None:
            k = len(props) - 1
        if len(props) != k + 1:
            raise ValueError(f"multi({k}) needs {k + 1} properties")
        if k == 1:
            return _verify_hk(props, case="multi")
        _require_direction(props, "downward", "multi")
        lhs = multi_joint(props)
        marg = [exact_half(p) for p in props]
        rhs = Fraction(1)
        for m in marg:
            rhs *= m
        pairwise = []
        for i, j in combinations(range(k + 1), 2):
            pj = _multi_pair_joint(props, i, j, k)
            pairwise.append((i, j, pj == marg[i] * marg[j]))
        holds = lhs >= rhs
        return InequalityReport("multi", props[0].ground_size, lhs, rhs, ">=",
                                holds, tuple(pairwise), lhs - rhs)

    try:
        alphabet, masks, direction, ineq = CASES[case]
    except KeyError:
        raise ValueError(f"unknown case {case!r}")
    if len(props) != len(masks):
        raise ValueError(f"case {case!r} needs {len(masks)} properties")
    _require_direction(props, direction, case)
    pairs = list(zip(props, masks))
    lhs = exact_joint(pairs, alphabet)
    marg = [exact_half(p) for p in props]
    rhs = Fraction(1)
    for m in marg:
        rhs *= m
    pairwise = []
    for i, j in combinations(range(len(pairs)), 2):
        pj = exact_joint([pairs[i], pairs[j]], alphabet)
        pairwise.append((i, j, pj == marg[i] * marg[j]))
    holds = lhs <= rhs if ineq == "<=" else lhs >= rhs
    return InequalityReport(case, props[0].ground_size, lhs, rhs, ineq,
                            holds, tuple(pairwise), lhs - rhs)


def _verify_hk(props, case: str = "hk") -> InequalityReport:
    """Two properties of the same half-percolation: joint >= product."""
    if len(props) != 2:
        raise ValueError("hk needs exactly two properties")
    flags = [monotone_flags(p) for p in props]
    if not (all(f[0] for f in flags) or all(f[1] for f in flags)):
        raise ValueError("hk requires two upward or two downward properties")
    n = _common_ground(props)
    joint = Fraction(int((props[0].table() & props[1].table()).sum()), 1 << n)
    rhs = exact_half(props[0]) * exact_half(props[1])
    holds = joint >= rhs
    return InequalityReport(case, n, joint, rhs, ">=", holds, (), joint - rhs)


def _multi_pair_joint(props, i: int, j: int, k: int) -> Fraction:
    """Joint probability of properties i and j in the XOR coupling."""
    n = props[0].ground_size
    full = (1 << n) - 1
    total = 1 << (k * n)
    count = 0
    for lo in range(0, total, _CHUNK):
        codes = np.arange(lo, min(total, lo + _CHUNK), dtype=np.int64)
        sxor = np.zeros(len(codes), dtype=np.int64)
        subs = []
        for t in range(k):
            s = (codes >> (t * n)) & full
            sxor ^= s
            subs.append(s)
        subs.append(sxor)
        acc = props[i].table()[subs[i]] & props[j].table()[subs[j]]
        count += int(acc.sum())
    return Fraction(count, total)


def single_edge_reports() -> list:
    """The canned one-element illustration: joints 0 and 1/4 against 1/8."""
    e = MonotoneProperty.contains_element(1, 0)
    return [
        verify_case("thm1_bc", [e, e, e]),
        verify_case("thm1_ad", [e, e, e]),
    ]
