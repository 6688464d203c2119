"""Monte Carlo estimation of colored-percolation event probabilities.

Trials are split into fixed-size blocks; block ``b`` draws from the
counter-based stream ``(master_seed, stream_offset + b)`` and contributes an
integer hit count, so the totals are bit-identical for any worker count.
Error bars are the 1-sigma binomial standard error sqrt(p(1-p)/N).
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numba
import numpy as np

from . import kernels
from .chroma import PATTERN_MASKS, ColorDistribution, mask_bits
from .events import MonotoneProperty
from .lattice import build_hexagon, build_rectangle, build_rhombus

MAX_TRIALS = 10 ** 10


@dataclass(frozen=True)
class Estimate:
    """Point estimate with 1-sigma standard error and seed provenance."""

    p_hat: float
    stderr: float
    n_trials: int
    master_seed: int
    wall_time: float = 0.0

    @classmethod
    def from_hits(cls, hits: int, n: int, seed: int, wall_time: float = 0.0):
        p = hits / n
        return cls(p, math.sqrt(p * (1.0 - p) / n), n, seed, wall_time)


@dataclass(frozen=True, eq=False)
class ExperimentSpec:
    """One intersection experiment: events evaluated on mask-induced subsets.

    ``events`` is a list of (MonotoneProperty, color mask) pairs sharing one
    ground set; a trial is a hit when every event holds.
    """

    events: tuple
    dist: ColorDistribution
    n_trials: int
    master_seed: int
    workers: int = 1
    stream_offset: int = 0

    def __post_init__(self):
        if not self.events:
            raise ValueError("need at least one event")
        if not 1 <= self.n_trials <= MAX_TRIALS:
            raise ValueError(f"n_trials must be in [1, {MAX_TRIALS}]")
        sizes = {p.ground_size for p, _ in self.events}
        if len(sizes) != 1:
            raise ValueError("events have mismatched ground sizes")
        for _, mask in self.events:
            self.dist.validate_mask(mask)

    @property
    def ground_size(self) -> int:
        return self.events[0][0].ground_size


def _pack(spec: ExperimentSpec):
    """Flatten the event list into the kernel's array arguments."""
    first = spec.events[0][0]
    (_, mode, nv, edges, indptr, indices, _, _, _, _) = first._kernel_args()
    kinds = np.empty(len(spec.events), dtype=np.int64)
    masks = np.empty(len(spec.events), dtype=np.uint8)
    params = np.empty(len(spec.events), dtype=np.int64)
    seg_ptr = np.zeros((len(spec.events), 4), dtype=np.int64)
    seg_chunks = []
    pos = 0
    for i, (prop, mask) in enumerate(spec.events):
        (kind, pmode, pnv, _, _, _, param, s1, s2, s3) = prop._kernel_args()
        if (pmode, pnv) != (mode, nv):
            raise ValueError("events must share one lattice")
        kinds[i] = kind
        masks[i] = mask_bits(mask)
        params[i] = param
        seg_ptr[i, 0] = pos
        for k, seg in enumerate((s1, s2, s3)):
            seg_chunks.append(seg)
            pos += len(seg)
            seg_ptr[i, k + 1] = pos
    seg_data = (np.concatenate(seg_chunks).astype(np.int32)
                if pos else np.empty(0, dtype=np.int32))
    return mode, nv, edges, indptr, indices, kinds, masks, params, seg_ptr, seg_data


def _run_kernel(spec: ExperimentSpec, full_eval: bool):
    mode, nv, edges, indptr, indices, kinds, masks, params, seg_ptr, seg_data = _pack(spec)
    workers = max(1, spec.workers)
    numba.set_num_threads(min(workers, numba.config.NUMBA_NUM_THREADS))
    ground = spec.ground_size
    prefix, singles = kernels.run_blocks(
        spec.n_trials, np.uint64(spec.master_seed & 0xFFFFFFFFFFFFFFFF),
        spec.stream_offset, mode, nv, ground,
        edges, indptr, indices, kinds, masks, params, seg_ptr, seg_data,
        spec.dist.cum_weights(), spec.dist.packed_bits(),
        1 if full_eval else 0)
    return prefix.sum(axis=0), singles.sum(axis=0)


def run(spec: ExperimentSpec) -> Estimate:
    """Estimate the probability that all events hold simultaneously."""
    t0 = time.perf_counter()
    prefix, _ = _run_kernel(spec, full_eval=False)
    return Estimate.from_hits(int(prefix[-1]), spec.n_trials, spec.master_seed,
                              time.perf_counter() - t0)


def run_full(spec: ExperimentSpec):
    """Joint estimate plus prefix-intersection and per-event marginals.

    Returns (joint, prefix_estimates, marginal_estimates); prefix entry j
    estimates the intersection of events 0..j.
    """
    t0 = time.perf_counter()
    prefix, singles = _run_kernel(spec, full_eval=True)
    dt = time.perf_counter() - t0
    n, seed = spec.n_trials, spec.master_seed
    pref = [Estimate.from_hits(int(h), n, seed, dt) for h in prefix]
    marg = [Estimate.from_hits(int(h), n, seed, dt) for h in singles]
    return pref[-1], pref, marg


def run_pair_check(spec: ExperimentSpec) -> dict:
    """Joint and marginal estimates of two events plus an independence z-score.

    The z-score compares (joint - product of marginals) against the
    first-order propagated standard error; for pairwise independent events
    it is asymptotically standard normal.
    """
    if len(spec.events) != 2:
        raise ValueError("run_pair_check needs exactly two events")
    joint, _, marg = run_full(spec)
    m1, m2 = marg
    prod = m1.p_hat * m2.p_hat
    se = math.sqrt(joint.stderr ** 2
                   + (m2.p_hat * m1.stderr) ** 2
                   + (m1.p_hat * m2.stderr) ** 2)
    z = 0.0 if se == 0.0 else (joint.p_hat - prod) / se
    return {"joint": joint, "marginals": (m1, m2), "z_score": z}


def crossing_spec(lattice_kind: str, size: int, pattern: str, trials: int,
                  seed: int, workers: int = 1) -> ExperimentSpec:
    """Standard crossing experiment: three copies of the lattice's crossing
    (or triple-connection) event under the bc or ad mask pattern."""
    if pattern not in PATTERN_MASKS:
        raise ValueError(f"pattern must be one of {sorted(PATTERN_MASKS)}")
    if lattice_kind == "rectangle":
        prop = MonotoneProperty.crossing(build_rectangle(size), "12", "34")
    elif lattice_kind == "rhombus":
        prop = MonotoneProperty.crossing(build_rhombus(size), "12", "34")
    elif lattice_kind == "hexagon":
        prop = MonotoneProperty.triple_connection(build_hexagon(size))
    else:
        raise ValueError(f"unknown lattice kind {lattice_kind!r}")
    events = tuple((prop, mask) for mask in PATTERN_MASKS[pattern])
    return ExperimentSpec(events, ColorDistribution.uniform(4), trials, seed,
                          workers=workers)


def majority_limit(m_list, n_trials: int, seed: int, workers: int = 1) -> list:
    """Estimates of both mask-pattern joints for majority on 2m+1 elements.

    Returns one row per m: {"m", "bc", "ad"} with Estimate values.
    """
    rows = []
    dist = ColorDistribution.uniform(4)
    for idx, m in enumerate(m_list):
        ground = 2 * m + 1
        prop = MonotoneProperty.majority(ground, m)
        row = {"m": m}
        for pat_idx, pattern in enumerate(("bc", "ad")):
            events = tuple((prop, mask) for mask in PATTERN_MASKS[pattern])
            spec = ExperimentSpec(events, dist, n_trials, seed, workers=workers,
                                  stream_offset=(2 * idx + pat_idx) << 32)
            row[pattern] = run(spec)
        rows.append(row)
    return rows
