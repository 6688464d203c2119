"""Alpha sweeps for the 5-color deformation and colored critical-point
estimation.

The infinite-cluster probability is proxied at finite size by joint
center-to-shell connectivity in an L-box: the probability that the center
reaches the shell simultaneously in the ab-, ac-, and ad-colored subgraphs
under the (alpha, alpha, alpha, alpha, 1-4*alpha) coloring.  The critical
alpha per size is read off as the first threshold crossing of the curve;
the only asserted bound is the rigorous one, alpha_c <= p_c / 2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .chroma import MASK_AB, MASK_AC, MASK_AD, ColorDistribution
from .events import MonotoneProperty
from .lattice import build_cubic, build_triangular_box
from .mc import Estimate, ExperimentSpec, run_full
from .rng import RandomStream

#: reference bulk critical probabilities per lattice family
P_C = {
    "tri_bond": 2.0 * math.sin(math.pi / 18.0),  # 0.34729...
    "tri_site": 0.5,
    "cubic_bond": 0.24881182,
    "cubic_site": 0.3116077,
}

DEFAULT_THRESHOLD = 0.05
DEFAULT_GRID_STEPS = 16


def build_family_lattice(family: str, L: int):
    if family == "tri_bond":
        return build_triangular_box(L, "bond")
    if family == "tri_site":
        return build_triangular_box(L, "site")
    if family == "cubic_bond":
        return build_cubic(L, "bond")
    if family == "cubic_site":
        return build_cubic(L, "site")
    raise ValueError(f"unknown family {family!r}; expected one of {sorted(P_C)}")


def default_alpha_grid(family: str, steps: int = DEFAULT_GRID_STEPS):
    """Grid straddling the conjectured transition at p_c/2, capped at 1/4."""
    half_pc = P_C[family] / 2.0
    lo = 0.5 * half_pc
    hi = min(1.25 * half_pc, 0.25)
    return [lo + (hi - lo) * i / (steps - 1) for i in range(steps)]


@dataclass(frozen=True)
class SweepConfig:
    family: str
    sizes: tuple
    alphas: tuple
    trials: int
    seed: int
    workers: int = 1

    def __post_init__(self):
        if self.family not in P_C:
            raise ValueError(f"unknown family {self.family!r}")
        if not self.sizes or list(self.sizes) != sorted(set(self.sizes)):
            raise ValueError("sizes must be a strictly increasing nonempty list")
        for a in self.alphas:
            if not 0.0 <= a <= 0.25:
                raise ValueError(f"alpha {a} outside [0, 1/4]")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")


@dataclass(frozen=True)
class SweepPoint:
    family: str
    L: int
    alpha: float
    triple: Estimate  # center<->shell in ab, ac and ad subgraphs jointly
    pair: Estimate  # ab and ac subgraphs only; upper bound reference


@dataclass(frozen=True)
class AlphaEstimate:
    """Threshold-crossing alpha per size, plus the rigorous bound check."""

    family: str
    threshold: float
    per_size: dict  # L -> alpha or None when the curve never crosses
    alpha_c_hat: float | None  # crossing at the largest size
    bound: float  # p_c / 2
    bound_ok: bool
    method: str = "threshold-crossing"


def _point_seed(seed: int, L: int, alpha_index: int) -> int:
    return RandomStream(seed).substream((L << 20) | alpha_index).master_seed


def p_alpha_proxy(family: str, L: int, alpha: float, trials: int, seed: int,
                  workers: int = 1) -> SweepPoint:
    """Estimate the joint and pairwise center-to-shell probabilities at one
    (family, L, alpha) grid point."""
    if not 0.0 <= alpha <= 0.25:
        raise ValueError(f"alpha must be in [0, 1/4], got {alpha}")
    lat = build_family_lattice(family, L)
    prop = MonotoneProperty.center_to_shell(lat)
    dist = ColorDistribution.deformed(alpha)
    events = tuple((prop, mask) for mask in (MASK_AB, MASK_AC, MASK_AD))
    spec = ExperimentSpec(events, dist, trials, seed, workers=workers)
    triple, prefix, _ = run_full(spec)
    return SweepPoint(family, L, alpha, triple, prefix[1])


def sweep(config: SweepConfig) -> list:
    """Full (size, alpha) grid of proxy estimates; deterministic per seed."""
    points = []
    for L in config.sizes:
        for i, alpha in enumerate(config.alphas):
            points.append(p_alpha_proxy(
                config.family, L, alpha, config.trials,
                _point_seed(config.seed, L, i), workers=config.workers))
    return points


def estimate_alpha_c(points, threshold: float = DEFAULT_THRESHOLD) -> AlphaEstimate:
    """First threshold crossing per size, linearly interpolated on the grid.

    The extrapolated alpha_c is the crossing at the largest size; a size
    whose curve never exceeds the threshold reports None (read: at or above
    the grid maximum).  The rigorous inequality alpha_c <= p_c/2 is checked
    with a small grid-resolution allowance.
    """
    if not points:
        raise ValueError("no sweep points")
    family = points[0].family
    sizes = sorted({p.L for p in points})
    if len(sizes) < 2:
        raise ValueError("need at least two sizes")
    per_size = {}
    for L in sizes:
        curve = sorted((p for p in points if p.L == L), key=lambda p: p.alpha)
        crossing = None
        for prev, cur in zip([None] + curve[:-1], curve):
            if cur.triple.p_hat > threshold:
                if prev is None or prev.triple.p_hat >= threshold:
                    crossing = cur.alpha
                else:
                    f = ((threshold - prev.triple.p_hat)
                         / (cur.triple.p_hat - prev.triple.p_hat))
                    crossing = prev.alpha + f * (cur.alpha - prev.alpha)
                break
        per_size[L] = crossing
    alpha_c_hat = per_size[sizes[-1]]
    bound = P_C[family] / 2.0
    grid_alphas = sorted({p.alpha for p in points})
    tol = max(grid_alphas[i + 1] - grid_alphas[i]
              for i in range(len(grid_alphas) - 1)) if len(grid_alphas) > 1 else 0.0
    bound_ok = alpha_c_hat is None or alpha_c_hat <= bound + tol
    return AlphaEstimate(family, threshold, per_size, alpha_c_hat, bound, bound_ok)


def points_to_rows(points) -> list:
    """CSV-friendly rows: family, L, alpha, p_hat, stderr, N, seed."""
    return [
        {
            "family": p.family,
            "L": p.L,
            "alpha": p.alpha,
            "p_hat": p.triple.p_hat,
            "stderr": p.triple.stderr,
            "N": p.triple.n_trials,
            "seed": p.triple.master_seed,
        }
        for p in points
    ]


def render_svg(points, title: str = "") -> str:
    """Self-contained SVG: one polyline per size, alpha vs estimated P."""
    sizes = sorted({p.L for p in points})
    xs = sorted({p.alpha for p in points})
    x0, x1 = min(xs), max(xs)
    y1 = max(max(p.triple.p_hat for p in points), 1e-6)
    w, h, pad = 480, 360, 50

    def sx(a):
        return pad + (w - 2 * pad) * (a - x0) / (x1 - x0 if x1 > x0 else 1.0)

    def sy(v):
        return h - pad - (h - 2 * pad) * v / y1

    colors = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"]
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
        f'viewBox="0 0 {w} {h}">',
        f'<rect width="{w}" height="{h}" fill="white"/>',
        f'<line x1="{pad}" y1="{h - pad}" x2="{w - pad}" y2="{h - pad}" stroke="black"/>',
        f'<line x1="{pad}" y1="{pad}" x2="{pad}" y2="{h - pad}" stroke="black"/>',
        f'<text x="{w // 2}" y="{h - 10}" text-anchor="middle" font-size="13">alpha</text>',
        f'<text x="14" y="{h // 2}" text-anchor="middle" font-size="13" '
        f'transform="rotate(-90 14 {h // 2})">P(center-to-shell, joint)</text>',
    ]
    if title:
        parts.append(f'<text x="{w // 2}" y="20" text-anchor="middle" '
                     f'font-size="14">{title}</text>')
    for x in (x0, x1):
        parts.append(f'<text x="{sx(x):.1f}" y="{h - pad + 16}" text-anchor="middle" '
                     f'font-size="11">{x:.4f}</text>')
    parts.append(f'<text x="{pad - 6}" y="{sy(y1) + 4:.1f}" text-anchor="end" '
                 f'font-size="11">{y1:.3f}</text>')
    parts.append(f'<text x="{pad - 6}" y="{h - pad + 4}" text-anchor="end" '
                 f'font-size="11">0</text>')
    for i, L in enumerate(sizes):
        curve = sorted((p for p in points if p.L == L), key=lambda p: p.alpha)
        pts = " ".join(f"{sx(p.alpha):.2f},{sy(p.triple.p_hat):.2f}" for p in curve)
        col = colors[i % len(colors)]
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{col}" '
                     f'stroke-width="1.5"/>')
        parts.append(f'<text x="{w - pad + 4}" y="{pad + 16 * i + 10}" '
                     f'font-size="12" fill="{col}">L={L}</text>')
    parts.append("</svg>")
    return "\n".join(parts)
