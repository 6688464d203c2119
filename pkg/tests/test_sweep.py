import pytest

from chromaperc.mc import Estimate
from chromaperc.sweep import (P_C, AlphaEstimate, SweepConfig, SweepPoint,
                              build_family_lattice, default_alpha_grid,
                              estimate_alpha_c, p_alpha_proxy, points_to_rows,
                              render_svg, sweep)


def _point(family, L, alpha, p_triple, p_pair=None):
    n = 1000
    trip = Estimate.from_hits(round(p_triple * n), n, 0)
    pair = Estimate.from_hits(round((p_pair if p_pair is not None else p_triple) * n),
                              n, 0)
    return SweepPoint(family, L, alpha, trip, pair)


def test_family_lattices():
    assert build_family_lattice("tri_site", 4).mode == "site"
    assert build_family_lattice("cubic_bond", 3).mode == "bond"
    with pytest.raises(ValueError):
        build_family_lattice("square", 4)


def test_default_grid_straddles_bound():
    for family, pc in P_C.items():
        grid = default_alpha_grid(family)
        assert grid[0] < pc / 2.0
        assert grid[-1] >= min(1.25 * pc / 2.0, 0.25) - 1e-12
        assert all(b > a for a, b in zip(grid, grid[1:]))
        assert grid[-1] <= 0.25


def test_config_validation():
    with pytest.raises(ValueError):
        SweepConfig("square", (4, 8), (0.1,), 100, 0)
    with pytest.raises(ValueError):
        SweepConfig("tri_site", (8, 4), (0.1,), 100, 0)
    with pytest.raises(ValueError):
        SweepConfig("tri_site", (4, 8), (0.3,), 100, 0)
    with pytest.raises(ValueError):
        SweepConfig("tri_site", (4, 8), (0.1,), 0, 0)


def test_alpha_zero_gives_zero_exactly():
    pt = p_alpha_proxy("tri_site", 4, 0.0, 500, seed=1)
    assert pt.triple.p_hat == 0.0
    assert pt.pair.p_hat == 0.0


def test_triple_never_exceeds_pair():
    cfg = SweepConfig("tri_site", (4, 6), (0.1, 0.18, 0.25), 400, seed=3)
    points = sweep(cfg)
    assert len(points) == 6
    for pt in points:
        assert pt.triple.p_hat <= pt.pair.p_hat + 1e-12


def test_sweep_deterministic():
    cfg = SweepConfig("cubic_site", (3, 4), (0.12, 0.2), 300, seed=9)
    a = [p.triple.p_hat for p in sweep(cfg)]
    b = [p.triple.p_hat for p in sweep(cfg)]
    assert a == b


def test_estimate_alpha_c_interpolates():
    pts = [
        _point("tri_site", 8, 0.10, 0.00),
        _point("tri_site", 8, 0.20, 0.10),
        _point("tri_site", 16, 0.10, 0.00),
        _point("tri_site", 16, 0.20, 0.20),
    ]
    est = estimate_alpha_c(pts, threshold=0.05)
    # linear interpolation: L=8 crosses at 0.15, L=16 at 0.125
    assert est.per_size[8] == pytest.approx(0.15)
    assert est.per_size[16] == pytest.approx(0.125)
    assert est.alpha_c_hat == pytest.approx(0.125)
    assert est.bound == pytest.approx(0.25)
    assert est.bound_ok


def test_estimate_alpha_c_never_crossing():
    pts = [
        _point("tri_site", 8, 0.1, 0.0),
        _point("tri_site", 8, 0.2, 0.01),
        _point("tri_site", 16, 0.1, 0.0),
        _point("tri_site", 16, 0.2, 0.01),
    ]
    est = estimate_alpha_c(pts, threshold=0.05)
    assert est.alpha_c_hat is None
    assert est.bound_ok  # no crossing means no evidence against the bound


def test_estimate_alpha_c_guards():
    with pytest.raises(ValueError):
        estimate_alpha_c([])
    with pytest.raises(ValueError):
        estimate_alpha_c([_point("tri_site", 8, 0.1, 0.0)])


def test_rows_shape():
    pts = [_point("cubic_site", 4, 0.15, 0.3)]
    (row,) = points_to_rows(pts)
    assert row == {"family": "cubic_site", "L": 4, "alpha": 0.15,
                   "p_hat": 0.3, "stderr": row["stderr"], "N": 1000, "seed": 0}
    assert row["stderr"] > 0


def test_render_svg():
    pts = [
        _point("tri_site", 8, 0.1, 0.0),
        _point("tri_site", 8, 0.2, 0.4),
        _point("tri_site", 16, 0.1, 0.0),
        _point("tri_site", 16, 0.2, 0.6),
    ]
    svg = render_svg(pts, title="demo")
    assert svg.startswith("<svg")
    assert svg.count("<polyline") == 2
    assert "L=16" in svg
    assert "demo" in svg
