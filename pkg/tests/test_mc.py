from dataclasses import replace
from fractions import Fraction

import pytest

from chromaperc.chroma import (MASK_AB, MASK_AC, PATTERN_MASKS,
                               ColorDistribution)
from chromaperc.events import MonotoneProperty
from chromaperc.exact import exact_joint
from chromaperc.mc import (Estimate, ExperimentSpec, crossing_spec,
                           majority_limit, run, run_full, run_pair_check)

UNIFORM4 = ColorDistribution.uniform(4)


def _bc_spec(prop, trials, seed, **kw):
    events = tuple((prop, m) for m in PATTERN_MASKS["bc"])
    return ExperimentSpec(events, UNIFORM4, trials, seed, **kw)


def test_spec_validation():
    prop = MonotoneProperty.majority(3, 1)
    with pytest.raises(ValueError):
        ExperimentSpec((), UNIFORM4, 10, 0)
    with pytest.raises(ValueError):
        _bc_spec(prop, 0, 0)
    with pytest.raises(ValueError):
        ExperimentSpec(((prop, MASK_AB),
                        (MonotoneProperty.majority(5, 2), MASK_AC)),
                       UNIFORM4, 10, 0)
    with pytest.raises(ValueError):
        ExperimentSpec(((prop, frozenset({0, 1, 2, 3})),), UNIFORM4, 10, 0)


def test_estimate_from_hits():
    est = Estimate.from_hits(25, 100, 7)
    assert est.p_hat == 0.25
    assert est.stderr == pytest.approx((0.25 * 0.75 / 100) ** 0.5)
    assert est.n_trials == 100 and est.master_seed == 7


def test_always_true_event():
    prop = MonotoneProperty.majority(5, -1)  # any subset has > -1 elements
    est = run(ExperimentSpec(((prop, MASK_AB),), UNIFORM4, 1000, 3))
    assert est.p_hat == 1.0 and est.stderr == 0.0


def test_single_trial():
    prop = MonotoneProperty.contains_element(1, 0)
    est = run(ExperimentSpec(((prop, MASK_AB),), UNIFORM4, 1, 3))
    assert est.p_hat in (0.0, 1.0)
    assert est.n_trials == 1


def test_worker_invariance():
    spec = crossing_spec("rectangle", 4, "ad", 40000, seed=17, workers=1)
    a = run(spec)
    b = run(replace(spec, workers=4))
    assert a.p_hat == b.p_hat
    c = run(spec)  # and plain reruns agree too
    assert a.p_hat == c.p_hat


def test_run_full_prefix_structure():
    prop = MonotoneProperty.majority(5, 2)
    spec = _bc_spec(prop, 20000, 21)
    joint, prefix, marg = run_full(spec)
    assert len(prefix) == len(marg) == 3
    assert joint.p_hat == prefix[-1].p_hat
    # prefix intersections can only shrink
    assert prefix[0].p_hat >= prefix[1].p_hat >= prefix[2].p_hat
    # each marginal should be near 1/2 (half-percolation of a self-dual family)
    for m in marg:
        assert abs(m.p_hat - 0.5) < 5 * m.stderr + 1e-12


def test_run_matches_run_full():
    spec = crossing_spec("rhombus", 4, "bc", 20000, seed=5)
    assert run(spec).p_hat == run_full(spec)[0].p_hat


def test_single_edge_pair_joint():
    # two masks sharing color a: joint = P(color in ab)·indep = 1/4 exactly
    prop = MonotoneProperty.contains_element(1, 0)
    spec = ExperimentSpec(((prop, MASK_AB), (prop, MASK_AC)), UNIFORM4,
                          200000, 23)
    out = run_pair_check(spec)
    joint = out["joint"]
    assert abs(joint.p_hat - 0.25) < 5 * joint.stderr
    assert abs(out["z_score"]) < 4.0


def test_pair_check_rectangle_crossings():
    from chromaperc.lattice import build_rectangle

    prop = MonotoneProperty.crossing(build_rectangle(6), "12", "34")
    spec = ExperimentSpec(((prop, MASK_AB), (prop, MASK_AC)), UNIFORM4,
                          100000, 31)
    out = run_pair_check(spec)
    # crossings of the two half-percolations are pairwise independent
    assert abs(out["z_score"]) < 4.0
    for m in out["marginals"]:
        assert abs(m.p_hat - 0.5) < 5 * m.stderr


def test_pair_check_needs_two_events():
    prop = MonotoneProperty.majority(3, 1)
    with pytest.raises(ValueError):
        run_pair_check(_bc_spec(prop, 100, 0))


def test_majority_limit_small_m_vs_exact():
    rows = majority_limit([1], 200000, seed=41)
    prop = MonotoneProperty.majority(3, 1)
    for pattern, expect in (("bc", Fraction(3, 32)), ("ad", Fraction(5, 32))):
        pairs = [(prop, m) for m in PATTERN_MASKS[pattern]]
        assert exact_joint(pairs, 4) == expect  # pin the oracle itself
        est = rows[0][pattern]
        assert abs(est.p_hat - float(expect)) < 4 * est.stderr


def test_majority_limit_rows_and_offsets():
    rows = majority_limit([1, 2], 5000, seed=8)
    assert [r["m"] for r in rows] == [1, 2]
    # distinct stream offsets: the two patterns are not the same draw sequence
    assert rows[0]["bc"].p_hat != rows[0]["ad"].p_hat


def test_crossing_spec_validation():
    with pytest.raises(ValueError):
        crossing_spec("torus", 3, "bc", 10, 0)
    with pytest.raises(ValueError):
        crossing_spec("rectangle", 3, "cd", 10, 0)


def test_deformed_distribution_runs():
    prop = MonotoneProperty.majority(5, 2)
    dist = ColorDistribution.deformed(Fraction(1, 4))  # no filler mass
    events = tuple((prop, m) for m in PATTERN_MASKS["bc"])
    est = run(ExperimentSpec(events, dist, 20000, 9))
    # alpha = 1/4 recovers the uniform 4-color model
    base = run(_bc_spec(prop, 20000, 9))
    assert abs(est.p_hat - base.p_hat) < 5 * (est.stderr + base.stderr) + 1e-12
