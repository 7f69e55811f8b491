"""Merge rules, tree construction, and the recorded comparisons."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from partition_tuner import (
    ClusteringInstance,
    DomainError,
    MergeRule,
    UnknownFamily,
    build_tree,
    record_comparisons,
    rule_value,
    selector_indices,
)
from conftest import euclidean_instance
from oracles import (
    merge_value,
    naive_linkage,
    naive_linkage_sequence,
    tree_merge_sequence,
)


# ---------------------------------------------------------------------------
# rule construction and direct values


@pytest.mark.parametrize(
    "kwargs",
    [
        dict(family="convex_minmax", alpha=1.5),
        dict(family="convex_minmax"),
        dict(family="power_minmax", alpha=0.0),
        dict(family="power_minmax"),
        dict(family="power_average"),
        dict(family="sigma_linear", sigma=2),
        dict(family="sigma_linear", sigma=3, weights=(1.0, 2.0)),
        dict(family="sigma_linear", sigma=2, weights=(0.0, 0.0)),
        dict(family="sigma_linear", sigma=2, weights=(-1.0, 2.0)),
        dict(family="sigma_power", alpha=0.0, sigma=2),
        dict(family="sigma_power", alpha=1.0, sigma=1),
    ],
)
def test_rule_domain_validation(kwargs):
    with pytest.raises(DomainError):
        MergeRule(**kwargs)


def test_rule_unknown_family():
    with pytest.raises(UnknownFamily):
        MergeRule(family="centroid", alpha=1.0)


def test_selector_indices_cover_extremes():
    for L in range(2, 40):
        for sigma in range(2, min(L, 8) + 1):
            idx = selector_indices(L, sigma)
            assert idx[0] == 0 and idx[-1] == L - 1
            assert len(idx) == sigma
            assert all(np.diff(idx) >= 0)


def test_selector_indices_formula():
    idx = selector_indices(11, 4)
    assert list(idx) == [round(j * 10 / 3) for j in range(4)]


_dists = st.lists(st.floats(0.1, 10.0), min_size=2, max_size=12)


@settings(max_examples=200, deadline=None)
@given(
    d=_dists,
    # the direct formula loses all precision as alpha -> 0 (mean^(1/alpha)
    # amplifies rounding in the mean); alpha = 0 itself is tested exactly
    alpha=st.floats(-6.0, 6.0).filter(lambda a: abs(a) >= 1e-3),
)
def test_power_average_matches_direct_formula(d, alpha):
    got = rule_value(MergeRule("power_average", alpha), d)
    want = merge_value(d, MergeRule("power_average", alpha))
    assert got == pytest.approx(want, rel=1e-9)


@settings(max_examples=200, deadline=None)
@given(d=_dists, alpha=st.floats(0.05, 6.0), neg=st.booleans())
def test_power_minmax_matches_direct_formula(d, alpha, neg):
    a = -alpha if neg else alpha
    got = rule_value(MergeRule("power_minmax", a), d)
    want = merge_value(d, MergeRule("power_minmax", a))
    assert got == pytest.approx(want, rel=1e-9)


@settings(max_examples=100, deadline=None)
@given(d=_dists, alpha=st.floats(0.0, 1.0))
def test_convex_matches_direct_formula(d, alpha):
    got = rule_value(MergeRule("convex_minmax", alpha), d)
    want = merge_value(d, MergeRule("convex_minmax", alpha))
    assert got == pytest.approx(want, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(
    d=st.lists(st.floats(0.1, 10.0), min_size=3, max_size=12),
    sigma=st.integers(2, 3),
    data=st.data(),
)
def test_selector_families_match_direct_formula(d, sigma, data):
    w = tuple(data.draw(st.floats(0.0, 3.0)) for _ in range(sigma))
    if all(v == 0.0 for v in w):
        w = w[:-1] + (1.0,)
    lin = MergeRule("sigma_linear", weights=w, sigma=sigma)
    assert rule_value(lin, d) == pytest.approx(merge_value(d, lin), rel=1e-9)
    a = data.draw(st.floats(0.3, 4.0))
    pw = MergeRule("sigma_power", a, sigma=sigma)
    assert rule_value(pw, d) == pytest.approx(merge_value(d, pw), rel=1e-9)


def test_infinite_alpha_is_exact_min_max():
    d = [0.7, 1.3, 2.9, 0.9]
    for fam in ("power_minmax", "power_average"):
        assert rule_value(MergeRule(fam, math.inf), d) == 2.9
        assert rule_value(MergeRule(fam, -math.inf), d) == 0.7
    assert rule_value(MergeRule("sigma_power", math.inf, sigma=2), d) == 2.9
    assert rule_value(MergeRule("sigma_power", -math.inf, sigma=2), d) == 0.7


def test_geometric_mean_at_zero():
    d = [1.0, 2.0, 4.0]
    assert rule_value(MergeRule("power_average", 0.0), d) == pytest.approx(2.0)


# ---------------------------------------------------------------------------
# full tree construction against the quadratic-scan oracle


def _random_rules(rng):
    yield MergeRule("convex_minmax", float(rng.uniform(0.0, 1.0)))
    yield MergeRule("power_minmax", float(rng.uniform(0.2, 3.0)))
    yield MergeRule("power_average", float(rng.uniform(-2.0, 2.0)))
    yield MergeRule("sigma_linear", weights=(float(rng.uniform(0.1, 2.0)),
                                             float(rng.uniform(0.1, 2.0))), sigma=2)
    yield MergeRule("sigma_power", float(rng.uniform(0.3, 2.0)), sigma=3)


def test_build_tree_matches_naive_scan():
    rng = np.random.default_rng(314)
    for trial in range(8):
        inst = euclidean_instance(rng, int(rng.integers(5, 10)))
        for rule in _random_rules(rng):
            tree = build_tree(inst, rule)
            assert tree.fingerprint() == naive_linkage(inst, rule), rule


def test_tie_break_is_lexicographic():
    # every distance equal: merges must follow smallest-leaf order
    D = np.ones((5, 5))
    np.fill_diagonal(D, 0.0)
    inst = ClusteringInstance(n=5, dist=D)
    tree = build_tree(inst, MergeRule("convex_minmax", 0.5))
    seq = tree_merge_sequence(tree)
    assert seq[0] == ((0,), (1,))
    assert seq[1] == ((0, 1), (2,))
    assert seq[2] == ((0, 1, 2), (3,))
    assert seq[3] == ((0, 1, 2, 3), (4,))


def test_tree_structure_invariants():
    rng = np.random.default_rng(99)
    inst = euclidean_instance(rng, 12)
    tree = build_tree(inst, MergeRule("power_average", 1.3))
    assert len(tree.merges) == inst.n - 1
    assert tree.root == 2 * inst.n - 2
    assert tree.leaf_sets[tree.root] == list(range(inst.n))
    for t, (a, b) in enumerate(tree.merges):
        v = inst.n + t
        assert tree.children(v) == (a, b)
        union = sorted(tree.leaf_sets[a] + tree.leaf_sets[b])
        assert tree.leaf_sets[v] == union
    for leaf in range(inst.n):
        assert tree.children(leaf) is None
        assert tree.leaf_sets[leaf] == [leaf]


def test_two_point_tree():
    inst = ClusteringInstance(n=2, dist=np.array([[0.0, 3.0], [3.0, 0.0]]))
    tree = build_tree(inst, MergeRule("power_minmax", 2.0))
    assert len(tree.merges) == 1
    assert tree.values[0] == pytest.approx((2 * 3.0 ** 2.0) ** 0.5)


def test_limits_agree_with_single_and_complete():
    rng = np.random.default_rng(400)
    for _ in range(4):
        inst = euclidean_instance(rng, int(rng.integers(6, 14)))
        _, single = naive_linkage_sequence(inst, MergeRule("convex_minmax", 1.0))
        _, complete = naive_linkage_sequence(inst, MergeRule("convex_minmax", 0.0))
        for fam in ("power_minmax", "power_average"):
            assert tree_merge_sequence(build_tree(inst, MergeRule(fam, -math.inf))) == single
            assert tree_merge_sequence(build_tree(inst, MergeRule(fam, math.inf))) == complete


# ---------------------------------------------------------------------------
# recorded comparisons


def test_recorded_comparisons_name_real_candidates():
    rng = np.random.default_rng(7)
    inst = euclidean_instance(rng, 8)
    rule = MergeRule("convex_minmax", 0.35)
    tree, comps = record_comparisons(inst, rule)
    assert tree.fingerprint() == build_tree(inst, rule).fingerprint()
    assert comps, "every multi-candidate step should log comparisons"
    for cmp_ in comps:
        # the winner's value never exceeds the candidate's at the probe alpha
        wv = rule.alpha * cmp_.winner_min + (1 - rule.alpha) * cmp_.winner_max
        cv = rule.alpha * cmp_.candidate_min + (1 - rule.alpha) * cmp_.candidate_max
        assert wv <= cv + 1e-12
        # the same relation through the canonical equation terms
        slope_const = cmp_.terms(rule)
        val = sum(c * rule.alpha ** j for c, _, j in slope_const)
        assert val <= 1e-12
