"""Coverability of finite point sets: matching vs. the exponential oracle."""

from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hatlab import (
    AxisPartition,
    HallViolator,
    InfeasibleError,
    ParameterError,
    PointSet,
    canonicalize,
    coverability_sweep,
    coverable,
    coverable_bruteforce,
    loomis_whitney_check,
    noncoverable_construction,
    numerically_coverable,
    projection,
    read_point_set,
    write_point_set,
)
from hatlab.cover import is_valid_axis_partition, violates_numeric_cover


def grid(*ranges):
    return PointSet.of(len(ranges), itertools.product(*(range(r) for r in ranges)))


def random_point_set(rng, d, size, spread=4):
    size = min(size, spread**d)  # can't have more distinct points than cells
    pts = set()
    while len(pts) < size:
        pts.add(tuple(rng.randrange(spread) for _ in range(d)))
    return PointSet.of(d, pts)


point_sets = st.builds(
    random_point_set,
    st.integers(0, 2**31).map(random.Random),
    st.integers(1, 3),
    st.integers(1, 8),
)


def test_two_by_two_coverable():
    result = coverable(grid(2, 2))
    assert isinstance(result, AxisPartition)
    assert is_valid_axis_partition(grid(2, 2), result)


def test_two_by_three_not_coverable():
    s = grid(2, 3)
    result = coverable(s)
    assert isinstance(result, HallViolator)
    assert violates_numeric_cover(result.subset)
    # the violator really is a subset
    assert set(result.subset.points) <= set(s.points)
    assert not coverable_bruteforce(s)


def test_single_points_and_lines():
    assert isinstance(coverable(PointSet.of(2, [(5, 9)])), AxisPartition)
    # a line of t points in dimension 1 is coverable iff t <= 1... no:
    # one class per axis, d=1 means one class, which holds at most one
    # point of the single line through them
    assert isinstance(coverable(PointSet.of(1, [(3,)])), AxisPartition)
    assert isinstance(coverable(PointSet.of(1, [(3,), (4,)])), HallViolator)


@settings(max_examples=150, deadline=None)
@given(point_sets)
def test_matching_agrees_with_bruteforce(s):
    got = isinstance(coverable(s), AxisPartition)
    assert got == coverable_bruteforce(s)


@settings(max_examples=150, deadline=None)
@given(point_sets)
def test_partition_and_violator_are_valid_certificates(s):
    result = coverable(s)
    if isinstance(result, AxisPartition):
        assert is_valid_axis_partition(s, result)
    else:
        assert violates_numeric_cover(result.subset)
        assert set(result.subset.points) <= set(s.points)


@settings(max_examples=100, deadline=None)
@given(point_sets)
def test_coverable_implies_numerically_coverable(s):
    if isinstance(coverable(s), AxisPartition):
        assert numerically_coverable(s)


@settings(max_examples=100, deadline=None)
@given(point_sets)
def test_canonicalize_preserves_coverability(s):
    c = canonicalize(s)
    assert len(c.points) == len(s.points)
    assert canonicalize(c) == c
    assert isinstance(coverable(c), type(coverable(s)))


@settings(max_examples=100, deadline=None)
@given(point_sets)
def test_loomis_whitney(s):
    assert loomis_whitney_check(s)


def test_projection_drops_one_axis():
    s = PointSet.of(2, [(0, 0), (0, 1), (1, 1)])
    assert set(projection(s, 1).points) == {(0,), (1,)}
    assert set(projection(s, 2).points) == {(0,), (1,)}
    with pytest.raises(ParameterError):
        projection(s, 3)


def test_noncoverable_construction_sizes():
    assert len(noncoverable_construction(1).points) == 2
    assert len(noncoverable_construction(2).points) == 6
    assert len(noncoverable_construction(3).points) == 33
    assert len(noncoverable_construction(4).points) == 289
    with pytest.raises(InfeasibleError):
        noncoverable_construction(6)


def test_noncoverable_construction_fails_matching():
    for d in (1, 2, 3):
        s = noncoverable_construction(d)
        result = coverable(s)
        assert isinstance(result, HallViolator)
        assert violates_numeric_cover(result.subset)


def test_noncoverable_two_is_the_smallest_possible():
    # the d=2 construction is [2]x[3] up to relabeling, and no 5-point
    # 2-d set can fail (the exhaustive sweep says so)
    s = canonicalize(noncoverable_construction(2))
    assert set(s.points) == set(grid(2, 3).points) or \
        set(s.points) == set(grid(3, 2).points)
    rep = coverability_sweep(2, "exhaustive")
    assert rep.ok and rep.sets_checked == 53130


def test_coverability_sweep_random_mode_is_seeded():
    a = coverability_sweep(3, "random", trials=50, seed=11)
    b = coverability_sweep(3, "random", trials=50, seed=11)
    assert (a.sets_checked, a.failures) == (b.sets_checked, b.failures)
    assert a.ok
    with pytest.raises(InfeasibleError):
        coverability_sweep(3, "exhaustive")


def test_point_set_validation():
    with pytest.raises(ParameterError):
        PointSet.of(2, [(0, 1, 2)])
    with pytest.raises(ParameterError):
        PointSet.of(2, [(0, -1)])
    with pytest.raises(ParameterError):
        PointSet.of(9, [tuple(range(9))])


def test_point_set_file_round_trip(tmp_path):
    s = noncoverable_construction(2)
    path = tmp_path / "pts.json"
    write_point_set(str(path), s)
    assert read_point_set(str(path)) == s
