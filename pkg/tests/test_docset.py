import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from skg import DocSet

U = 64
ids = st.sets(st.integers(0, U - 1)).map(lambda s: DocSet(sorted(s), U))


def ds(*xs):
    return DocSet(list(xs), U)


def test_java_and_hadoop_intersection():
    # TOY-10 internal ids: java = d1..d4, hadoop = d1, d2, d5
    assert ds(0, 1, 2, 3) & ds(0, 1, 4) == ds(0, 1)


def test_empty_and_cardinality():
    assert ds(1, 2, 3) & ds() == ds()
    assert len(ds(0, 1)) == 2
    assert ds(0, 1).cardinality() == 2


def test_construction_sorts_and_dedupes():
    assert DocSet([5, 1, 5, 3], U).ids.tolist() == [1, 3, 5]


def test_out_of_range_rejected():
    with pytest.raises(ValueError):
        DocSet([U], U)


def test_ids_are_read_only():
    d = ds(1, 2)
    with pytest.raises(ValueError):
        d.ids[0] = 9


def test_mixing_universes_rejected():
    with pytest.raises(ValueError):
        DocSet([1], 10) & DocSet([1], 11)


def test_complement_and_full():
    assert DocSet.full(5).complement() == DocSet.empty(5)
    assert DocSet([0, 2], 5).complement() == DocSet([1, 3, 4], 5)


def test_intersect_all_orders_by_size():
    assert DocSet.intersect_all([ds(*range(40)), ds(3, 5, 39), ds(5, 39, 50)]) == ds(5, 39)


@pytest.mark.parametrize("na,nb", [(3, 3), (2, 40), (40, 60), (60, 60)])
def test_all_strategies_agree(na, nb):
    rng = np.random.default_rng(na * 100 + nb)
    a = DocSet(rng.choice(U, na, replace=False), U)
    b = DocSet(rng.choice(U, nb, replace=False), U)
    sa, sb = set(a), set(b)
    assert set(a & b) == sa & sb
    assert set(a | b) == sa | sb
    assert set(a - b) == sa - sb
    assert a.intersection_size(b) == len(sa & sb)


@given(a=ids, b=ids, c=ids)
@settings(max_examples=150, deadline=None)
def test_algebra_laws(a, b, c):
    assert a & b == b & a
    assert a | b == b | a
    assert (a & b) & c == a & (b & c)
    assert (a | b) | c == a | (b | c)
    assert len(a & b) + len(a | b) == len(a) + len(b)
    assert set(a - b) == set(a) - set(b)
    for s in (a & b, a | b, a - b):
        arr = s.ids
        assert np.all(np.diff(arr) > 0)
        assert len(s) <= U


@given(a=ids)
@settings(max_examples=50, deadline=None)
def test_membership(a):
    for x in range(U):
        assert (x in a) == (x in set(a))
