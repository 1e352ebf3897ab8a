import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from eulerist import FiltrationError, MultiFiltration, euler_characteristic, validate
from eulerist.complex import canonical_simplex, faces

from oracles import chi_at, random_filtration


def test_canonical_simplex_sorts_and_rejects_repeats():
    assert canonical_simplex([3, 1, 2]) == (1, 2, 3)
    with pytest.raises(FiltrationError):
        canonical_simplex([1, 1])
    with pytest.raises(FiltrationError):
        canonical_simplex([])
    with pytest.raises(FiltrationError):
        canonical_simplex([-1, 2])


def test_faces():
    assert sorted(faces((0, 1, 2))) == [(0,), (0, 1), (0, 2), (1,), (1, 2), (2,)]
    assert (0, 1, 2) in set(faces((0, 1, 2), proper=False))


def test_validate_accepts_canonical_filtration():
    f = MultiFiltration.from_dict({(0,): 0, (1,): 0, (0, 1): 1})
    assert validate(f).ok


def test_validate_reports_missing_faces():
    report = validate(MultiFiltration.from_dict({(0, 1): 1}))
    assert not report.ok
    assert {i.other for i in report.of_kind("missing_face")} == {(0,), (1,)}


def test_validate_reports_monotonicity_pair():
    report = validate(MultiFiltration.from_dict({(0,): 2, (0, 1): 1, (1,): 0}))
    (issue,) = report.of_kind("monotonicity")
    assert issue.simplex == (0, 1) and issue.other == (0,)


def test_validate_reports_duplicates_and_non_finite():
    f = MultiFiltration([(0,), (0,), (1,)], [0.0, 1.0, np.nan])
    report = validate(f)
    assert len(report.of_kind("duplicate")) == 1
    assert len(report.of_kind("non_finite")) == 1


def test_validate_is_idempotent(rng):
    f = random_filtration(rng, 2)
    assert str(validate(f)) == str(validate(f)) == "valid"


def test_euler_characteristic_examples():
    assert euler_characteristic([]) == 0
    assert euler_characteristic([(0,)]) == 1
    tetra = [s for k in (1, 2, 3) for s in __import__("itertools").combinations(range(4), k)]
    assert euler_characteristic(tetra) == 2
    with pytest.raises(FiltrationError):
        euler_characteristic([(0, 1)])


def test_euler_characteristic_additive_over_disjoint_union(rng):
    a = random_filtration(rng, 1)
    b = random_filtration(rng, 1)
    u = a.disjoint_union(b)
    assert euler_characteristic(u.simplices) == euler_characteristic(a.simplices) + euler_characteristic(b.simplices)


def test_values_shape_and_readonly():
    f = MultiFiltration([(0,), (1,), (0, 1)], [0, 0, 1])
    assert f.m == 1 and f.values.shape == (3, 1)
    with pytest.raises(ValueError):
        f.values[0, 0] = 5
    with pytest.raises(FiltrationError):
        MultiFiltration([(0,)], [[0, 1]], m=3)


def test_sorted_by_dimension_then_lexicographic():
    f = MultiFiltration([(0, 1), (1,), (0,)], [1, 0, 0])
    assert f.simplices == ((0,), (1,), (0, 1))
    assert f.value_of((0, 1)).tolist() == [1.0]


def test_rescalarize_is_dot_product():
    f = MultiFiltration.from_dict({(0,): (1, 2)})
    assert f.rescalarize([1, 1]).values[0, 0] == 3


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 3))
def test_sublevel_matches_recount(seed, m):
    rng = np.random.default_rng(seed)
    f = random_filtration(rng, m, max_simplices=25)
    u = rng.uniform(0, 4, size=m)
    sub = f.sublevel(u)
    assert euler_characteristic(sub) == chi_at(f, u)
