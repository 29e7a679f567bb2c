"""
Test realizability of combinatorial types
"""

import pytest

from oracle.brute import brute_counts
from psl2.exceptions import NotRealizableError
from stallings.graphs import combinatorial_type, is_cyclically_reduced, validate
from stallings.realization import is_realizable, realizable_types, realize_type


def test_is_realizable_examples():
    """Test the realizability criterion on known types"""
    assert is_realizable((6, 3, 0, 0, 0, 2))
    assert is_realizable((2, 1, 0, 0, 2, 0))
    assert is_realizable((1, 0, 0, 1, 1, 0))
    assert not is_realizable((4, 0, 0, 4, 1, 1))
    # inconsistent vertex counts
    assert not is_realizable((6, 2, 0, 0, 0, 2))
    assert not is_realizable((0, 0, 0, 0, 0, 0))


def test_realize_rejects():
    """Test that a non-realizable type raises"""
    with pytest.raises(NotRealizableError):
        realize_type((4, 0, 0, 4, 1, 1))


def test_realize_roundtrip():
    """Test that realized graphs are valid and carry the requested type"""
    for n in range(1, 13):
        types = list(realizable_types(n))
        assert types
        for t in types:
            g = realize_type(t)
            assert combinatorial_type(g) == t
            assert is_cyclically_reduced(g)
            assert validate(g, "cyclically_reduced") == []


def test_realizable_types_match_enumeration():
    """Test the criterion against every type met by exhaustive enumeration"""
    for n in range(1, 6):
        assert brute_counts(n, dedupe=False).types == set(realizable_types(n))
