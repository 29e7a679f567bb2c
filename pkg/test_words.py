"""
Test words, free reduction and shortlex normal forms
"""

import itertools

import pytest

from psl2.exceptions import InvalidWordError
from stallings.words import (
    EMPTY, Letter, Word, free_reduce, is_equal_in_group, normalize_shortlex, parse_generators,
)


def all_words(max_len):
    for length in range(max_len + 1):
        for letters in itertools.product("aAbB", repeat=length):
            yield Word.parse("".join(letters))


def test_parse_syntax():
    """Test the compact text syntax and its inverse spellings"""
    assert str(Word.parse("abAB")) == "abAB"
    assert Word.parse("a^-1 b") == Word.parse("Ab")
    assert Word.parse("b⁻¹") == Word((Letter.B_INV,))
    assert Word.parse("") == EMPTY
    assert Word.parse("ε") == EMPTY


def test_parse_rejects_garbage():
    """Test that unknown letters raise"""
    with pytest.raises(InvalidWordError):
        Word.parse("abc")


def test_free_reduce():
    """Test free cancellation"""
    assert free_reduce("aA") == EMPTY
    assert str(free_reduce("baAb")) == "bb"
    assert str(free_reduce("abBAb")) == "b"


def test_normalize_shortlex():
    """Test rewriting into the shortlex geodesic"""
    assert normalize_shortlex("aa") == EMPTY
    assert str(normalize_shortlex("bb")) == "B"
    assert str(normalize_shortlex("AbaaB")) == "a"
    assert normalize_shortlex("bbb") == EMPTY
    assert str(normalize_shortlex("BB")) == "b"


def test_is_equal_in_group():
    """Test the word problem"""
    assert is_equal_in_group("aa", "")
    assert is_equal_in_group("bbb", "")
    assert not is_equal_in_group("ab", "ba")


def test_inversion():
    """Test that inversion is an involution preserving length"""
    for w in all_words(4):
        assert w.invert().invert() == w
        assert len(w.invert()) == len(w)


def test_normal_form_properties():
    """Test idempotence, length and the shortlex flag on every short word"""
    for w in all_words(5):
        nf = normalize_shortlex(w)
        assert normalize_shortlex(nf) == nf
        assert len(nf) <= len(w)
        assert nf.is_shortlex


def test_homomorphism():
    """Test that normalization is compatible with concatenation"""
    words = list(all_words(3))
    for u, v in itertools.product(words[::3], words[::2]):
        assert is_equal_in_group(u + v, normalize_shortlex(u) + normalize_shortlex(v))


def test_orders():
    """Test that a has order 2 and b order 3"""
    for w in all_words(4):
        nf = str(normalize_shortlex(w))
        if nf == "a":
            assert normalize_shortlex(w + w) == EMPTY
        if nf in ("b", "B"):
            assert normalize_shortlex(w + w + w) == EMPTY


def test_parse_generators():
    """Test the comma separated generator list"""
    gens = parse_generators("abaB, babab")
    assert [str(g) for g in gens] == ["abaB", "babab"]
    assert parse_generators("") == []
