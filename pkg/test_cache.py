"""
Test the binary table cache
"""

import pytest

from counting.cache import MAGIC, TableCache, decode_table, encode_table
from counting.tables import CountingEngine
from psl2.exceptions import TableCorruptionError


def test_encode_decode():
    """Test big integers and ragged bivariate rows"""
    univariate = [1, 0, 2 ** 200 + 7, 12]
    assert decode_table(encode_table(univariate, 1)) == univariate
    ragged = [[1], [], [0, 2], [3, 0, 5]]
    assert decode_table(encode_table(ragged, 2)) == ragged


def test_header():
    """Test the magic bytes and dimension header"""
    data = encode_table([5, 6], 1)
    assert data.startswith(MAGIC)
    assert data[8:12] == (1).to_bytes(4, "little")
    assert data[12:16] == (2).to_bytes(4, "little")


def test_corrupt_data():
    """Test that malformed files raise"""
    data = encode_table([1, 2, 3], 1)
    with pytest.raises(TableCorruptionError):
        decode_table(b"NOTATABLE" + data[8:])
    with pytest.raises(TableCorruptionError):
        decode_table(data[:-1])
    with pytest.raises(TableCorruptionError):
        decode_table(data + b"\x00")
    with pytest.raises(TableCorruptionError):
        encode_table([1, -1], 1)


def test_save_and_load(tmp_path):
    """Test that a saved table serves every smaller size"""
    cache = TableCache(tmp_path)
    cache.save("t2", 7, [1, 1, 2, 4, 10, 26, 76, 232], 1)
    assert cache.path("t2", 7).exists()
    assert cache.load("t2", 7) == [1, 1, 2, 4, 10, 26, 76, 232]
    assert cache.load("t2", 4) == [1, 1, 2, 4, 10]
    assert cache.load("t2", 8) is None
    assert cache.load("t3", 2) is None


def test_corrupt_file_ignored(tmp_path):
    """Test that a damaged cache file is skipped, not fatal"""
    cache = TableCache(tmp_path)
    cache.path("t3", 5).write_bytes(b"garbage")
    assert cache.load("t3", 5) is None


def test_unsafe_name(tmp_path):
    """Test that table names cannot escape the directory"""
    with pytest.raises(ValueError):
        TableCache(tmp_path).path("../t2", 3)


def test_clear(tmp_path):
    """Test removal of cached tables"""
    cache = TableCache(tmp_path)
    cache.save("a", 1, [1, 1], 1)
    cache.save("b", 1, [[1], [0, 1]], 2)
    assert cache.clear() == 2
    assert cache.load("a", 1) is None


def test_engine_uses_cache(tmp_path):
    """Test that a second engine reads what the first one wrote"""
    first = CountingEngine(cache=TableCache(tmp_path))
    expected = first.gpr(20).values
    assert (tmp_path / "gpr-20.bin").exists()
    second = CountingEngine(cache=TableCache(tmp_path))
    assert second.gpr(12).values == expected[:13]
    assert second.gpr_tables(6)[1][3] == [0, 6, 12, 2]
