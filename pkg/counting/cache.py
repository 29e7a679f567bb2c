"""
Binary cache for exact counting tables

File layout of ``{family}-{N}.bin``:

    magic     8 bytes  b"PSL2TBL1"
    ndim      uint32
    dims      ndim x uint32 (padded extent of every axis)
    entries   prod(dims) x (uint32 byte length + little-endian magnitude)

All integers little-endian; entries in row-major order, ragged rows padded
with zeros.

Author: PSL2 Subgroups Team
License: MIT
"""

import logging
import re
import struct
from pathlib import Path
from typing import Any, List, Optional, Sequence

from psl2.exceptions import TableCorruptionError

logger = logging.getLogger(__name__)

MAGIC = b"PSL2TBL1"
_UINT32 = struct.Struct("<I")
_NAME = re.compile(r"^[A-Za-z0-9_]+$")


def _dims(values: Any, ndim: int) -> List[int]:
    if ndim == 1:
        return [len(values)]
    inner = [_dims(v, ndim - 1) for v in values] or [[0] * (ndim - 1)]
    return [len(values)] + [max(d[i] for d in inner) for i in range(ndim - 1)]


def _flatten(values: Any, dims: Sequence[int], out: List[int]):
    if len(dims) == 1:
        out.extend(values)
        out.extend([0] * (dims[0] - len(values)))
        return
    for i in range(dims[0]):
        _flatten(values[i] if i < len(values) else [], dims[1:], out)


def _unflatten(flat: List[int], dims: Sequence[int]) -> Any:
    if len(dims) == 1:
        return flat
    step = len(flat) // dims[0] if dims[0] else 0
    rows = [_unflatten(flat[i * step:(i + 1) * step], dims[1:]) for i in range(dims[0])]
    if len(dims) == 2:
        for row in rows:
            while row and row[-1] == 0:
                row.pop()
    return rows


def encode_table(values: Any, ndim: int) -> bytes:
    dims = _dims(values, ndim)
    flat: List[int] = []
    _flatten(values, dims, flat)
    parts = [MAGIC, _UINT32.pack(ndim)] + [_UINT32.pack(d) for d in dims]
    for x in flat:
        if x < 0:
            raise TableCorruptionError(f"negative entry {x} cannot be cached")
        raw = x.to_bytes((x.bit_length() + 7) // 8, "little")
        parts.append(_UINT32.pack(len(raw)))
        parts.append(raw)
    return b"".join(parts)


def decode_table(data: bytes) -> Any:
    """Inverse of encode_table; raises TableCorruptionError on malformed data"""
    if not data.startswith(MAGIC):
        raise TableCorruptionError("bad magic")
    try:
        pos = len(MAGIC)
        (ndim,) = _UINT32.unpack_from(data, pos)
        pos += 4
        dims = [_UINT32.unpack_from(data, pos + 4 * i)[0] for i in range(ndim)]
        pos += 4 * ndim
        total = 1
        for d in dims:
            total *= d
        flat = []
        for _ in range(total):
            (length,) = _UINT32.unpack_from(data, pos)
            pos += 4
            if pos + length > len(data):
                raise TableCorruptionError("truncated entry")
            flat.append(int.from_bytes(data[pos:pos + length], "little"))
            pos += length
    except struct.error as e:
        raise TableCorruptionError(f"truncated header: {e}") from e
    if pos != len(data):
        raise TableCorruptionError(f"{len(data) - pos} trailing bytes")
    return _unflatten(flat, dims)


class TableCache:
    """Directory of cached tables keyed by family and size"""

    def __init__(self, directory: Path):
        self.directory = Path(directory)
        self.logger = logging.getLogger(__name__)

    def path(self, family: str, N: int) -> Path:
        if not _NAME.match(family):
            raise ValueError(f"Unsafe table name {family!r}")
        return self.directory / f"{family}-{N}.bin"

    def load(self, family: str, N: int) -> Optional[Any]:
        """Table covering sizes 0..N (sliced from a larger one if needed), or None"""
        if not self.directory.is_dir():
            return None
        candidates = []
        for p in self.directory.glob(f"{family}-*.bin"):
            suffix = p.stem[len(family) + 1:]
            if suffix.isdigit() and int(suffix) >= N:
                candidates.append((int(suffix), p))
        for size, p in sorted(candidates):
            try:
                values = decode_table(p.read_bytes())
            except (OSError, TableCorruptionError) as e:
                self.logger.warning(f"Ignoring corrupt cache file {p}: {e}")
                continue
            self.logger.debug(f"Cache hit {family} (N={size}) for N={N}")
            return values[:N + 1]
        self.logger.debug(f"Cache miss {family} N={N}")
        return None

    def save(self, family: str, N: int, values: Any, ndim: int):
        try:
            self.directory.mkdir(parents=True, exist_ok=True)
            target = self.path(family, N)
            tmp = target.with_suffix(".tmp")
            tmp.write_bytes(encode_table(values, ndim))
            tmp.replace(target)
            self.logger.debug(f"Cached {family} N={N} at {target}")
        except OSError as e:
            self.logger.warning(f"Could not write cache for {family}: {e}")

    def clear(self) -> int:
        removed = 0
        if self.directory.is_dir():
            for p in self.directory.glob("*.bin"):
                p.unlink()
                removed += 1
        return removed
