"""
Binary array container (``.rkph``).

Layout, all little-endian::

    magic    4 bytes  b"RKPH"
    version  u16      1
    dtype    u8       1 = c64 (complex, interleaved re/im float64), 2 = f64 (real float64)
    rank     u8
    dims     rank x u64
    payload  row-major entries, 16 bytes (c64) or 8 bytes (f64) each
"""

import struct
from pathlib import Path
from typing import Union

import numpy as np

from ..core.errors import (
    ArgumentError,
    BadMagicError,
    TruncatedPayloadError,
    UnsupportedDtypeError,
    UnsupportedVersionError,
)

MAGIC = b"RKPH"
FORMAT_VERSION = 1
DTYPE_C64 = 1
DTYPE_F64 = 2

_HEADER = struct.Struct("<4sHBB")
_DIM = struct.Struct("<Q")
_NUMPY_DTYPES = {DTYPE_C64: np.dtype("<c16"), DTYPE_F64: np.dtype("<f8")}

PathLike = Union[str, Path]


def encode_array(array, dtype: str = "auto") -> bytes:
    """
    Serialize an array.

    Args:
        array: numeric array of any rank up to 255
        dtype: "c64", "f64", or "auto" (f64 for real input, c64 otherwise)

    Returns:
        file contents
    """
    array = np.asarray(array)
    if dtype == "auto":
        dtype = "c64" if np.iscomplexobj(array) else "f64"
    if dtype == "c64":
        tag = DTYPE_C64
    elif dtype == "f64":
        if np.iscomplexobj(array):
            raise ArgumentError("Complex data cannot be written with the f64 tag")
        tag = DTYPE_F64
    else:
        raise ArgumentError(f"Unknown dtype '{dtype}', expected c64, f64 or auto")
    if array.ndim > 255:
        raise ArgumentError(f"Rank {array.ndim} exceeds the format limit of 255")

    header = _HEADER.pack(MAGIC, FORMAT_VERSION, tag, array.ndim)
    dims = b"".join(_DIM.pack(d) for d in array.shape)
    payload = np.ascontiguousarray(array, dtype=_NUMPY_DTYPES[tag]).tobytes()
    return header + dims + payload


def decode_array(data: bytes, path: str = "") -> np.ndarray:
    """
    Parse file contents produced by :func:`encode_array`.

    Raises:
        BadMagicError, UnsupportedVersionError, UnsupportedDtypeError,
        TruncatedPayloadError
    """
    if len(data) < len(MAGIC) or data[: len(MAGIC)] != MAGIC:
        raise BadMagicError(f"Not an RKPH array file (magic {data[:4]!r})", path)
    if len(data) < _HEADER.size:
        raise TruncatedPayloadError("Header is truncated", path)
    _, version, tag, rank = _HEADER.unpack_from(data, 0)
    if version != FORMAT_VERSION:
        raise UnsupportedVersionError(f"Format version {version} is not supported", path)
    if tag not in _NUMPY_DTYPES:
        raise UnsupportedDtypeError(f"Dtype tag {tag} is not supported", path)

    offset = _HEADER.size
    if len(data) < offset + rank * _DIM.size:
        raise TruncatedPayloadError(f"Header declares rank {rank} but dims are truncated", path)
    dims = tuple(_DIM.unpack_from(data, offset + i * _DIM.size)[0] for i in range(rank))
    offset += rank * _DIM.size

    dtype = _NUMPY_DTYPES[tag]
    count = int(np.prod(dims, dtype=np.uint64)) if dims else 1
    expected = count * dtype.itemsize
    available = len(data) - offset
    if available != expected:
        raise TruncatedPayloadError(
            f"Payload has {available} bytes, dims {dims} need {expected}", path
        )
    values = np.frombuffer(data, dtype=dtype, count=count, offset=offset)
    return values.reshape(dims).astype(dtype.newbyteorder("="), copy=True)


def write_array(path: PathLike, array, dtype: str = "auto") -> None:
    Path(path).write_bytes(encode_array(array, dtype))


def read_array(path: PathLike) -> np.ndarray:
    path = Path(path)
    return decode_array(path.read_bytes(), str(path))
