"""Binary on-disk formats for datasets and training checkpoints.

Dataset layout (magic "SEDODS1\\0"):

    magic            8 bytes
    format version   u32 LE (currently 1)
    benchmark id     u32 LE
    N, m, Q, n_x, n_t  five u64 LE
    inputs           N * m float64 LE, row-major
    targets          N * Q float64 LE, row-major
    crc32            u32 LE over all preceding bytes

Checkpoint layout (magic "SEDOCK1\\0"): magic, version u32, a u64
length-prefixed UTF-8 JSON config block, u64 array count, then each array
as u64 ndim, u64 dims, float64 LE data, and the trailing crc32 u32.

Loads validate magic, version, checksum, and structural consistency before
touching any payload; anything wrong raises FormatError. Query grids are
not stored: they are reconstructed canonically from (benchmark, n_x, n_t),
and the in-memory config snapshot of a Dataset is not persisted either.
"""

from __future__ import annotations

import json
import struct
import zlib

import numpy as np

from .errors import FormatError

DATASET_MAGIC = b"SEDODS1\x00"
CHECKPOINT_MAGIC = b"SEDOCK1\x00"
FORMAT_VERSION = 1

BENCHMARK_IDS = {
    "poisson2d": 0,
    "burgers1d": 1,
    "advdiff1d": 2,
    "lorenz96": 3,
    "allencahn": 4,
}
_ID_TO_BENCHMARK = {v: k for k, v in BENCHMARK_IDS.items()}


class _Reader:
    """Cursor over a byte buffer; every read is bounds-checked."""

    def __init__(self, buf: bytes):
        self.buf = buf
        self.pos = 0

    def take(self, n: int) -> bytes:
        if n < 0 or self.pos + n > len(self.buf):
            raise FormatError("file truncated")
        out = self.buf[self.pos:self.pos + n]
        self.pos += n
        return out

    def u32(self) -> int:
        return struct.unpack("<I", self.take(4))[0]

    def u64(self) -> int:
        return struct.unpack("<Q", self.take(8))[0]

    def floats(self, count: int) -> np.ndarray:
        if count > (len(self.buf) - self.pos) // 8:
            raise FormatError("file truncated")
        arr = np.frombuffer(self.take(8 * count), dtype="<f8")
        return arr.astype(float)  # own, writable copy in native order

    def done(self):
        if self.pos != len(self.buf):
            raise FormatError("trailing bytes after payload")


def _f8_bytes(arr) -> bytes:
    return np.ascontiguousarray(arr, dtype="<f8").tobytes()


def _check_envelope(buf: bytes, magic: bytes) -> _Reader:
    """Verify magic, version, and checksum; return a reader past the version."""
    if len(buf) < len(magic) + 8:
        raise FormatError("file too short")
    if buf[:len(magic)] != magic:
        raise FormatError("bad magic")
    body, (crc,) = buf[:-4], struct.unpack("<I", buf[-4:])
    if zlib.crc32(body) & 0xFFFFFFFF != crc:
        raise FormatError("checksum mismatch")
    r = _Reader(buf[:-4])
    r.take(len(magic))
    version = r.u32()
    if version != FORMAT_VERSION:
        raise FormatError(f"unsupported format version {version}")
    return r


# ---------------------------------------------------------------------------
# Datasets


def dataset_to_bytes(ds) -> bytes:
    from .datagen import Dataset  # local import to avoid a cycle

    if not isinstance(ds, Dataset):
        raise FormatError("expected a Dataset")
    n, m = ds.inputs.shape
    q = ds.targets.shape[1]
    body = b"".join([
        DATASET_MAGIC,
        struct.pack("<I", FORMAT_VERSION),
        struct.pack("<I", BENCHMARK_IDS[ds.benchmark]),
        struct.pack("<QQQQQ", n, m, q, ds.grid.n_x, ds.grid.n_t),
        _f8_bytes(ds.inputs),
        _f8_bytes(ds.targets),
    ])
    return body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)


def dataset_from_bytes(buf: bytes):
    from .datagen import Dataset, grid_for_benchmark

    r = _check_envelope(buf, DATASET_MAGIC)
    bench_id = r.u32()
    if bench_id not in _ID_TO_BENCHMARK:
        raise FormatError(f"unknown benchmark id {bench_id}")
    benchmark = _ID_TO_BENCHMARK[bench_id]
    n, m, q, n_x, n_t = (r.u64() for _ in range(5))
    if n < 1 or m < 1 or q < 1:
        raise FormatError("empty dimension in header")
    if n_x * n_t != q:
        raise FormatError("grid dims inconsistent with Q")
    inputs = r.floats(n * m).reshape(n, m)
    targets = r.floats(n * q).reshape(n, q)
    r.done()
    return Dataset(benchmark, inputs, targets,
                   grid_for_benchmark(benchmark, int(n_x), int(n_t)))


def save_dataset(ds, path) -> None:
    with open(path, "wb") as fh:
        fh.write(dataset_to_bytes(ds))


def load_dataset(path):
    with open(path, "rb") as fh:
        return dataset_from_bytes(fh.read())


# ---------------------------------------------------------------------------
# Checkpoints


def checkpoint_to_bytes(ckpt) -> bytes:
    cfg_json = json.dumps(ckpt.config, sort_keys=True,
                          separators=(",", ":")).encode("utf-8")
    arrays = list(ckpt.params) + [ckpt.input_mean, ckpt.input_std,
                                  np.asarray(ckpt.loss_history, dtype=float)]
    parts = [
        CHECKPOINT_MAGIC,
        struct.pack("<I", FORMAT_VERSION),
        struct.pack("<Q", len(cfg_json)),
        cfg_json,
        struct.pack("<Q", len(arrays)),
    ]
    for arr in arrays:
        a = np.asarray(arr, dtype=float)
        parts.append(struct.pack("<Q", a.ndim))
        for dim in a.shape:
            parts.append(struct.pack("<Q", dim))
        parts.append(_f8_bytes(a))
    body = b"".join(parts)
    return body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF)


def checkpoint_from_bytes(buf: bytes):
    from .pipeline import Checkpoint, validate_snapshot

    r = _check_envelope(buf, CHECKPOINT_MAGIC)
    cfg_len = r.u64()
    try:
        config = json.loads(r.take(cfg_len).decode("utf-8"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise FormatError(f"bad config block: {exc}") from exc
    if not isinstance(config, dict):
        raise FormatError("config block is not a JSON object")
    try:
        expected_shapes = validate_snapshot(config)
    except Exception as exc:
        raise FormatError(f"inconsistent config snapshot: {exc}") from exc

    n_arrays = r.u64()
    if n_arrays != len(expected_shapes):
        raise FormatError(
            f"expected {len(expected_shapes)} arrays, header says {n_arrays}")
    arrays = []
    for shape in expected_shapes:
        ndim = r.u64()
        if ndim > 2:
            raise FormatError(f"array rank {ndim} out of range")
        dims = tuple(r.u64() for _ in range(ndim))
        count = 1
        for d in dims:
            count *= d
        arrays.append(r.floats(count).reshape(dims))
        # shape is None for the variable-length loss history
        if shape is not None and dims != shape:
            raise FormatError(f"array shape {dims} does not match config {shape}")
    r.done()
    *params, mean, std, history = arrays
    return Checkpoint(config, params, mean, std, history)


def save_checkpoint(ckpt, path) -> None:
    with open(path, "wb") as fh:
        fh.write(checkpoint_to_bytes(ckpt))


def load_checkpoint(path):
    with open(path, "rb") as fh:
        return checkpoint_from_bytes(fh.read())
