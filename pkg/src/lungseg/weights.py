"""Binary weight-file format (SEGW): named float32 arrays in a flat container.

Layout, all little-endian:

    magic   4 bytes         b"SEGW"
    version u16             currently 1
    count   u32             number of records
    count record descriptors:
        name_len u16, name (UTF-8), rank u8, dims rank x u32
    payloads: each record's values as contiguous float32, in record order

Parsing is fail-closed: bad magic or version raises WeightHeaderError, a
file that ends early raises WeightTruncationError, and a record set that
does not assemble into a consistent WeightStore raises WeightShapeError.
"""
from __future__ import annotations

import math
import struct
from pathlib import Path

import numpy as np

from .config import DecoderConfig
from .decoder import BlockWeights, WeightStore
from .errors import (
    ConfigError,
    ContractViolation,
    WeightFormatError,
    WeightHeaderError,
    WeightShapeError,
    WeightTruncationError,
)
from .nn import BnParams, KernelBank

MAGIC = b"SEGW"
VERSION = 1


def write_records(records: list[tuple[str, np.ndarray]], path: str | Path) -> None:
    """Write (name, array) pairs to the container; values are stored as float32."""
    head = [MAGIC, struct.pack("<HI", VERSION, len(records))]
    body = []
    for name, arr in records:
        arr = np.asarray(arr, dtype=np.float64)
        raw = name.encode("utf-8")
        if len(raw) > 0xFFFF:
            raise ValueError(f"record name too long: {len(raw)} bytes")
        if arr.ndim > 0xFF:
            raise ValueError(f"record {name!r}: rank {arr.ndim} exceeds format limit")
        head.append(struct.pack("<H", len(raw)))
        head.append(raw)
        head.append(struct.pack("<B", arr.ndim))
        head.append(struct.pack(f"<{arr.ndim}I", *arr.shape))
        body.append(np.ascontiguousarray(arr, dtype="<f4").tobytes())
    Path(path).write_bytes(b"".join(head) + b"".join(body))


def read_records(path: str | Path) -> dict[str, np.ndarray]:
    """Read the container back into an ordered name -> float64 array mapping."""
    data = Path(path).read_bytes()
    pos = 0

    def need(n: int, what: str) -> bytes:
        nonlocal pos
        if pos + n > len(data):
            raise WeightTruncationError(
                f"file ends inside {what}: need {n} bytes at offset {pos}, "
                f"have {len(data) - pos}"
            )
        chunk = data[pos:pos + n]
        pos += n
        return chunk

    magic = need(4, "magic")
    if magic != MAGIC:
        raise WeightHeaderError(f"bad magic {magic!r}, expected {MAGIC!r}")
    (version,) = struct.unpack("<H", need(2, "version"))
    if version != VERSION:
        raise WeightHeaderError(f"unsupported version {version}, expected {VERSION}")
    (count,) = struct.unpack("<I", need(4, "record count"))

    descs: list[tuple[str, tuple[int, ...]]] = []
    for idx in range(count):
        (name_len,) = struct.unpack("<H", need(2, f"record {idx} name length"))
        raw = need(name_len, f"record {idx} name")
        try:
            name = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise WeightFormatError(f"record {idx}: name is not valid UTF-8") from exc
        (rank,) = struct.unpack("<B", need(1, f"record {name!r} rank"))
        dims = struct.unpack(f"<{rank}I", need(4 * rank, f"record {name!r} dims"))
        descs.append((name, dims))

    out: dict[str, np.ndarray] = {}
    for name, dims in descs:
        size = math.prod(dims)
        raw = need(4 * size, f"record {name!r} payload")
        if name in out:
            raise WeightShapeError(f"duplicate record name {name!r}")
        arr = np.frombuffer(raw, dtype="<f4", count=size).reshape(dims)
        out[name] = arr.astype(np.float64)
    if pos != len(data):
        raise WeightFormatError(f"{len(data) - pos} trailing bytes after last payload")
    return out


def _flatten(store: WeightStore) -> list[tuple[str, np.ndarray]]:
    recs: list[tuple[str, np.ndarray]] = []
    for i, kb in enumerate(store.encoder):
        recs.append((f"encoder.{i}.weight", kb.weights))
        recs.append((f"encoder.{i}.bias", kb.bias))
    for i, bw in enumerate(store.blocks):
        recs.append((f"block.{i}.conv.weight", bw.conv.weights))
        recs.append((f"block.{i}.conv.bias", bw.conv.bias))
        recs.append((f"block.{i}.bn.gamma", bw.bn.gamma))
        recs.append((f"block.{i}.bn.beta", bw.bn.beta))
        recs.append((f"block.{i}.bn.mean", bw.bn.running_mean))
        recs.append((f"block.{i}.bn.var", bw.bn.running_var))
        recs.append((f"block.{i}.bn.epsilon", np.float64(bw.bn.epsilon)))
    recs.append(("classifier.weight", store.classifier.weights))
    recs.append(("classifier.bias", store.classifier.bias))
    return recs


def save_weights(store: WeightStore, path: str | Path) -> None:
    """Serialize a WeightStore; exact under round trip for float32-representable values."""
    write_records(_flatten(store), path)


def load_weights(path: str | Path, config: DecoderConfig | None = None) -> WeightStore:
    """Read a WeightStore back, checking the record set assembles consistently.

    When a config is given, every layer shape is also validated against it
    before the store is returned; a mismatch raises WeightShapeError naming
    the offending layer.
    """
    recs = read_records(path)

    def take(name: str, rank: int) -> np.ndarray:
        if name not in recs:
            raise WeightShapeError(f"missing record {name!r}")
        arr = recs.pop(name)
        if arr.ndim != rank:
            raise WeightShapeError(
                f"record {name!r}: expected rank {rank}, got rank {arr.ndim}"
            )
        return arr

    def build(where: str, factory, *args):
        """Construct a parameter object, renaming consistency errors after the record group."""
        try:
            return factory(*args)
        except (ConfigError, ContractViolation) as exc:
            raise WeightShapeError(f"{where}: {exc}") from exc

    def kernel(prefix: str) -> KernelBank:
        return build(prefix, KernelBank, take(f"{prefix}.weight", 4), take(f"{prefix}.bias", 1))

    encoder = []
    i = 0
    while f"encoder.{i}.weight" in recs:
        encoder.append(kernel(f"encoder.{i}"))
        i += 1
    if not encoder:
        raise WeightShapeError("missing record 'encoder.0.weight'")

    blocks = []
    i = 0
    while f"block.{i}.conv.weight" in recs:
        conv = kernel(f"block.{i}.conv")
        bn = build(
            f"block.{i}.bn", BnParams,
            take(f"block.{i}.bn.gamma", 1),
            take(f"block.{i}.bn.beta", 1),
            take(f"block.{i}.bn.mean", 1),
            take(f"block.{i}.bn.var", 1),
            float(take(f"block.{i}.bn.epsilon", 0)),
        )
        blocks.append(build(f"block {i}", BlockWeights, conv, bn))
        i += 1
    if not blocks:
        raise WeightShapeError("missing record 'block.0.conv.weight'")

    classifier = kernel("classifier")
    store = build("weight store", WeightStore, tuple(encoder), tuple(blocks), classifier)
    if recs:
        raise WeightShapeError(f"unexpected record {next(iter(recs))!r}")
    if config is not None:
        try:
            store.validate(config)
        except ConfigError as exc:
            raise WeightShapeError(f"file does not match config: {exc}") from exc
    return store
