"""Versioned binary checkpoint container.

Byte layout:
  bytes 0-7   magic "MSEGCKPT"
  bytes 8-11  format version, uint32 little-endian
  bytes 12-19 JSON header length H, uint64 little-endian
  bytes 20..  UTF-8 JSON header (network config echo + tensor index with
              name, shape, byte offset into the payload)
  then        payload: the tensors, row-major float32, in index order

Running batch-norm statistics are stored alongside the trainable tensors
under "<bn>.running_mean/var" names.
"""

from __future__ import annotations

import dataclasses
import json
import struct

import numpy as np

from .network import NetworkConfig, SegmentationNetwork

MAGIC = b"MSEGCKPT"
VERSION = 1


class CheckpointError(ValueError):
    pass


def _all_tensors(net: SegmentationNetwork):
    for name, p in net.parameters():
        yield name, p.value
    for name, bn in _batch_norms(net):
        yield f"{name}.running_mean", bn.running_mean
        yield f"{name}.running_var", bn.running_var


def _batch_norms(net: SegmentationNetwork):
    from .layers import BatchNorm

    def walk(prefix, blocks):
        for b, blk in enumerate(blocks):
            for branch_name in ("geodesic", "euclidean"):
                branch = getattr(blk, branch_name, None)
                if branch is None:
                    continue
                for i, m in enumerate(branch.phi.modules):
                    if isinstance(m, BatchNorm):
                        yield f"{prefix}.{b}.{branch_name}.phi.{i}", m

    for lvl, blocks in enumerate(net.encoder):
        yield from walk(f"encoder.{lvl}", blocks)
    for i, blocks in enumerate(net.decoder):
        yield from walk(f"decoder.{i}", blocks)
    yield "head.bn", net.head_bn


def save_checkpoint(net: SegmentationNetwork, path):
    tensors = list(_all_tensors(net))
    index = []
    offset = 0
    for name, value in tensors:
        index.append({"name": name, "shape": list(value.shape), "offset": offset})
        offset += value.size * 4
    header = {
        "config": dataclasses.asdict(net.config),
        "tensors": index,
        "payload_bytes": offset,
    }
    blob = json.dumps(header, sort_keys=True).encode("utf-8")
    with open(path, "wb") as f:
        f.write(MAGIC)
        f.write(struct.pack("<I", VERSION))
        f.write(struct.pack("<Q", len(blob)))
        f.write(blob)
        for _, value in tensors:
            f.write(np.ascontiguousarray(value, dtype="<f4").tobytes())


def load_checkpoint(path) -> SegmentationNetwork:
    with open(path, "rb") as f:
        data = f.read()
    if data[:8] != MAGIC:
        raise CheckpointError("bad magic, not a checkpoint file")
    (version,) = struct.unpack_from("<I", data, 8)
    if version != VERSION:
        raise CheckpointError(f"unsupported checkpoint version {version}")
    (hlen,) = struct.unpack_from("<Q", data, 12)
    header = json.loads(data[20:20 + hlen].decode("utf-8"))
    payload = data[20 + hlen:]

    cfg = header["config"]
    cfg["geo_widths"] = tuple(tuple(w) for w in cfg["geo_widths"])
    cfg["euc_widths"] = tuple(tuple(w) for w in cfg["euc_widths"])
    net = SegmentationNetwork(NetworkConfig(**cfg))

    lookup = {name: value for name, value in _all_tensors(net)}
    for entry in header["tensors"]:
        name, shape, offset = entry["name"], tuple(entry["shape"]), entry["offset"]
        if name not in lookup:
            raise CheckpointError(f"unknown tensor {name!r} in checkpoint")
        target = lookup[name]
        if tuple(target.shape) != shape:
            raise CheckpointError(
                f"tensor {name!r} shape {shape} does not match config {target.shape}"
            )
        count = int(np.prod(shape)) if shape else 1
        arr = np.frombuffer(payload, dtype="<f4", count=count, offset=offset)
        target[...] = arr.reshape(shape).astype(np.float64)
    return net
