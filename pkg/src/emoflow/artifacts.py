"""Single-file binary container: JSON header + little-endian array blobs.

Layout::

    b"EMOFLOW1\\n" | u64 header length | header JSON | array bytes

The header carries arbitrary metadata plus a manifest of arrays (name, dtype,
shape, byte offset into the blob section). Header JSON is written with sorted
keys and no whitespace so identical inputs give identical bytes.
"""
from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Mapping

import numpy as np

MAGIC = b"EMOFLOW1\n"
_DTYPES = {"f8": "<f8", "i8": "<i8"}


def _canonical(arr: np.ndarray) -> tuple[str, np.ndarray]:
    arr = np.asarray(arr)
    if arr.dtype.kind == "f":
        return "f8", np.ascontiguousarray(arr, dtype="<f8")
    if arr.dtype.kind in "iub":
        return "i8", np.ascontiguousarray(arr, dtype="<i8")
    raise TypeError(f"unsupported dtype {arr.dtype}")


def pack_arrays(arrays: Mapping[str, np.ndarray]) -> tuple[list[dict], bytes]:
    manifest = []
    chunks = []
    offset = 0
    for name, arr in arrays.items():
        code, data = _canonical(arr)
        raw = data.tobytes()
        manifest.append({"name": name, "dtype": code, "shape": list(data.shape), "offset": offset})
        chunks.append(raw)
        offset += len(raw)
    return manifest, b"".join(chunks)


def unpack_arrays(manifest: list[dict], blob: bytes) -> dict[str, np.ndarray]:
    out = {}
    for item in manifest:
        dtype = np.dtype(_DTYPES[item["dtype"]])
        count = int(np.prod(item["shape"], dtype=np.int64))
        start = item["offset"]
        end = start + count * dtype.itemsize
        if end > len(blob):
            raise ValueError(f"array {item['name']!r} runs past end of data")
        arr = np.frombuffer(blob[start:end], dtype=dtype).reshape(item["shape"])
        out[item["name"]] = arr.astype(dtype.newbyteorder("="))
    return out


def dumps_header(header: dict) -> bytes:
    return json.dumps(header, sort_keys=True, separators=(",", ":"), ensure_ascii=True).encode()


def write_container(path: str | Path, header: dict, arrays: Mapping[str, np.ndarray]) -> None:
    manifest, blob = pack_arrays(arrays)
    head = dumps_header({**header, "arrays": manifest})
    with Path(path).open("wb") as fh:
        fh.write(MAGIC)
        fh.write(struct.pack("<Q", len(head)))
        fh.write(head)
        fh.write(blob)


def read_container(path: str | Path) -> tuple[dict, dict[str, np.ndarray]]:
    raw = Path(path).read_bytes()
    if not raw.startswith(MAGIC):
        raise ValueError(f"{path}: not an emoflow artifact")
    pos = len(MAGIC)
    (n,) = struct.unpack_from("<Q", raw, pos)
    pos += 8
    header = json.loads(raw[pos:pos + n])
    arrays = unpack_arrays(header.pop("arrays"), raw[pos + n:])
    return header, arrays
