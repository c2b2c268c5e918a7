"""Named-tensor weight archives.

The train -> serve handoff format: a manifest listing (name, dtype, shape,
byte offset) plus one little-endian f32 blob. Two layouts exist:

* a directory holding ``manifest.json`` and ``weights.bin``
* a single container file: 8-byte magic ``DMVTONW1``, an 8-byte
  little-endian manifest length, the manifest JSON, then the blob.

Round trips are bit-exact.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path
from typing import Mapping

import numpy as np
import torch

MAGIC = b"DMVTONW1"
_DTYPE = np.dtype("<f4")


def _as_f32_array(value) -> np.ndarray:
    if isinstance(value, torch.Tensor):
        value = value.detach().cpu().numpy()
    arr = np.asarray(value)
    if arr.dtype != np.float32:
        arr = arr.astype(np.float32)
    return np.ascontiguousarray(arr, dtype=_DTYPE)


def build_archive(named_tensors: Mapping[str, object], meta: dict | None = None) -> tuple[dict, bytes]:
    """Returns (manifest, blob) for a mapping of named tensors."""
    names = list(named_tensors)
    if len(set(names)) != len(names):
        raise ValueError("duplicate tensor names")
    entries = []
    chunks = []
    offset = 0
    for name in names:
        arr = _as_f32_array(named_tensors[name])
        raw = arr.tobytes()
        entries.append(
            {"name": name, "dtype": "f32", "shape": list(arr.shape), "offset": offset}
        )
        chunks.append(raw)
        offset += len(raw)
    manifest = {"tensors": entries}
    if meta:
        manifest["meta"] = meta
    return manifest, b"".join(chunks)


def _check_and_slice(manifest: dict, blob: bytes) -> dict[str, np.ndarray]:
    entries = manifest.get("tensors")
    if not isinstance(entries, list):
        raise ValueError("manifest has no tensor list")
    names = [e["name"] for e in entries]
    if len(set(names)) != len(names):
        raise ValueError("duplicate tensor names in manifest")
    spans = []
    total = 0
    for e in entries:
        if e.get("dtype") != "f32":
            raise ValueError(f"unknown dtype {e.get('dtype')!r} for tensor {e['name']!r}")
        n = int(np.prod(e["shape"], dtype=np.int64)) if e["shape"] else 1
        size = n * 4
        spans.append((int(e["offset"]), size))
        total += size
    if total != len(blob):
        raise ValueError(f"blob size {len(blob)} does not match manifest total {total}")
    for (off, size), (off2, _) in zip(sorted(spans), sorted(spans)[1:]):
        if off + size > off2:
            raise ValueError("overlapping tensor offsets in manifest")
    out = {}
    for e, (off, size) in zip(entries, spans):
        if off < 0 or off + size > len(blob):
            raise ValueError(f"tensor {e['name']!r} offset out of range")
        arr = np.frombuffer(blob, dtype=_DTYPE, count=size // 4, offset=off)
        out[e["name"]] = arr.reshape(e["shape"]).copy()
    return out


def save_weights(named_tensors: Mapping[str, object], meta: dict | None = None) -> bytes:
    """Serializes named tensors into a single container file's bytes."""
    manifest, blob = build_archive(named_tensors, meta)
    mjson = json.dumps(manifest, sort_keys=True).encode("utf-8")
    return MAGIC + struct.pack("<Q", len(mjson)) + mjson + blob


def load_weights(data: bytes) -> dict[str, np.ndarray]:
    """Parses container-file bytes back into {name: f32 array}, bit-exactly."""
    if len(data) < 16 or data[:8] != MAGIC:
        raise ValueError("not a weight archive (bad magic)")
    (mlen,) = struct.unpack("<Q", data[8:16])
    if 16 + mlen > len(data):
        raise ValueError("manifest length exceeds file size")
    manifest = json.loads(data[16 : 16 + mlen].decode("utf-8"))
    return _check_and_slice(manifest, data[16 + mlen :])


def load_weights_meta(data: bytes) -> dict:
    if len(data) < 16 or data[:8] != MAGIC:
        raise ValueError("not a weight archive (bad magic)")
    (mlen,) = struct.unpack("<Q", data[8:16])
    return json.loads(data[16 : 16 + mlen].decode("utf-8")).get("meta", {})


def save_weights_dir(named_tensors: Mapping[str, object], directory: str | Path, meta: dict | None = None) -> Path:
    """Writes the directory layout: manifest.json + weights.bin."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest, blob = build_archive(named_tensors, meta)
    (directory / "manifest.json").write_text(json.dumps(manifest, indent=1, sort_keys=True))
    (directory / "weights.bin").write_bytes(blob)
    return directory


def load_weights_dir(directory: str | Path) -> dict[str, np.ndarray]:
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    blob_path = directory / "weights.bin"
    if not manifest_path.is_file() or not blob_path.is_file():
        raise FileNotFoundError(f"no weight archive in {directory}")
    manifest = json.loads(manifest_path.read_text())
    return _check_and_slice(manifest, blob_path.read_bytes())


def load_weights_any(path: str | Path) -> dict[str, np.ndarray]:
    """Loads either archive layout from a path."""
    path = Path(path)
    if path.is_dir():
        return load_weights_dir(path)
    if not path.is_file():
        raise FileNotFoundError(f"weight archive not found: {path}")
    return load_weights(path.read_bytes())


def archive_element_count(named_tensors: Mapping[str, object]) -> int:
    return sum(int(np.asarray(_as_f32_array(v)).size) for v in named_tensors.values())


def state_dict_to_archive(module: torch.nn.Module) -> dict[str, np.ndarray]:
    return {k: v.detach().cpu().numpy().astype(np.float32) for k, v in module.state_dict().items()}


def load_archive_into(module: torch.nn.Module, tensors: Mapping[str, np.ndarray]) -> None:
    state = {k: torch.from_numpy(np.asarray(v)) for k, v in tensors.items()}
    module.load_state_dict(state, strict=True)
