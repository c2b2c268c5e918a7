"""Dataset records and the manifest.json format.

``manifest.json`` schema::

    {"records": [{"id", "person", "garment", "garment_mask", "pose",
                  "parser_map"?, "origin"}]}

Paths are relative to the manifest's directory. The parser map is a
grayscale PNG of class indices; the pose file is JSON with 17 keypoint
triples. Records resolve lazily: descriptors carry paths, ``load()``
decodes and validates.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch
from PIL import Image

from . import images
from .human import SEG_CLASSES, HumanRepresentation
from .pose import PoseKeypoints

ORIGINS = ("real", "synthesized")


@dataclass
class DatasetRecord:
    record_id: str
    person: torch.Tensor
    garment: torch.Tensor
    garment_mask: torch.Tensor
    pose: PoseKeypoints
    human_rep: HumanRepresentation | None
    origin: str = "real"

    def __post_init__(self):
        images.validate_image(self.person, "person")
        images.validate_image(self.garment, "garment")
        images.validate_mask(self.garment_mask, "garment_mask")
        if self.origin not in ORIGINS:
            raise ValueError(f"origin must be one of {ORIGINS}")
        hw = self.person.shape[1:]
        if self.garment.shape[1:] != hw or self.garment_mask.shape != hw:
            raise ValueError(f"record {self.record_id}: members are not spatially consistent")
        if self.human_rep is not None and self.human_rep.spatial_size != tuple(hw):
            raise ValueError(f"record {self.record_id}: human_rep size mismatch")
        if self.origin == "synthesized" and self.pose is None:
            raise ValueError(f"record {self.record_id}: synthesized records must carry a pose")


@dataclass
class RecordDescriptor:
    record_id: str
    person_path: Path
    garment_path: Path
    garment_mask_path: Path
    pose_path: Path
    parser_map_path: Path | None
    origin: str

    def load(
        self,
        target_size: tuple[int, int] | None = None,
        seg_channels: int = len(SEG_CLASSES),
        heatmap_sigma: float = 3.0,
    ) -> DatasetRecord:
        person = images.load_image(self.person_path, target_size)
        garment = images.load_image(self.garment_path, target_size)
        mask = images.load_mask(self.garment_mask_path, target_size)
        pose = PoseKeypoints.from_json(json.loads(self.pose_path.read_text()))
        human_rep = None
        if self.parser_map_path is not None:
            with Image.open(self.parser_map_path) as img:
                labels = torch.from_numpy(np.asarray(img.convert("L")).astype(np.int64))
            if target_size is not None and labels.shape != tuple(target_size):
                raise ValueError(
                    f"record {self.record_id}: parser map {tuple(labels.shape)} "
                    f"does not match target size {target_size}"
                )
            human_rep = HumanRepresentation.build(labels, pose, seg_channels, heatmap_sigma)
        return DatasetRecord(
            record_id=self.record_id,
            person=person,
            garment=garment,
            garment_mask=mask,
            pose=pose,
            human_rep=human_rep,
            origin=self.origin,
        )


_REQUIRED_KEYS = ("id", "person", "garment", "garment_mask", "pose")


def read_manifest(directory: str | Path) -> list[RecordDescriptor]:
    """Parses manifest.json into lazily resolvable record descriptors."""
    directory = Path(directory)
    manifest_path = directory / "manifest.json"
    if not manifest_path.is_file():
        raise FileNotFoundError(f"no manifest.json in {directory}")
    try:
        doc = json.loads(manifest_path.read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"malformed manifest {manifest_path}: {exc}") from exc
    out = []
    for entry in doc.get("records", []):
        rid = entry.get("id", "<missing id>")
        for key in _REQUIRED_KEYS:
            if key not in entry:
                raise ValueError(f"manifest record {rid!r} is missing {key!r}")
        origin = entry.get("origin", "real")
        if origin not in ORIGINS:
            raise ValueError(f"manifest record {rid!r} has unknown origin {origin!r}")

        def _resolve(rel: str, what: str) -> Path:
            p = directory / rel
            if not p.is_file():
                raise FileNotFoundError(f"record {rid!r}: {what} path does not exist: {p}")
            return p

        out.append(
            RecordDescriptor(
                record_id=str(entry["id"]),
                person_path=_resolve(entry["person"], "person"),
                garment_path=_resolve(entry["garment"], "garment"),
                garment_mask_path=_resolve(entry["garment_mask"], "garment_mask"),
                pose_path=_resolve(entry["pose"], "pose"),
                parser_map_path=(
                    _resolve(entry["parser_map"], "parser_map") if entry.get("parser_map") else None
                ),
                origin=origin,
            )
        )
    return out


def write_manifest(directory: str | Path, entries: list[dict]) -> Path:
    """Writes manifest.json given already-relative record entries."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / "manifest.json"
    path.write_text(json.dumps({"records": entries}, indent=1))
    return path
