"""Shared data types, dataset manifests, and the weight-archive format."""

from .human import SEG_CLASSES, UPPER_CLOTHES_CHANNEL, HumanRepresentation
from .images import (
    center_crop_aspect,
    load_image,
    load_mask,
    resize_image,
    save_image,
    to_u8,
    to_unit_range,
    validate_image,
    validate_mask,
)
from .pose import (
    ARM_HAND_INDICES,
    COCO_KEYPOINT_NAMES,
    COCO_KEYPOINT_SIGMAS,
    MIN_CONFIDENCE,
    NUM_KEYPOINTS,
    PoseKeypoints,
    keypoint_bbox_area,
)
from .records import ORIGINS, DatasetRecord, RecordDescriptor, read_manifest, write_manifest
from .weights import (
    MAGIC,
    archive_element_count,
    load_archive_into,
    load_weights,
    load_weights_any,
    load_weights_dir,
    load_weights_meta,
    save_weights,
    save_weights_dir,
    state_dict_to_archive,
)
