"""Marker detection and per-frame rotation angle estimation.

The detector thresholds luma to find the bright disk, then locates the dark
front dot inside it; the rotation angle is the direction from the disk
centroid to the dot centroid.  Working purely on luma keeps the detector
usable on grayscale reconstructions as well as on rendered color frames.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .scene import Trajectory, TrajectoryLabel
from .video import Frame, VideoClip, to_grayscale


@dataclass(frozen=True)
class MarkerDetectorConfig:
    disk_luma: int = 128  # bright threshold isolating the disk
    dot_luma: int = 100   # dark threshold isolating the front dot
    min_area_frac: float = 0.02  # of frame area, minimum disk component size


@dataclass(frozen=True)
class MarkerObservation:
    present: bool
    disk_centroid: tuple[float, float] | None = None
    dot_centroid: tuple[float, float] | None = None
    angle: float | None = None


def detect_marker(frame: Frame, cfg: MarkerDetectorConfig = MarkerDetectorConfig()) -> MarkerObservation:
    """Locate the marker; `present` requires both the disk and its dot.

    The disk is the largest connected bright component with area at least
    min_area_frac of the frame; the dot is the set of dark pixels within the
    disk's area-equivalent radius of its centroid.
    """
    luma = to_grayscale(frame).values
    bright = luma > cfg.disk_luma
    labels, n = ndimage.label(bright)
    if n == 0:
        return MarkerObservation(False)
    areas = np.bincount(labels.ravel())
    areas[0] = 0
    biggest = int(areas.argmax())
    area = int(areas[biggest])
    if area < cfg.min_area_frac * frame.width * frame.height:
        return MarkerObservation(False)

    # the dark dot punches a hole in the bright component; fill it so the
    # centroid lands on the disk center rather than opposite the dot
    filled = ndimage.binary_fill_holes(labels == biggest)
    rows, cols = np.nonzero(filled)
    disk_x = float(cols.mean()) + 0.5
    disk_y = float(rows.mean()) + 0.5

    r_eq = math.sqrt(rows.size / math.pi)
    search_r = max(r_eq - 2.0, 0.5 * r_eq)  # stay clear of the rim's dark AA pixels
    dark_rows, dark_cols = np.nonzero(luma <= cfg.dot_luma)
    dx = dark_cols + 0.5 - disk_x
    dy = dark_rows + 0.5 - disk_y
    inside = dx * dx + dy * dy <= search_r * search_r
    if not inside.any():
        return MarkerObservation(False)
    dot_x = float((dark_cols[inside] + 0.5).mean())
    dot_y = float((dark_rows[inside] + 0.5).mean())

    angle = math.degrees(math.atan2(disk_y - dot_y, dot_x - disk_x))
    if angle <= -180.0:
        angle += 360.0
    return MarkerObservation(True, (disk_x, disk_y), (dot_x, dot_y), angle)


def estimate_angle(obs: MarkerObservation) -> float:
    """Rotation angle in (-180, 180] degrees; raises if the marker is absent."""
    if not obs.present or obs.angle is None:
        raise ValueError("no pose: marker not observed")
    return obs.angle


def extract_trajectory(
    clip: VideoClip, cfg: MarkerDetectorConfig = MarkerDetectorConfig()
) -> tuple[Trajectory, np.ndarray]:
    """Per-frame measured angles plus presence flags; absent frames hold 0."""
    angles = np.zeros(len(clip), dtype=np.float64)
    present = np.zeros(len(clip), dtype=bool)
    for i, frame in enumerate(clip.frames):
        obs = detect_marker(frame, cfg)
        if obs.present:
            angles[i] = obs.angle
            present[i] = True
    return Trajectory(angles, clip.fps, TrajectoryLabel.MEASURED), present
