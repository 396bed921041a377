"""Frame-difference anomaly detection and clip segmentation.

Dual strategy: (a) count blurred-luma differences against the first frame
inside a border ring and flag frames whose count exceeds a pixel threshold;
(b) flag any run of >= k consecutive frames in which the tracked marker is
undetected (the whole run is flagged retroactively, so corrupted frames
cannot leak into the leading clean segment).  The detected interval spans
the first to the last flagged frame.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .pose import MarkerDetectorConfig, detect_marker
from .video import Frame, VideoClip, abs_diff_count, gaussian_blur, make_edge_mask, to_grayscale

# Reference parameters, defined at 720x720; border and pixel count rescale
# with resolution, the intensity threshold does not.
REF_WIDTH = 720
REF_BORDER = 50
REF_DIFF_THRESHOLD = 100
REF_PIXEL_THRESHOLD = 1000
REF_ROI_LOSS_K = 3


@dataclass(frozen=True)
class DetectionParams:
    border: int = REF_BORDER
    diff_threshold: int = REF_DIFF_THRESHOLD
    pixel_threshold: int = REF_PIXEL_THRESHOLD
    roi_loss_k: int = REF_ROI_LOSS_K
    # small blur keeps isolated salt pixels above the intensity threshold,
    # which is what makes noise windows detectable at their edges
    blur_kernel: int = 3
    blur_sigma: float = 0.5

    def __post_init__(self) -> None:
        if min(self.border, self.diff_threshold, self.pixel_threshold, self.roi_loss_k) <= 0:
            raise ValueError("all detection parameters must be positive")

    @classmethod
    def for_resolution(cls, width: int, height: int, **overrides) -> "DetectionParams":
        """Rescale the reference border/pixel thresholds to a frame size."""
        scaled = {
            "border": max(1, round(REF_BORDER * width / REF_WIDTH)),
            "pixel_threshold": max(1, round(REF_PIXEL_THRESHOLD * width * height / REF_WIDTH**2)),
        }
        scaled.update(overrides)
        return cls(**scaled)


@dataclass(frozen=True)
class AnomalyInterval:
    """Inclusive flagged window plus per-frame diagnostics."""

    start: int
    end: int
    flags: np.ndarray        # bool, per frame
    edge_counts: np.ndarray  # int, border-ring difference count per frame
    roi_present: np.ndarray  # bool, per frame

    def __post_init__(self) -> None:
        if not (0 <= self.start <= self.end < self.flags.size):
            raise ValueError("interval out of range")
        if not (self.flags[self.start] and self.flags[self.end]):
            raise ValueError("interval endpoints must be flagged")


RoiDetector = Callable[[Frame], bool]


def _default_roi_detector(marker_cfg: MarkerDetectorConfig | None = None) -> RoiDetector:
    cfg = marker_cfg or MarkerDetectorConfig()
    return lambda frame: detect_marker(frame, cfg).present


def scan_frames(
    clip: VideoClip,
    params: DetectionParams,
    roi_detector: RoiDetector | None = None,
) -> tuple[np.ndarray, np.ndarray]:
    """Per-frame (edge difference counts, marker presence) against frame 0."""
    roi = roi_detector or _default_roi_detector()
    mask = make_edge_mask(clip.width, clip.height, params.border)
    baseline = gaussian_blur(to_grayscale(clip.frames[0]), params.blur_kernel, params.blur_sigma)
    counts = np.zeros(len(clip), dtype=np.int64)
    present = np.zeros(len(clip), dtype=bool)
    for i, frame in enumerate(clip.frames):
        blurred = gaussian_blur(to_grayscale(frame), params.blur_kernel, params.blur_sigma)
        counts[i] = abs_diff_count(blurred, baseline, mask, params.diff_threshold)
        present[i] = roi(frame)
    return counts, present


def detect_anomaly(
    clip: VideoClip,
    params: DetectionParams | None = None,
    roi_detector: RoiDetector | None = None,
) -> AnomalyInterval | None:
    """Flag anomalous frames and return the spanning interval, or None."""
    if len(clip) < 2:
        raise ValueError("need at least two frames")
    params = params or DetectionParams.for_resolution(clip.width, clip.height)
    counts, present = scan_frames(clip, params, roi_detector)

    flags = counts > params.pixel_threshold
    run = 0
    for i in range(len(clip)):
        run = 0 if present[i] else run + 1
        if run == params.roi_loss_k:
            flags[i - params.roi_loss_k + 1 : i + 1] = True
        elif run > params.roi_loss_k:
            flags[i] = True

    flagged = np.nonzero(flags)[0]
    if flagged.size == 0:
        return None
    return AnomalyInterval(int(flagged[0]), int(flagged[-1]), flags, counts, present)


def segment_clip(clip: VideoClip, interval: AnomalyInterval) -> tuple[VideoClip, VideoClip]:
    """Split into the clean parts before and after the flagged window."""
    if interval.end >= len(clip):
        raise ValueError("interval exceeds clip")
    if interval.start == 0 or interval.end == len(clip) - 1:
        raise ValueError("no clean context on one side of the anomaly")
    clip_a = VideoClip(clip.frames[: interval.start], clip.fps)
    clip_b = VideoClip(clip.frames[interval.end + 1 :], clip.fps)
    return clip_a, clip_b


def write_diagnostics_csv(interval_like, path) -> None:
    """CSV schema: frame,edge_diff_count,roi_present,flagged."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["frame", "edge_diff_count", "roi_present", "flagged"])
        for i in range(interval_like.flags.size):
            w.writerow(
                [
                    i,
                    int(interval_like.edge_counts[i]),
                    int(interval_like.roi_present[i]),
                    int(interval_like.flags[i]),
                ]
            )
