"""Deterministic corruption of clean clips with four anomaly classes.

Every injector touches only frames inside the inclusive [start, end] window
and is reproducible per seed.  Intensity ramps are anchored just outside the
window, so every window frame is already perturbed a little and detection
boundaries stay tight.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .scene import SceneConfig, Trajectory, render_frame
from .video import Frame, VideoClip


class AnomalyKind(enum.Enum):
    OCCLUSION = "occlusion"
    LIGHTING = "lighting"
    NOISE = "noise"
    OUT_OF_FRAME = "out_of_frame"


# Paper-protocol windows for 150-frame clips at 30 FPS.
DURATION_WINDOWS = {"0.5s": (68, 83), "1s": (60, 90), "1.5s": (52, 97)}


def duration_window(preset: str) -> tuple[int, int]:
    try:
        return DURATION_WINDOWS[preset]
    except KeyError:
        raise ValueError(f"unknown duration preset {preset!r}, expected one of {sorted(DURATION_WINDOWS)}")


@dataclass(frozen=True)
class AnomalySpec:
    kind: AnomalyKind
    start: int
    end: int
    seed: int = 0
    # occlusion: convex hexagon, sized to hide the whole marker when centered
    occluder_radius_frac: float = 0.45
    occluder_fill: tuple[int, int, int] = (118, 118, 118)
    # lighting: multiplicative gain ramps 1 -> floor -> 1
    brightness_floor: float = 0.15
    # noise: salt-and-pepper density ramps 0 -> peak -> 0
    noise_peak: float = 0.25
    # out-of-frame: horizontal slide distance in pixels (None = just past the edge)
    slide_px: float | None = None

    def __post_init__(self) -> None:
        if self.start < 0 or self.end < self.start:
            raise ValueError(f"invalid window ({self.start}, {self.end})")
        if not 0.0 <= self.brightness_floor <= 1.0:
            raise ValueError("brightness floor must be in [0, 1]")
        if not 0.0 < self.noise_peak <= 1.0:
            raise ValueError("noise peak must be in (0, 1]")


def _check_window(spec: AnomalySpec, clip: VideoClip) -> None:
    if spec.end >= len(clip):
        raise ValueError(f"window ({spec.start}, {spec.end}) exceeds clip length {len(clip)}")


def _ramp(spec: AnomalySpec, t: int) -> float:
    """Triangular intensity in (0, 1], anchored at zero one frame outside the window."""
    mid = (spec.start + spec.end) / 2.0
    up = (t - (spec.start - 1)) / (mid - (spec.start - 1))
    down = ((spec.end + 1) - t) / ((spec.end + 1) - mid)
    return min(up, down, 1.0)


def _hexagon_coverage(width: int, height: int, cx: float, cy: float, radius: float) -> np.ndarray:
    """Per-pixel coverage in [0, 1] of a regular hexagon, 2x2 supersampled."""
    xs = (np.arange(2 * width) + 0.5) / 2.0
    ys = (np.arange(2 * height) + 0.5) / 2.0
    gx, gy = np.meshgrid(xs, ys)
    verts = [
        (cx + radius * math.cos(math.radians(a)), cy + radius * math.sin(math.radians(a)))
        for a in range(0, 360, 60)
    ]
    inside = np.ones(gx.shape, dtype=bool)
    for (x1, y1), (x2, y2) in zip(verts, verts[1:] + verts[:1]):
        inside &= (x2 - x1) * (gy - y1) - (y2 - y1) * (gx - x1) >= 0.0
    return inside.reshape(height, 2, width, 2).mean(axis=(1, 3))


def inject_occlusion(clip: VideoClip, spec: AnomalySpec) -> VideoClip:
    """Slide an opaque hexagon left-to-right across the frame, crossing the
    center at the window midpoint, with constant speed."""
    _check_window(spec, clip)
    w, h = clip.width, clip.height
    radius = spec.occluder_radius_frac * w
    mid = (spec.start + spec.end) / 2.0
    speed = (w / 2.0 + radius) / (mid - (spec.start - 1))
    fill = np.array(spec.occluder_fill, dtype=np.float64)

    frames = list(clip.frames)
    for t in range(spec.start, spec.end + 1):
        cx = -radius + speed * (t - (spec.start - 1))
        cov = _hexagon_coverage(w, h, cx, h / 2.0, radius)[:, :, None]
        px = frames[t].pixels.astype(np.float64)
        out = cov * fill + (1.0 - cov) * px
        frames[t] = Frame(np.clip(np.rint(out), 0, 255).astype(np.uint8))
    return VideoClip(tuple(frames), clip.fps)


def inject_lighting(clip: VideoClip, spec: AnomalySpec) -> VideoClip:
    """Per-channel multiplicative darkening, gain 1 -> floor -> 1 across the window."""
    _check_window(spec, clip)
    frames = list(clip.frames)
    for t in range(spec.start, spec.end + 1):
        gain = 1.0 - (1.0 - spec.brightness_floor) * _ramp(spec, t)
        if gain == 1.0:
            continue
        out = np.clip(np.rint(frames[t].pixels.astype(np.float64) * gain), 0, 255)
        frames[t] = Frame(out.astype(np.uint8))
    return VideoClip(tuple(frames), clip.fps)


def inject_noise(clip: VideoClip, spec: AnomalySpec) -> VideoClip:
    """Salt-and-pepper: each pixel independently replaced by black or white
    (equal odds) with probability ramping 0 -> peak -> 0; seeded."""
    _check_window(spec, clip)
    rng = np.random.default_rng(spec.seed)
    h, w = clip.height, clip.width
    frames = list(clip.frames)
    for t in range(spec.start, spec.end + 1):
        density = spec.noise_peak * _ramp(spec, t)
        replace = rng.random((h, w)) < density
        white = rng.random((h, w)) < 0.5
        px = frames[t].pixels.copy()
        px[replace & white] = 255
        px[replace & ~white] = 0
        frames[t] = Frame(px)
    return VideoClip(tuple(frames), clip.fps)


def inject_out_of_frame(
    clip: VideoClip,
    spec: AnomalySpec,
    ground_truth: Trajectory,
    scene: SceneConfig | None,
) -> VideoClip:
    """Re-render window frames with the marker slid out of the right edge
    during the window's first third, held out, and returned by the end."""
    _check_window(spec, clip)
    if scene is None:
        raise ValueError("out-of-frame injection re-renders frames and needs the scene config")
    if len(ground_truth) != len(clip):
        raise ValueError("ground-truth trajectory must cover the whole clip")
    w = scene.width
    cx, cy = w / 2.0, scene.height / 2.0
    full = spec.slide_px if spec.slide_px is not None else (w - (cx - scene.disk_radius * w)) + 2.0
    third = max(1, math.ceil((spec.end - spec.start + 1) / 3))

    frames = list(clip.frames)
    for t in range(spec.start, spec.end + 1):
        phase = min((t - (spec.start - 1)) / third, ((spec.end + 1) - t) / third, 1.0)
        frames[t] = render_frame(scene, float(ground_truth.angles[t]), center=(cx + full * phase, cy))
    return VideoClip(tuple(frames), clip.fps)


def inject(
    clip: VideoClip,
    spec: AnomalySpec,
    ground_truth: Trajectory | None = None,
    scene: SceneConfig | None = None,
) -> VideoClip:
    """Dispatch on the anomaly kind."""
    if spec.kind is AnomalyKind.OCCLUSION:
        return inject_occlusion(clip, spec)
    if spec.kind is AnomalyKind.LIGHTING:
        return inject_lighting(clip, spec)
    if spec.kind is AnomalyKind.NOISE:
        return inject_noise(clip, spec)
    if spec.kind is AnomalyKind.OUT_OF_FRAME:
        if ground_truth is None:
            raise ValueError("out-of-frame injection needs the ground-truth trajectory")
        return inject_out_of_frame(clip, spec, ground_truth, scene)
    raise ValueError(f"unknown anomaly kind {spec.kind}")
