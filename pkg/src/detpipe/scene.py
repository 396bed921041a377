"""Ground-truth rotation trajectories and the synthetic marker renderer.

The marker is a bright disk with a darker front dot; the rotation angle is
the direction from the disk center to the dot (0 deg = +x axis, counter-
clockwise positive, y axis pointing up).  The palette is chosen so that the
disk sits just above the pose detector's luma threshold: brightness drops
lose the marker almost immediately, which keeps detected anomaly windows
tight.
"""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .video import Frame, VideoClip, _freeze


class TrajectoryLabel(enum.Enum):
    GROUND_TRUTH = "ground_truth"
    MEASURED = "measured"
    RECONSTRUCTED = "reconstructed"


@dataclass(frozen=True)
class Trajectory:
    """Per-frame rotation angles in degrees."""

    angles: np.ndarray
    fps: float
    label: TrajectoryLabel = TrajectoryLabel.GROUND_TRUTH

    def __post_init__(self) -> None:
        a = np.asarray(self.angles, dtype=np.float64)
        if a.ndim != 1 or a.size < 1:
            raise ValueError("trajectory needs at least one angle")
        if not np.all(np.isfinite(a)):
            raise ValueError("angles must be finite")
        if np.any(np.abs(a) > 180.0):
            raise ValueError("angles must lie in [-180, 180]")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        object.__setattr__(self, "angles", _freeze(a))

    def __len__(self) -> int:
        return int(self.angles.size)

    def with_label(self, label: TrajectoryLabel) -> "Trajectory":
        return Trajectory(self.angles.copy(), self.fps, label)


@dataclass(frozen=True)
class SceneConfig:
    """Renderer parameters; radii and offsets are fractions of frame width."""

    width: int = 128
    height: int = 128
    disk_radius: float = 0.35
    dot_radius: float = 0.10
    dot_offset: float = 0.22
    bg_color: tuple[int, int, int] = (10, 10, 10)
    disk_color: tuple[int, int, int] = (135, 135, 135)
    dot_color: tuple[int, int, int] = (60, 40, 160)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.width < 16 or self.height < 16:
            raise ValueError("scene must be at least 16x16")
        if self.disk_radius > 0.45:
            raise ValueError("disk radius must be <= 0.45 of width")
        if self.dot_offset + self.dot_radius >= self.disk_radius:
            raise ValueError("front dot must lie strictly inside the disk")


def gen_sinusoid(frames: int, amplitude: float, gamma: float, fps: float = 30.0) -> Trajectory:
    """angles[t] = amplitude * sin(2 pi gamma t), t = frame index from 0."""
    if frames < 1:
        raise ValueError("need at least one frame")
    if not 0.0 < amplitude <= 180.0:
        raise ValueError("amplitude must be in (0, 180]")
    t = np.arange(frames, dtype=np.float64)
    return Trajectory(amplitude * np.sin(2.0 * math.pi * gamma * t), fps)


def gen_random(
    frames: int,
    amplitude: float,
    waypoint_every: int = 30,
    seed: int = 0,
    fps: float = 30.0,
) -> Trajectory:
    """Uniform random waypoints joined by cubic smoothstep (C1 at waypoints).

    Waypoints sit at frame indices 0, waypoint_every, 2*waypoint_every, ...
    up to the first multiple covering frames-1; values are drawn uniformly
    from [-amplitude, amplitude], deterministically per seed.
    """
    if frames < 1:
        raise ValueError("need at least one frame")
    if waypoint_every < 2:
        raise ValueError("waypoint_every must be >= 2")
    if not 0.0 <= amplitude <= 180.0:
        raise ValueError("amplitude must be in [0, 180]")
    n_segments = max(1, math.ceil((frames - 1) / waypoint_every))
    rng = np.random.default_rng(seed)
    waypoints = rng.uniform(-amplitude, amplitude, n_segments + 1)

    t = np.arange(frames, dtype=np.float64)
    seg = np.minimum((t // waypoint_every).astype(int), n_segments - 1)
    u = (t - seg * waypoint_every) / waypoint_every
    smooth = u * u * (3.0 - 2.0 * u)
    angles = waypoints[seg] + (waypoints[seg + 1] - waypoints[seg]) * smooth
    return Trajectory(angles, fps)


@lru_cache(maxsize=8)
def _subpixel_grid(width: int, height: int) -> tuple[np.ndarray, np.ndarray]:
    # 2x2 supersampling: subpixel centers at pixel + {0.25, 0.75}
    xs = (np.arange(2 * width, dtype=np.float64) + 0.5) / 2.0
    ys = (np.arange(2 * height, dtype=np.float64) + 0.5) / 2.0
    return np.meshgrid(xs, ys)


def render_frame(cfg: SceneConfig, angle: float, center: tuple[float, float] | None = None) -> Frame:
    """Render the marker at `angle` degrees; optional disk-center override in pixels."""
    cx, cy = center if center is not None else (cfg.width / 2.0, cfg.height / 2.0)
    r_disk = cfg.disk_radius * cfg.width
    r_dot = cfg.dot_radius * cfg.width
    offset = cfg.dot_offset * cfg.width
    rad = math.radians(angle)
    dot_x = cx + offset * math.cos(rad)
    dot_y = cy - offset * math.sin(rad)  # image rows grow downward

    gx, gy = _subpixel_grid(cfg.width, cfg.height)
    in_disk = (gx - cx) ** 2 + (gy - cy) ** 2 <= r_disk * r_disk
    in_dot = (gx - dot_x) ** 2 + (gy - dot_y) ** 2 <= r_dot * r_dot

    colors = np.array([cfg.bg_color, cfg.disk_color, cfg.dot_color], dtype=np.float64)
    idx = np.zeros(gx.shape, dtype=np.intp)
    idx[in_disk] = 1
    idx[in_dot & in_disk] = 2
    sub = colors[idx]
    px = sub.reshape(cfg.height, 2, cfg.width, 2, 3).mean(axis=(1, 3))
    return Frame(np.clip(np.rint(px), 0, 255).astype(np.uint8))


def synth_video(cfg: SceneConfig, traj: Trajectory) -> VideoClip:
    """One rendered frame per trajectory sample; clip fps = trajectory fps."""
    frames = tuple(render_frame(cfg, a) for a in traj.angles)
    return VideoClip(frames, traj.fps)


def write_trajectory_csv(traj: Trajectory, path, present: np.ndarray | None = None) -> None:
    """CSV schema: frame,angle_deg,label; absent frames get an empty angle."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["frame", "angle_deg", "label"])
        for i, a in enumerate(traj.angles):
            if present is not None and not present[i]:
                w.writerow([i, "", traj.label.value])
            else:
                w.writerow([i, format(float(a), ".9g"), traj.label.value])


def read_trajectory_csv(path, fps: float = 30.0) -> tuple[Trajectory, np.ndarray]:
    """Inverse of write_trajectory_csv; returns (trajectory, present flags).

    The CSV carries no frame rate, so the caller supplies one (default 30).
    """
    frames: list[int] = []
    angles: list[float] = []
    present: list[bool] = []
    label = TrajectoryLabel.GROUND_TRUTH
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header[:3] != ["frame", "angle_deg", "label"]:
            raise ValueError(f"unexpected trajectory CSV header: {header}")
        for row in reader:
            frames.append(int(row[0]))
            if row[1] == "":
                angles.append(0.0)
                present.append(False)
            else:
                angles.append(float(row[1]))
                present.append(True)
            label = TrajectoryLabel(row[2])
    if frames != list(range(len(frames))):
        raise ValueError("trajectory CSV rows must cover frames 0..N-1 in order")
    return Trajectory(np.array(angles), fps, label), np.array(present, dtype=bool)
