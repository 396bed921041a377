"""Raster primitives and the raw .detv video container.

Frames are immutable uint8 RGB rasters.  All operations are pure functions,
so frames and clips can be shared freely across threads.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import convolve1d

MIN_DIM = 16

DETV_MAGIC = b"DETV"
DETV_VERSION = 1
# magic(4) + version(u16) + width(u16) + height(u16) + count(u32) + fps(f32)
DETV_HEADER = struct.Struct("<4sHHHIf")


class ContainerError(ValueError):
    """Base class for .detv parse/serialize failures."""


class BadMagicError(ContainerError):
    pass


class TruncatedError(ContainerError):
    pass


class DimensionError(ContainerError):
    pass


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Frame:
    """An RGB image, shape (height, width, 3), dtype uint8, row-major."""

    pixels: np.ndarray

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ValueError(f"expected (h, w, 3) pixel array, got shape {px.shape}")
        if px.shape[0] < MIN_DIM or px.shape[1] < MIN_DIM:
            raise ValueError(f"frame must be at least {MIN_DIM}x{MIN_DIM}, got {px.shape[1]}x{px.shape[0]}")
        object.__setattr__(self, "pixels", _freeze(px))

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Frame):
            return NotImplemented
        return self.pixels.shape == other.pixels.shape and bool(np.all(self.pixels == other.pixels))


@dataclass(frozen=True)
class GrayFrame:
    """Single-channel 8-bit luma image, shape (height, width)."""

    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.asarray(self.values, dtype=np.uint8)
        if v.ndim != 2:
            raise ValueError(f"expected (h, w) value array, got shape {v.shape}")
        object.__setattr__(self, "values", _freeze(v))

    @property
    def width(self) -> int:
        return self.values.shape[1]

    @property
    def height(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True)
class Mask:
    """Boolean per-pixel mask, dimensions must match the frames it is applied to."""

    bits: np.ndarray

    def __post_init__(self) -> None:
        b = np.asarray(self.bits, dtype=bool)
        if b.ndim != 2:
            raise ValueError(f"expected (h, w) bit array, got shape {b.shape}")
        object.__setattr__(self, "bits", _freeze(b))

    @property
    def width(self) -> int:
        return self.bits.shape[1]

    @property
    def height(self) -> int:
        return self.bits.shape[0]


@dataclass(frozen=True)
class VideoClip:
    """An ordered sequence of equally-sized frames plus a frame rate.

    fps must be exactly representable as an IEEE float32 for the .detv
    container round trip to be lossless.
    """

    frames: tuple[Frame, ...]
    fps: float

    def __post_init__(self) -> None:
        frames = tuple(self.frames)
        if not frames:
            raise ValueError("clip must contain at least one frame")
        if self.fps <= 0:
            raise ValueError("fps must be positive")
        w, h = frames[0].width, frames[0].height
        for i, f in enumerate(frames):
            if f.width != w or f.height != h:
                raise ValueError(f"frame {i} is {f.width}x{f.height}, expected {w}x{h}")
        object.__setattr__(self, "frames", frames)

    @property
    def width(self) -> int:
        return self.frames[0].width

    @property
    def height(self) -> int:
        return self.frames[0].height

    def __len__(self) -> int:
        return len(self.frames)


# Broadcast luma weights; fixed so grayscale output is identical everywhere.
LUMA_WEIGHTS = (0.299, 0.587, 0.114)


def to_grayscale(frame: Frame) -> GrayFrame:
    """Convert RGB to 8-bit luma: round(0.299 R + 0.587 G + 0.114 B)."""
    r, g, b = LUMA_WEIGHTS
    px = frame.pixels.astype(np.float64)
    luma = r * px[:, :, 0] + g * px[:, :, 1] + b * px[:, :, 2]
    return GrayFrame(np.clip(np.rint(luma), 0, 255).astype(np.uint8))


def gaussian_kernel(size: int, sigma: float) -> np.ndarray:
    """Normalized 1-D Gaussian kernel of odd length `size`."""
    if size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be odd and >= 1, got {size}")
    if sigma <= 0:
        raise ValueError(f"sigma must be positive, got {sigma}")
    offsets = np.arange(size) - size // 2
    k = np.exp(-(offsets.astype(np.float64) ** 2) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_blur(gray: GrayFrame, kernel: int = 5, sigma: float = 1.0) -> GrayFrame:
    """Separable Gaussian blur with edge-clamp borders; single final rounding."""
    k = gaussian_kernel(kernel, sigma)
    vals = gray.values.astype(np.float64)
    # mode="nearest" replicates the edge pixel, i.e. edge-clamp handling
    vals = convolve1d(vals, k, axis=0, mode="nearest")
    vals = convolve1d(vals, k, axis=1, mode="nearest")
    return GrayFrame(np.clip(np.rint(vals), 0, 255).astype(np.uint8))


def abs_diff_count(a: GrayFrame, b: GrayFrame, mask: Mask, threshold: int) -> int:
    """Count masked pixels whose absolute luma difference exceeds `threshold`."""
    if a.values.shape != b.values.shape or a.values.shape != mask.bits.shape:
        raise ValueError(
            f"dimension mismatch: {a.values.shape} vs {b.values.shape} vs mask {mask.bits.shape}"
        )
    diff = np.abs(a.values.astype(np.int16) - b.values.astype(np.int16))
    return int(np.count_nonzero(mask.bits & (diff > threshold)))


def make_edge_mask(width: int, height: int, border: int) -> Mask:
    """Mask that is true exactly on the ring within `border` pixels of any edge."""
    if border < 0:
        raise ValueError("border must be non-negative")
    if 2 * border >= min(width, height):
        raise ValueError(f"border {border} too large for {width}x{height} frame")
    bits = np.ones((height, width), dtype=bool)
    bits[border : height - border, border : width - border] = False
    return Mask(bits)


def write_video(clip: VideoClip) -> bytes:
    """Serialize a clip into the .detv byte layout (little-endian)."""
    if clip.width > 0xFFFF or clip.height > 0xFFFF:
        raise DimensionError(f"frame dimensions {clip.width}x{clip.height} overflow u16")
    if len(clip) > 0xFFFFFFFF:
        raise DimensionError(f"frame count {len(clip)} overflows u32")
    out = bytearray()
    out += DETV_HEADER.pack(DETV_MAGIC, DETV_VERSION, clip.width, clip.height, len(clip), clip.fps)
    for f in clip.frames:
        out += f.pixels.tobytes()
    return bytes(out)


def read_video(data: bytes) -> VideoClip:
    """Parse a .detv byte stream; failures raise distinct ContainerError types."""
    if len(data) < DETV_HEADER.size:
        raise TruncatedError(f"header needs {DETV_HEADER.size} bytes, got {len(data)}")
    magic, version, width, height, count, fps = DETV_HEADER.unpack_from(data)
    if magic != DETV_MAGIC:
        raise BadMagicError(f"bad magic {magic!r}")
    if version != DETV_VERSION:
        raise ContainerError(f"unsupported version {version}")
    if width < MIN_DIM or height < MIN_DIM or count < 1:
        raise DimensionError(f"invalid dimensions {width}x{height}x{count}")
    frame_bytes = width * height * 3
    expected = DETV_HEADER.size + count * frame_bytes
    if len(data) != expected:
        raise TruncatedError(f"expected {expected} bytes total, got {len(data)}")
    frames = []
    for i in range(count):
        start = DETV_HEADER.size + i * frame_bytes
        px = np.frombuffer(data, dtype=np.uint8, count=frame_bytes, offset=start)
        frames.append(Frame(px.reshape(height, width, 3).copy()))
    return VideoClip(tuple(frames), float(fps))


def save_video(clip: VideoClip, path) -> None:
    with open(path, "wb") as fh:
        fh.write(write_video(clip))


def load_video(path) -> VideoClip:
    with open(path, "rb") as fh:
        return read_video(fh.read())


def write_ppm(frame: Frame, path) -> None:
    """Single-frame binary PPM (P6) export for debugging."""
    with open(path, "wb") as fh:
        fh.write(b"P6\n%d %d\n255\n" % (frame.width, frame.height))
        fh.write(frame.pixels.tobytes())
