"""Target images: the magnitude patterns a search tries to reproduce.

A target is a non-negative real 2D array. Before a search it is
energy-normalized so the total power ``sum(mag^2)`` equals the pixel count;
with a unitary transform pair, that puts targets on the same energy scale as a
unit-magnitude modulator aperture, so error values are comparable across
resolutions and images.

Two deterministic synthetic targets are built in: a textured stand-in with a
natural-image-like falling amplitude spectrum, and a three-bar resolution
chart. Both depend only on the requested size.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Fixed generator seed for the synthetic texture; part of what makes builtin
# targets reproducible byte-for-byte across runs and machines.
_TEXTURE_SEED = 8062436
SYNTHETIC_MANDRILL = "synthetic-mandrill"
SYNTHETIC_BARS = "synthetic-bars"
SYNTHETIC_NAMES = (SYNTHETIC_MANDRILL, SYNTHETIC_BARS)


@dataclass(frozen=True)
class TargetImage:
    """Immutable wrapper around a validated magnitude pattern."""

    mag: np.ndarray

    def __post_init__(self):
        arr = np.array(self.mag, dtype=np.float64, order="C")
        if arr.ndim != 2:
            raise ValueError(f"target must be 2D, got {arr.ndim}D")
        if arr.shape[0] < 2 or arr.shape[1] < 2:
            raise ValueError(f"target must be at least 2x2, got {arr.shape[0]}x{arr.shape[1]}")
        if not np.all(np.isfinite(arr)):
            raise ValueError("target contains non-finite values")
        if np.any(arr < 0):
            raise ValueError("target magnitudes must be non-negative")
        arr.setflags(write=False)
        object.__setattr__(self, "mag", arr)

    @property
    def shape(self) -> tuple[int, int]:
        return self.mag.shape

    @property
    def height(self) -> int:
        return self.mag.shape[0]

    @property
    def width(self) -> int:
        return self.mag.shape[1]

    @property
    def energy(self) -> float:
        flat = self.mag.ravel()
        return float(flat @ flat)


def normalize_energy(img: TargetImage) -> TargetImage:
    """Scale so total power equals the pixel count: sum(mag^2) == Nx*Ny.

    Raises ValueError on an all-zero image (no finite scale exists).
    """
    e = img.energy
    if e == 0.0:
        raise ValueError("cannot energy-normalize an all-zero target")
    return TargetImage(img.mag * np.sqrt(img.mag.size / e))


def induce_symmetry(img: TargetImage) -> TargetImage:
    """Pointwise max of the image and its 180-degree rotation.

    The result equals its own rotation, which matters for binary-phase
    devices: their replay fields are conjugate-symmetric, so only targets with
    this symmetry are reachable. Idempotent; never darkens a pixel.
    """
    return TargetImage(np.maximum(img.mag, img.mag[::-1, ::-1]))


def resample_nearest(img: TargetImage, height: int, width: int) -> TargetImage:
    """Nearest-neighbor resample to (height, width).

    Source pixel for output index i along an axis is ``i * src // dst``
    (exact integer arithmetic): replication on integer upscale, top-left
    block pixel on integer downscale. Same-size input is returned unchanged.
    """
    if height < 2 or width < 2:
        raise ValueError(f"resample size must be at least 2x2, got {height}x{width}")
    if (height, width) == img.shape:
        return img
    ys = np.arange(height) * img.height // height
    xs = np.arange(width) * img.width // width
    return TargetImage(img.mag[np.ix_(ys, xs)])


def synthetic_mandrill(size: int) -> TargetImage:
    """Deterministic textured target with natural-photograph statistics.

    Spectral synthesis: a random-phase spectrum with amplitude ~ 1/f**1.2
    (the falling spectrum of natural scenes), inverse-transformed, min-max
    scaled, given a mild contrast stretch so shadows and highlights actually
    saturate, then decoded from display gamma (2.2) to linear magnitudes.
    Spans fine detail, smooth regions, and a photograph-like intensity
    histogram without shipping a photograph.
    """
    if size < 2:
        raise ValueError(f"size must be >= 2, got {size}")
    rng = np.random.default_rng(np.random.SeedSequence(_TEXTURE_SEED))
    fy = np.fft.fftfreq(size)[:, None]
    fx = np.fft.fftfreq(size)[None, :]
    f = np.hypot(fy, fx)
    amp = (f + 1.0 / size) ** -1.2
    amp[0, 0] = 0.0  # flat offset added back by the [0, 1] rescale
    spec = amp * np.exp(2j * np.pi * rng.random((size, size)))
    tex = np.fft.ifft2(spec).real
    lo, hi = tex.min(), tex.max()
    tex = (tex - lo) / (hi - lo)
    tex = np.clip(1.3 * (tex - 0.5) + 0.5, 0.0, 1.0) ** 2.2
    return TargetImage(tex)


def synthetic_bars(size: int) -> TargetImage:
    """Deterministic resolution chart: paired three-bar groups at halving scales.

    Bright bars (1.0) on a dark field, one vertical and one horizontal group
    per scale, laid out along the diagonal like a bar-target chart. Purely
    arithmetic; no randomness.
    """
    if size < 2:
        raise ValueError(f"size must be >= 2, got {size}")
    img = np.zeros((size, size))
    w = max(size // 16, 1)  # finest chart: bar width, halved each group
    oy = ox = max(size // 32, 1)
    while w >= 1 and oy + 5 * w <= size:
        length = 5 * w
        for k in range(3):  # vertical bars
            x0 = ox + 2 * k * w
            if x0 + w <= size:
                img[oy:oy + length, x0:x0 + w] = 1.0
        hy = oy + length + w
        for k in range(3):  # horizontal bars
            y0 = hy + 2 * k * w
            if y0 + w <= size and ox + length <= size:
                img[y0:y0 + w, ox:ox + length] = 1.0
        step = length + 6 * w
        oy += step
        ox += step
        w //= 2
    if not img.any():  # grids too small for the layout still get a pattern
        img[: size // 2, : max(size // 4, 1)] = 1.0
    return TargetImage(img)


def synthetic_target(name: str, size: int) -> TargetImage:
    """Look up a builtin synthetic target by name."""
    if name == SYNTHETIC_MANDRILL:
        return synthetic_mandrill(size)
    if name == SYNTHETIC_BARS:
        return synthetic_bars(size)
    raise ValueError(f"unknown synthetic target {name!r}; builtins: {', '.join(SYNTHETIC_NAMES)}")
