"""Image catalog management and the login-time degradation transform.

Login images are shown brightened and contrast-reduced so that a casual
observer struggles to recognize them while the enrolled user, who knows
what to look for, still can. The transform is affine about mid-gray:

    out = clamp(round(alpha * (p - 128) + 128 + beta), 0, 255)

``alpha`` scales the dynamic range (contrast), ``beta`` shifts it upward
(brightness). Rounding is half-up so the scalar and vectorized paths agree
bit for bit.
"""

from __future__ import annotations

import hashlib
import io
import math
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import TooFewImages, UndecodableImage

if TYPE_CHECKING:
    from .scheme import GridSpec

DEFAULT_ALPHA = 0.5
DEFAULT_BETA = 64.0


@dataclass(frozen=True)
class DegradeParams:
    """Contrast factor ``alpha`` in (0, 1] and brightness offset ``beta`` in [0, 255]."""

    alpha: float = DEFAULT_ALPHA
    beta: float = DEFAULT_BETA

    def __post_init__(self):
        if not 0.0 < self.alpha <= 1.0:
            raise ValueError(f"alpha must be in (0, 1], got {self.alpha}")
        if not 0.0 <= self.beta <= 255.0:
            raise ValueError(f"beta must be in [0, 255], got {self.beta}")


@dataclass(frozen=True)
class ImageCatalog:
    """Immutable id -> raster map; all rasters share identical dimensions.

    ``ids`` preserves load order (sorted file names for directory loads,
    generation order for synthetic catalogs) so callers get a stable,
    deterministic sequence to lay out.
    """

    ids: tuple[str, ...]
    entries: dict[str, np.ndarray]

    def __post_init__(self):
        if not self.ids:
            raise ValueError("catalog must contain at least one image")
        dims = {self.entries[i].shape for i in self.ids}
        if len(dims) != 1:
            raise ValueError(f"catalog rasters disagree on dimensions: {dims}")

    def __len__(self) -> int:
        return len(self.ids)

    def raster(self, image_id: str) -> np.ndarray:
        return self.entries[image_id]

    @property
    def height(self) -> int:
        return self.entries[self.ids[0]].shape[0]

    @property
    def width(self) -> int:
        return self.entries[self.ids[0]].shape[1]


def degrade_pixel(p: int, params: DegradeParams) -> int:
    """Degrade a single channel value in [0, 255]."""
    if not 0 <= p <= 255:
        raise ValueError(f"channel value out of range: {p}")
    v = params.alpha * (p - 128.0) + 128.0 + params.beta
    return int(min(255.0, max(0.0, math.floor(v + 0.5))))


def degrade_image(raster: np.ndarray, params: DegradeParams) -> np.ndarray:
    """Apply :func:`degrade_pixel` to every channel of a uint8 raster."""
    v = params.alpha * (raster.astype(np.float64) - 128.0) + 128.0 + params.beta
    return np.clip(np.floor(v + 0.5), 0.0, 255.0).astype(np.uint8)


def content_id(raster: np.ndarray) -> str:
    """Stable content hash used as the image identifier."""
    h = hashlib.sha256()
    h.update(str(raster.shape).encode())
    h.update(np.ascontiguousarray(raster).tobytes())
    return h.hexdigest()[:16]


def encode_png(raster: np.ndarray) -> bytes:
    """PNG-encode a raster; identical input yields identical bytes."""
    buf = io.BytesIO()
    Image.fromarray(raster).save(buf, format="PNG")
    return buf.getvalue()


def _normalize(img: Image.Image, target_dims: tuple[int, int]) -> np.ndarray:
    """Center-crop to the target aspect ratio, then resize to target_dims."""
    tw, th = target_dims
    img = img.convert("RGB")
    w, h = img.size
    target_ratio = tw / th
    if w / h > target_ratio:
        # too wide: crop left/right
        new_w = round(h * target_ratio)
        left = (w - new_w) // 2
        img = img.crop((left, 0, left + new_w, h))
    elif w / h < target_ratio:
        new_h = round(w / target_ratio)
        top = (h - new_h) // 2
        img = img.crop((0, top, w, top + new_h))
    img = img.resize((tw, th), Image.LANCZOS)
    return np.asarray(img, dtype=np.uint8)


def load_catalog(directory: str | Path, target_dims: tuple[int, int],
                 grid: "GridSpec") -> ImageCatalog:
    """Load a directory of raster images, normalized to uniform dimensions.

    Requires at least ``grid.n_cells`` decodable images. Ids are content
    hashes of the normalized rasters, so they are independent of file names.
    """
    directory = Path(directory)
    paths = sorted(p for p in directory.iterdir() if p.is_file())
    ids: list[str] = []
    entries: dict[str, np.ndarray] = {}
    for path in paths:
        try:
            with Image.open(path) as img:
                raster = _normalize(img, target_dims)
        except (UnidentifiedImageError, OSError) as exc:
            raise UndecodableImage(f"{path}: {exc}") from exc
        iid = content_id(raster)
        if iid not in entries:
            ids.append(iid)
            entries[iid] = raster
    if len(ids) < grid.n_cells:
        raise TooFewImages(
            f"need at least {grid.n_cells} images, found {len(ids)} in {directory}"
        )
    return ImageCatalog(ids=tuple(ids), entries=entries)


# Glyph painters for the synthetic corpus. Each draws inside a bounding box;
# variety plus per-image hue keeps the rasters pairwise distinct.
def _paint_disc(d, box, color):
    d.ellipse(box, fill=color)


def _paint_ring(d, box, color):
    x0, y0, x1, y1 = box
    w = max(2, (x1 - x0) // 6)
    d.ellipse(box, outline=color, width=w)


def _paint_square(d, box, color):
    d.rectangle(box, fill=color)


def _paint_diamond(d, box, color):
    x0, y0, x1, y1 = box
    cx, cy = (x0 + x1) // 2, (y0 + y1) // 2
    d.polygon([(cx, y0), (x1, cy), (cx, y1), (x0, cy)], fill=color)


def _paint_triangle(d, box, color):
    x0, y0, x1, y1 = box
    d.polygon([((x0 + x1) // 2, y0), (x1, y1), (x0, y1)], fill=color)


def _paint_cross(d, box, color):
    x0, y0, x1, y1 = box
    t = max(2, (x1 - x0) // 4)
    cx, cy = (x0 + x1) // 2, (y0 + y1) // 2
    d.rectangle((cx - t // 2, y0, cx + t // 2, y1), fill=color)
    d.rectangle((x0, cy - t // 2, x1, cy + t // 2), fill=color)


_GLYPHS = (_paint_disc, _paint_ring, _paint_square, _paint_diamond,
           _paint_triangle, _paint_cross)


def synth_catalog(count: int, seed: int, target_dims: tuple[int, int] = (96, 96)
                  ) -> ImageCatalog:
    """Deterministic procedural test corpus: distinct background hue + glyph.

    Stands in for a hand-curated photo set; same (count, seed, dims) always
    produces byte-identical rasters and therefore identical ids.
    """
    import colorsys
    from random import Random

    from PIL import ImageDraw

    if count < 1:
        raise ValueError("count must be >= 1")
    rng = Random(seed)
    hue0 = rng.random()
    tw, th = target_dims
    ids: list[str] = []
    entries: dict[str, np.ndarray] = {}
    for i in range(count):
        hue = (hue0 + i / count) % 1.0
        bg = tuple(round(255 * v) for v in colorsys.hsv_to_rgb(hue, 0.45, 0.92))
        fg = tuple(round(255 * v) for v in
                   colorsys.hsv_to_rgb((hue + 0.5) % 1.0, 0.85, 0.55))
        img = Image.new("RGB", (tw, th), bg)
        d = ImageDraw.Draw(img)
        margin = round(min(tw, th) * (0.18 + 0.10 * rng.random()))
        box = (margin, margin, tw - 1 - margin, th - 1 - margin)
        _GLYPHS[i % len(_GLYPHS)](d, box, fg)
        # index tick marks along the bottom edge disambiguate same-glyph images
        ticks = i // len(_GLYPHS) + 1
        for t in range(ticks):
            x = 4 + t * 6
            d.rectangle((x, th - 6, x + 3, th - 3), fill=fg)
        raster = np.asarray(img, dtype=np.uint8)
        iid = content_id(raster)
        ids.append(iid)
        entries[iid] = raster
    return ImageCatalog(ids=tuple(ids), entries=entries)


def save_catalog(catalog: ImageCatalog, directory: str | Path) -> list[Path]:
    """Write every catalog image to ``directory`` as PNG, named by id."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = []
    for iid in catalog.ids:
        path = directory / f"{iid}.png"
        path.write_bytes(encode_png(catalog.raster(iid)))
        written.append(path)
    return written
