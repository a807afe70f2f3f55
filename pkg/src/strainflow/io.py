"""Image and field I/O plus colormap rendering for the CLI."""

import json

import numpy as np
from PIL import Image

# anchor colors of a perceptually ordered (viridis-like) colormap
_CMAP_ANCHORS = np.array(
    [
        [0.267004, 0.004874, 0.329415],
        [0.282623, 0.140926, 0.457517],
        [0.253935, 0.265254, 0.529983],
        [0.206756, 0.371758, 0.553117],
        [0.163625, 0.471133, 0.558148],
        [0.127568, 0.566949, 0.550556],
        [0.134692, 0.658636, 0.517649],
        [0.266941, 0.748751, 0.440573],
        [0.626579, 0.854645, 0.223353],
        [0.993248, 0.906157, 0.143936],
    ]
)


def colormap_lut():
    """256-entry RGB lookup table, linearly interpolated between anchors."""
    t = np.linspace(0.0, 1.0, 256)
    ta = np.linspace(0.0, 1.0, len(_CMAP_ANCHORS))
    lut = np.stack([np.interp(t, ta, _CMAP_ANCHORS[:, k]) for k in range(3)], axis=1)
    return (lut * 255.0 + 0.5).astype(np.uint8)


def load_image(path):
    """Load an 8/16-bit grayscale image (PNG or PGM), normalized to [0, 1]."""
    with Image.open(path) as im:
        if im.mode in ("I;16", "I;16B", "I;16L"):
            arr = np.asarray(im, dtype=np.float64) / 65535.0
        elif im.mode == "I":
            arr = np.asarray(im, dtype=np.float64) / 65535.0
        elif im.mode == "F":
            arr = np.asarray(im, dtype=np.float64)
        else:
            arr = np.asarray(im.convert("L"), dtype=np.float64) / 255.0
    if arr.ndim != 2:
        raise ValueError(f"{path}: expected a grayscale image")
    return arr


def save_gray_png(field, path):
    """Write a [0, 1] field as an 8-bit grayscale PNG."""
    arr = np.clip(np.asarray(field, dtype=np.float64), 0.0, 1.0)
    Image.fromarray((arr * 255.0 + 0.5).astype(np.uint8), mode="L").save(path)


def save_fields(path, planes, names):
    """Raw field file: one-line JSON header then little-endian float32 data.

    ``planes`` is an array of shape (n, H, W); ``names`` labels the planes.
    """
    planes = np.asarray(planes, dtype=np.float32)
    if planes.ndim == 2:
        planes = planes[None]
    n, h, w = planes.shape
    if len(names) != n:
        raise ValueError("one name per plane required")
    header = json.dumps(
        {"width": w, "height": h, "planes": n, "names": list(names)}
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("utf-8") + b"\n")
        fh.write(planes.astype("<f4").tobytes())


def load_fields(path):
    """Read a raw field file; returns (planes, names)."""
    with open(path, "rb") as fh:
        header = json.loads(fh.readline().decode("utf-8"))
        data = np.frombuffer(fh.read(), dtype="<f4")
    n, h, w = header["planes"], header["height"], header["width"]
    if data.size != n * h * w:
        raise ValueError(f"{path}: truncated field file")
    return data.reshape(n, h, w).astype(np.float64), header["names"]


def render_colormap(field, vmin, vmax, out_path, background=None, alpha=0.5):
    """Map a field linearly onto the colormap, clamp, optionally overlay.

    With ``background`` given (a [0, 1] grayscale field of the same
    shape) the colors are alpha-blended onto it.
    """
    if not vmin < vmax:
        raise ValueError("vmin must be < vmax")
    f = np.asarray(field, dtype=np.float64)
    t = np.clip((f - vmin) / (vmax - vmin), 0.0, 1.0)
    idx = (t * 255.0 + 0.5).astype(np.int64)
    rgb = colormap_lut()[idx].astype(np.float64) / 255.0
    if background is not None:
        bg = np.clip(np.asarray(background, dtype=np.float64), 0.0, 1.0)
        rgb = alpha * rgb + (1.0 - alpha) * bg[..., None]
    Image.fromarray((rgb * 255.0 + 0.5).astype(np.uint8), mode="RGB").save(out_path)
