"""Point clouds and rasters of Lambda_{b1,b2,b3}.

Rendering works in floating point: the pictures are illustrations, not
certificates.
"""

from __future__ import annotations

import itertools

import numpy as np

from .affine import AffineParams
from .errors import DomainError

BURN_IN = 100


def _floats(params: AffineParams):
    return float(params.beta1), float(params.beta2), float(params.beta3)


def chaos_game(params: AffineParams, n_points: int, seed: int = 0) -> np.ndarray:
    """n_points samples (x, y) from uniformly random map choices, after a burn-in of 100."""
    if n_points < 0:
        raise DomainError("number of points must be nonnegative")
    b1, b2, b3 = _floats(params)
    rng = np.random.default_rng(seed)
    digits = rng.integers(0, 2, size=n_points + BURN_IN) * 2 - 1
    out = np.empty((n_points, 2))
    x = y = 0.0
    for i, d in enumerate(digits.tolist()):
        # S_d(x, y) = ((x + d)/b1, (y + d)/b_d), b_{-1} = b2, b_1 = b3
        x = (x + d) / b1
        y = (y + d) / (b2 if d < 0 else b3)
        if i >= BURN_IN:
            out[i - BURN_IN] = (x, y)
    return out


def depth_points(params: AffineParams, n_digits: int) -> np.ndarray:
    """Projections of all 2^n words of length n (the midpoints of their cylinder sets)."""
    if not 0 <= n_digits <= 24:
        raise DomainError("depth must be between 0 and 24")
    b1, b2, b3 = _floats(params)
    pts = np.empty((1 << n_digits, 2))
    for k, w in enumerate(itertools.product((-1, 1), repeat=n_digits)):
        x = y = 0.0
        sx = sy = 1.0
        for d in w:
            sx /= b1
            sy /= b2 if d < 0 else b3
            x += d * sx
            y += d * sy
        pts[k] = (x, y)
    return pts


def write_csv(points: np.ndarray, path):
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write("x,y\n")
        for x, y in points.tolist():
            fh.write(f"{x:.12g},{y:.12g}\n")


def viewport(params: AffineParams) -> tuple[float, float, float, float]:
    b1, b2, b3 = _floats(params)
    rx = 1 / (b1 - 1)
    ry = 1 / (min(b2, b3) - 1)
    return -rx, rx, -ry, ry


def raster(points: np.ndarray, params: AffineParams, width: int = 512, height: int = 512) -> np.ndarray:
    """8-bit hit-count image with gamma 0.5 over the fixed viewport."""
    if width < 1 or height < 1:
        raise DomainError("image size must be positive")
    x0, x1, y0, y1 = viewport(params)
    counts, _, _ = np.histogram2d(points[:, 1], points[:, 0], bins=(height, width),
                                  range=((y0, y1), (x0, x1)))
    counts = counts[::-1]  # top row is the largest y
    top = counts.max()
    if top == 0:
        return np.zeros((height, width), dtype=np.uint8)
    img = np.round(255 * np.sqrt(counts / top))
    return img.astype(np.uint8)


def write_pgm(img: np.ndarray, path):
    h, w = img.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(img, dtype=np.uint8).tobytes())


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P5":
        raise DomainError("not a binary PGM file")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise DomainError("only 8-bit PGM files are supported")
    return np.frombuffer(parts[4][: w * h], dtype=np.uint8).reshape(h, w)


def render_attractor(params: AffineParams, mode: str = "chaos", n: int = 100_000, seed: int = 0):
    if mode == "chaos":
        return chaos_game(params, n, seed)
    if mode == "depth":
        return depth_points(params, n)
    raise DomainError(f"unknown render mode {mode!r}")


def digest(points: np.ndarray) -> str:
    """Short content hash of a point cloud, rounded like the CSV output."""
    import hashlib

    h = hashlib.sha256()
    for x, y in points.tolist():
        h.update(f"{x:.12g},{y:.12g}\n".encode("ascii"))
    return h.hexdigest()[:16]

