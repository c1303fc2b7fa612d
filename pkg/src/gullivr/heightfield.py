"""Regular-grid terrain: sampling, smoothing, ray intersection and file I/O."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field as dc_field
from pathlib import Path

import numpy as np

from gullivr import kernels
from gullivr.errors import DomainError

SCHEMA_VERSION = 1
RAY_TOL = 1e-9
# Absorbs round-off when a query lands on the rim after a float transform.
EDGE_TOL = 1e-9


@dataclass(frozen=True)
class HeightField:
    """Heights on a regular grid; ``heights[i, j]`` sits at ``origin + (i, j) * cell_size``.

    The x axis runs along the first array index, z along the second.
    """

    origin: tuple[float, float]
    cell_size: float
    heights: np.ndarray = dc_field(repr=False)

    def __post_init__(self):
        h = np.array(self.heights, dtype=np.float64, order="C")
        if h.ndim != 2:
            raise DomainError(f"heights must be a 2D grid, got shape {h.shape}")
        if h.shape[0] < 2 or h.shape[1] < 2:
            raise DomainError(f"grid needs at least 2x2 nodes, got {h.shape[0]}x{h.shape[1]}")
        if not (self.cell_size > 0 and math.isfinite(self.cell_size)):
            raise DomainError(f"cell_size must be positive, got {self.cell_size}")
        if not np.all(np.isfinite(h)):
            raise DomainError("heights must all be finite")
        h.setflags(write=False)
        object.__setattr__(self, "heights", h)
        object.__setattr__(self, "origin", (float(self.origin[0]), float(self.origin[1])))
        object.__setattr__(self, "cell_size", float(self.cell_size))

    @property
    def nx(self) -> int:
        return self.heights.shape[0]

    @property
    def nz(self) -> int:
        return self.heights.shape[1]

    @property
    def x_max(self) -> float:
        return self.origin[0] + (self.nx - 1) * self.cell_size

    @property
    def z_max(self) -> float:
        return self.origin[1] + (self.nz - 1) * self.cell_size

    def contains(self, x: float, z: float, margin: float = 0.0) -> bool:
        tol = EDGE_TOL * max(1.0, self.cell_size)
        return (self.origin[0] + margin - tol <= x <= self.x_max - margin + tol
                and self.origin[1] + margin - tol <= z <= self.z_max - margin + tol)

    def __eq__(self, other):
        if not isinstance(other, HeightField):
            return NotImplemented
        return (self.origin == other.origin and self.cell_size == other.cell_size
                and np.array_equal(self.heights, other.heights))

    __hash__ = None


def check_inside(field: HeightField, x: float, z: float) -> None:
    if not field.contains(x, z):
        raise DomainError(
            f"point (x={x:.9g}, z={z:.9g}) lies outside the heightfield "
            f"[{field.origin[0]:.9g}, {field.x_max:.9g}] x [{field.origin[1]:.9g}, {field.z_max:.9g}]"
        )


def sample_height(field: HeightField, x: float, z: float) -> float:
    """Bilinearly interpolated terrain height at ``(x, z)``."""
    check_inside(field, x, z)
    return kernels.bilinear(field.heights, field.origin[0], field.origin[1], field.cell_size, x, z)


def smoothing_kernel(radius: float, cell_size: float, kind: str = "gaussian") -> np.ndarray:
    """1D kernel weights (unnormalized) for a smoothing pass of spatial ``radius``.

    gaussian: sigma = radius / 2, truncated at 3 sigma.
    box: uniform weights over ``radius``.
    """
    if radius < 0 or not math.isfinite(radius):
        raise DomainError(f"smoothing radius must be >= 0, got {radius}")
    if kind == "gaussian":
        if radius == 0:
            return np.ones(1)
        sigma = radius / 2.0
        half = int(math.floor(3.0 * sigma / cell_size + 1e-9))
        if half == 0:
            return np.ones(1)
        d = np.arange(-half, half + 1) * cell_size
        return np.exp(-(d * d) / (2.0 * sigma * sigma))
    if kind == "box":
        half = int(math.floor(radius / cell_size + 1e-9))
        return np.ones(2 * half + 1)
    raise DomainError(f"unknown smoothing kind {kind!r} (expected 'gaussian' or 'box')")


def smooth(field: HeightField, radius: float, kind: str = "gaussian") -> HeightField:
    """Convolve the heights with a gaussian or box kernel of spatial ``radius``.

    Weights are renormalized where the kernel overhangs the grid edge.
    """
    w = smoothing_kernel(radius, field.cell_size, kind)
    if len(w) == 1:
        return HeightField(field.origin, field.cell_size, field.heights.copy())
    return HeightField(field.origin, field.cell_size, kernels.convolve(field.heights, w))


def smoothed_height(field: HeightField, x: float, z: float, radius: float,
                    kind: str = "gaussian") -> float:
    """``sample_height(smooth(field, radius, kind), x, z)`` evaluated locally."""
    check_inside(field, x, z)
    w = smoothing_kernel(radius, field.cell_size, kind)
    return kernels.smoothed_at(field.heights, field.origin[0], field.origin[1],
                               field.cell_size, x, z, w)


def _clip_interval(o, d, lo, hi, s0, s1):
    if d == 0.0:
        return (s0, s1) if lo <= o <= hi else (1.0, 0.0)
    a, b = (lo - o) / d, (hi - o) / d
    if a > b:
        a, b = b, a
    return max(s0, a), min(s1, b)


def raycast(field: HeightField, origin, direction) -> tuple[float, float, float] | None:
    """First point where the ray ``origin + s * direction`` (s >= 0) meets the terrain.

    Marches in steps of half a cell and refines by bisection. Returns None
    when the ray leaves the grid without touching the ground.
    """
    ox, oy, oz = (float(v) for v in origin)
    dx, dy, dz = (float(v) for v in direction)
    n = math.sqrt(dx * dx + dy * dy + dz * dz)
    if n == 0.0 or not math.isfinite(n):
        raise DomainError("ray direction must be a non-zero finite vector")
    dx, dy, dz = dx / n, dy / n, dz / n

    tol = EDGE_TOL * max(1.0, field.cell_size)
    s0, s1 = 0.0, math.inf
    s0, s1 = _clip_interval(ox, dx, field.origin[0] - tol, field.x_max + tol, s0, s1)
    s0, s1 = _clip_interval(oz, dz, field.origin[1] - tol, field.z_max + tol, s0, s1)
    if s0 > s1:
        return None

    hmin = float(field.heights.min())
    hmax = float(field.heights.max())
    if dy < 0.0:
        s0 = max(s0, (hmax - oy) / dy)
        s1 = min(s1, (hmin - oy) / dy)
    elif oy + dy * s0 > hmax:
        return None
    if s0 > s1:
        return None
    if not math.isfinite(s1):
        # vertical or level ray that never leaves the grid: only a start below ground counts
        gap = oy + dy * s0 - kernels.bilinear(field.heights, field.origin[0], field.origin[1],
                                              field.cell_size, ox + dx * s0, oz + dz * s0)
        if gap > 0.0:
            return None
        s1 = s0

    s = kernels.march_ray(field.heights, field.origin[0], field.origin[1], field.cell_size,
                          ox, oy, oz, dx, dy, dz, s0, s1, field.cell_size / 2.0, RAY_TOL)
    if math.isnan(s):
        return None
    return (ox + dx * s, oy + dy * s, oz + dz * s)


def value_noise(seed: int, nx: int, nz: int, cell_size: float, amplitude: float,
                wavelength: float, origin=(0.0, 0.0), octaves: int = 1) -> HeightField:
    """Procedural terrain from seeded value noise (smoothstep-blended random lattice).

    Each extra octave halves the wavelength and the amplitude.
    """
    if wavelength <= 0:
        raise DomainError(f"wavelength must be positive, got {wavelength}")
    rng = np.random.default_rng(seed)
    xs = np.arange(nx) * cell_size
    zs = np.arange(nz) * cell_size
    heights = np.zeros((nx, nz))
    amp, wl = float(amplitude), float(wavelength)
    for _ in range(max(1, octaves)):
        lx = int(math.ceil(xs[-1] / wl)) + 2
        lz = int(math.ceil(zs[-1] / wl)) + 2
        lattice = rng.uniform(-1.0, 1.0, size=(lx, lz))
        tx, tz = xs / wl, zs / wl
        ix, iz = np.floor(tx).astype(int), np.floor(tz).astype(int)
        fx, fz = tx - ix, tz - iz
        sx = fx * fx * (3.0 - 2.0 * fx)
        sz = fz * fz * (3.0 - 2.0 * fz)
        a = lattice[np.ix_(ix, iz)]
        b = lattice[np.ix_(ix + 1, iz)]
        c = lattice[np.ix_(ix, iz + 1)]
        d = lattice[np.ix_(ix + 1, iz + 1)]
        sx_, sz_ = sx[:, None], sz[None, :]
        heights += amp * ((a * (1 - sx_) + b * sx_) * (1 - sz_) + (c * (1 - sx_) + d * sx_) * sz_)
        amp, wl = amp / 2.0, wl / 2.0
    return HeightField(origin, cell_size, heights)


def to_dict(field: HeightField) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "origin": list(field.origin),
        "cell_size": field.cell_size,
        "nx": field.nx,
        "nz": field.nz,
        "heights": [float(v) for v in field.heights.ravel(order="C")],
    }


def from_dict(doc: dict) -> HeightField:
    """Parse the heightfield document; heights are a flat list, x-major (row = fixed x)."""
    try:
        nx, nz = int(doc["nx"]), int(doc["nz"])
        heights = np.asarray(doc["heights"], dtype=np.float64)
        origin = doc["origin"]
        cell = float(doc["cell_size"])
    except (KeyError, TypeError, ValueError) as exc:
        raise DomainError(f"malformed heightfield document: {exc}") from exc
    if heights.size != nx * nz:
        raise DomainError(f"heightfield lists {heights.size} heights, header says {nx}x{nz}")
    return HeightField((origin[0], origin[1]), cell, heights.reshape(nx, nz))


def save(field: HeightField, path) -> None:
    Path(path).write_text(json.dumps(to_dict(field)) + "\n", encoding="utf-8")


def load(path) -> HeightField:
    with open(path, encoding="utf-8") as f:
        return from_dict(json.load(f))
