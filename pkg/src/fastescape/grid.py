"""Grid classification, PPM rendering and the A(S) boundary mask."""

from __future__ import annotations

import colorsys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .engine import CapacityError, Classification, Classifier, ClassifierConfig, Semigroup, Verdict

MAX_CELLS = 10**8
_ROWS_PER_BLOCK = 16


@dataclass(frozen=True)
class Window:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("window needs re_min < re_max and im_min < im_max")

    @classmethod
    def centered(cls, z: complex, half_width: float, half_height: float | None = None) -> Window:
        h = half_width if half_height is None else half_height
        return cls(z.real - half_width, z.real + half_width, z.imag - h, z.imag + h)

    def pixel_center(self, i: int, j: int, nx: int, ny: int) -> complex:
        """Center of pixel column ``i``, row ``j``; row 0 is the top edge ``im_max``."""
        dx = (self.re_max - self.re_min) / nx
        dy = (self.im_max - self.im_min) / ny
        return complex(self.re_min + (i + 0.5) * dx, self.im_max - (j + 0.5) * dy)

    def rows(self, j0: int, j1: int, nx: int, ny: int) -> np.ndarray:
        """Row-major pixel centers for rows ``j0..j1-1``."""
        dx = (self.re_max - self.re_min) / nx
        dy = (self.im_max - self.im_min) / ny
        re = self.re_min + (np.arange(nx) + 0.5) * dx
        im = self.im_max - (np.arange(j0, j1) + 0.5) * dy
        return (re[None, :] + 1j * im[:, None]).ravel()


@dataclass(frozen=True)
class ClassifiedGrid:
    nx: int
    ny: int
    cells: tuple[Classification, ...]
    window: Window
    cfg: ClassifierConfig

    def __post_init__(self):
        if len(self.cells) != self.nx * self.ny:
            raise ValueError("cell count does not match grid size")

    def cell(self, i: int, j: int) -> Classification:
        return self.cells[j * self.nx + i]

    def fast_mask(self) -> np.ndarray:
        return np.array([c.is_fast for c in self.cells], dtype=bool).reshape(self.ny, self.nx)


# worker processes hold one classifier each
_worker: Classifier | None = None


def _init_worker(classifier: Classifier) -> None:
    global _worker
    _worker = classifier


def _classify_block(args) -> list[Classification]:
    window, j0, j1, nx, ny = args
    return _worker.classify(window.rows(j0, j1, nx, ny))


def classify_grid(
    S: Semigroup,
    window: Window,
    nx: int,
    ny: int,
    cfg: ClassifierConfig,
    workers: int = 1,
    classifier: Classifier | None = None,
) -> ClassifiedGrid:
    """Classify every pixel center; blocks of rows may go to worker processes.

    Tables are built once up front, and each cell is classified independently
    of its neighbours, so the result does not depend on ``workers``.
    """
    if nx < 1 or ny < 1:
        raise ValueError("grid dimensions must be positive")
    if nx * ny > MAX_CELLS:
        raise CapacityError(f"{nx}x{ny} grid exceeds {MAX_CELLS} cells")
    clf = classifier or Classifier(S, cfg)
    blocks = [(window, j, min(j + _ROWS_PER_BLOCK, ny), nx, ny) for j in range(0, ny, _ROWS_PER_BLOCK)]
    cells: list[Classification] = []
    if workers <= 1 or len(blocks) == 1:
        for b in blocks:
            cells.extend(clf.classify(window.rows(*b[1:])))
    else:
        with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(clf,)) as pool:
            for part in pool.map(_classify_block, blocks):
                cells.extend(part)
    return ClassifiedGrid(nx, ny, tuple(cells), window, cfg)


@dataclass(frozen=True)
class PaletteSpec:
    """Colors per verdict.

    FastEscaping level ``L`` gets the fully saturated HSV hue
    ``hue_low + (hue_high - hue_low) * (L + L_max) / (2 L_max)``, so the
    lowest level is blue and the highest red by default (``hue_low`` when
    ``L_max = 0``).  Channels are rounded to the nearest integer.
    """

    non: tuple[int, int, int] = (0, 0, 0)
    esc: tuple[int, int, int] = (255, 255, 255)
    hue_low: float = 2 / 3
    hue_high: float = 0.0

    def fast(self, level: int, max_level: int) -> tuple[int, int, int]:
        t = 0.0 if max_level == 0 else (level + max_level) / (2 * max_level)
        r, g, b = colorsys.hsv_to_rgb(self.hue_low + (self.hue_high - self.hue_low) * t, 1.0, 1.0)
        return round(r * 255), round(g * 255), round(b * 255)

    def color(self, c: Classification, max_level: int) -> tuple[int, int, int]:
        if c.verdict is Verdict.FAST:
            return self.fast(c.level, max_level)
        return self.esc if c.verdict is Verdict.ESC else self.non


DEFAULT_PALETTE = PaletteSpec()


def ppm_bytes(nx: int, ny: int, rgb: np.ndarray) -> bytes:
    return f"P6\n{nx} {ny}\n255\n".encode("ascii") + np.asarray(rgb, dtype=np.uint8).tobytes()


def render(grid: ClassifiedGrid, palette: PaletteSpec = DEFAULT_PALETTE) -> bytes:
    lut: dict = {}
    rgb = np.empty((len(grid.cells), 3), dtype=np.uint8)
    for k, c in enumerate(grid.cells):
        key = (c.verdict, c.level)
        if key not in lut:
            lut[key] = palette.color(c, grid.cfg.max_level)
        rgb[k] = lut[key]
    return ppm_bytes(grid.nx, grid.ny, rgb)


@dataclass(frozen=True)
class BoundaryMask:
    nx: int
    ny: int
    bits: tuple[bool, ...]

    def count(self) -> int:
        return sum(self.bits)

    def array(self) -> np.ndarray:
        return np.array(self.bits, dtype=bool).reshape(self.ny, self.nx)

    def render(self) -> bytes:
        """Boundary cells white on black."""
        v = np.where(np.array(self.bits, dtype=bool), 255, 0).astype(np.uint8)
        return ppm_bytes(self.nx, self.ny, np.repeat(v, 3))


def boundary_of(member: np.ndarray) -> np.ndarray:
    """Cells whose value differs from an existing 4-neighbour."""
    m = np.asarray(member, dtype=bool)
    out = np.zeros_like(m)
    h = m[:, 1:] != m[:, :-1]
    v = m[1:, :] != m[:-1, :]
    out[:, 1:] |= h
    out[:, :-1] |= h
    out[1:, :] |= v
    out[:-1, :] |= v
    return out


def extract_boundary(grid: ClassifiedGrid) -> BoundaryMask:
    bits = boundary_of(grid.fast_mask())
    return BoundaryMask(grid.nx, grid.ny, tuple(bool(b) for b in bits.ravel()))


def dump_lines(grid: ClassifiedGrid) -> list[str]:
    out = []
    for j in range(grid.ny):
        for i in range(grid.nx):
            c = grid.cell(i, j)
            lvl = "-" if c.level is None else str(c.level)
            out.append(f"{i}\t{j}\t{c.verdict.value}\t{lvl}\t{c.margin_log:.6f}")
    return out
