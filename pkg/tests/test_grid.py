import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from fastescape.engine import CapacityError, Classification, ClassifierConfig, Semigroup, Verdict
from fastescape.grid import (
    DEFAULT_PALETTE,
    ClassifiedGrid,
    Window,
    boundary_of,
    classify_grid,
    dump_lines,
    extract_boundary,
    render,
)

QEXP = Semigroup.of("0.25*exp(z)")
EXP = Semigroup.of("exp(z)")
PAIR = Semigroup.of("exp(z)", "exp(-z)")

NON = Classification(Verdict.NON, None, 1.0)
ESC = Classification(Verdict.ESC, None, -1.0)


def fast(level=0):
    return Classification(Verdict.FAST, level, 1.0)


def make_grid(cells, nx, ny, cfg=ClassifierConfig()):
    return ClassifiedGrid(nx, ny, tuple(cells), Window(0, 1, 0, 1), cfg)


class TestWindow:
    def test_corners(self):
        w = Window(-2, 8, -3, 3)
        nx, ny = 10, 6
        assert w.pixel_center(0, 0, nx, ny) == complex(-2 + 0.5, 3 - 0.5)
        assert w.pixel_center(nx - 1, ny - 1, nx, ny) == complex(8 - 0.5, -3 + 0.5)

    def test_rows_match_pixel_centers(self):
        w = Window(-1.3, 2.1, -0.7, 0.9)
        pts = w.rows(0, 5, 7, 5)
        for j in range(5):
            for i in range(7):
                assert pts[j * 7 + i] == w.pixel_center(i, j, 7, 5)

    def test_invalid(self):
        with pytest.raises(ValueError):
            Window(1, 0, 0, 1)


class TestClassifyGrid:
    def test_single_cell_basin(self):
        g = classify_grid(QEXP, Window.centered(0j, 0.1), 1, 1, ClassifierConfig())
        assert g.cells[0].verdict is Verdict.NON

    def test_two_cells(self):
        g = classify_grid(QEXP, Window(-2.5, 7.5, -1, 1), 2, 1, ClassifierConfig(radius=5.0))
        assert g.cells[0].verdict is Verdict.NON
        assert g.cells[1].verdict is Verdict.FAST and g.cells[1].level == 0

    def test_pair_all_non(self):
        g = classify_grid(PAIR, Window(-2, 2, -2, 2), 6, 5, ClassifierConfig(depth=2))
        assert all(c.verdict is Verdict.NON for c in g.cells)

    def test_capacity(self):
        with pytest.raises(CapacityError):
            classify_grid(QEXP, Window(0, 1, 0, 1), 10**4, 10**4 + 1, ClassifierConfig())

    def test_workers_do_not_change_result(self):
        cfg = ClassifierConfig(depth=2)
        w = Window(-1, 4, -2, 2)
        a = classify_grid(EXP, w, 24, 40, cfg, workers=1)
        b = classify_grid(EXP, w, 24, 40, cfg, workers=3)
        assert a.cells == b.cells
        assert render(a) == render(b)


class TestRender:
    def test_single_non(self):
        data = render(make_grid([NON], 1, 1))
        assert data == b"P6\n1 1\n255\n" + bytes([0, 0, 0])
        assert len(data) == 11 + 3

    def test_all_escaping(self):
        data = render(make_grid([ESC] * 4, 2, 2))
        assert data == b"P6\n2 2\n255\n" + bytes([255] * 12)

    def test_level_ramp(self):
        cfg = ClassifierConfig(max_level=4)
        data = render(make_grid([fast(-4), fast(4)], 2, 1, cfg))
        assert data[-6:] == bytes([0, 0, 255, 255, 0, 0])
        assert DEFAULT_PALETTE.fast(0, 0) == (0, 0, 255)

    def test_repeatable(self):
        g = classify_grid(QEXP, Window(-2, 8, -3, 3), 16, 12, ClassifierConfig(depth=1))
        assert render(g) == render(g)


class TestBoundary:
    def test_uniform(self):
        assert extract_boundary(make_grid([ESC] * 12, 4, 3)).count() == 0

    def test_half_plane(self):
        nx, ny = 6, 4
        cells = [fast() if i < 3 else NON for j in range(ny) for i in range(nx)]
        mask = extract_boundary(make_grid(cells, nx, ny)).array()
        want = np.zeros((ny, nx), dtype=bool)
        want[:, 2:4] = True
        assert np.array_equal(mask, want)

    def test_levels_do_not_matter(self):
        cells = [fast(-3), fast(2), fast(0), fast(5)]
        assert extract_boundary(make_grid(cells, 2, 2)).count() == 0

    def test_mask_render(self):
        mask = extract_boundary(make_grid([fast(), NON], 2, 1))
        assert mask.render() == b"P6\n2 1\n255\n" + bytes([255] * 6)

    def test_dump(self):
        lines = dump_lines(make_grid([fast(-2), NON], 2, 1))
        assert lines == ["0\t0\tFAST\t-2\t1.000000", "1\t0\tNON\t-\t1.000000"]


@given(arrays(bool, st.tuples(st.integers(1, 9), st.integers(1, 9))))
def test_boundary_definition_and_symmetry(m):
    b = boundary_of(m)
    ny, nx = m.shape
    for j in range(ny):
        for i in range(nx):
            nbrs = [(j + dj, i + di) for dj, di in ((0, 1), (0, -1), (1, 0), (-1, 0)) if 0 <= j + dj < ny and 0 <= i + di < nx]
            assert b[j, i] == any(m[q] != m[j, i] for q in nbrs)
            for q in nbrs:
                if m[q] != m[j, i]:
                    assert b[q] and b[j, i]
