import io

import pytest

from fastescape.cli import parse_point, run_subcommand
from fastescape.config import ConfigError, parse_config


def run(argv):
    out = io.StringIO()
    code = run_subcommand(argv, out)
    return code, out.getvalue()


@pytest.fixture
def qexp_cfg(tmp_path):
    p = tmp_path / "q.cfg"
    p.write_text("# attracting basin example\ngenerator: 0.25*exp(z)\nwindow: -2 8 -3 3\ngrid: 24 16\n")
    return p


@pytest.fixture
def pair_cfg(tmp_path):
    p = tmp_path / "pair.cfg"
    p.write_text("generator: exp(z)\ngenerator: exp(-z)\nwindow: -2 2 -2 2\ngrid: 8 8\ndepth: 2\n")
    return p


class TestConfig:
    def test_defaults(self):
        rc = parse_config("generator: exp(z)\nwindow: -2 2 -2 2\ngrid: 64 64")
        assert rc.generators == ("exp(z)",)
        assert (rc.depth, rc.iters, rc.escape, rc.levels, rc.radius) == (3, 64, 1e50, 8, None)
        assert (rc.samples, rc.seed, rc.margin) == (4096, 42, 2.0)

    def test_radius(self):
        rc = parse_config("generator: exp(z)\nradius: 5.0\n")
        assert rc.radius == 5.0 and rc.classifier_config().radius == 5.0

    def test_missing_generator(self):
        with pytest.raises(ConfigError):
            parse_config("window: -2 2 -2 2\n")

    @pytest.mark.parametrize(
        "text,line",
        [
            ("generator: exp(z)\nspeed: 3\n", 2),
            ("generator: exp(z)\n\n# note\ngrid: 4\n", 4),
            ("generator: 1/z\n", 1),
            ("generator: exp(z)\nwindow: 1 0 0 1\n", 2),
            ("generator: exp(z)\ndepth: two\n", 2),
            ("generator: exp(z)\nnonsense\n", 2),
        ],
    )
    def test_errors_carry_line(self, text, line):
        with pytest.raises(ConfigError) as info:
            parse_config(text)
        assert info.value.line == line

    def test_repeatable_generator(self):
        assert len(parse_config("generator: exp(z)\ngenerator: sin(z)\n").generators) == 2


@pytest.mark.parametrize(
    "text,z",
    [("1.5-0.25i", 1.5 - 0.25j), ("0+0i", 0j), ("-2", -2 + 0j), ("3i", 3j), ("-i", -1j), ("1e-3+2i", 0.001 + 2j)],
)
def test_parse_point(text, z):
    assert parse_point(text) == z


def test_parse_point_rejects():
    with pytest.raises(ValueError):
        parse_point("1+2")


class TestCommands:
    def test_classify_basin(self, qexp_cfg):
        code, out = run(["classify", str(qexp_cfg), "--point", "0+0i"])
        assert code == 0 and out.startswith("verdict=NON level=- margin=") and out.endswith("W=3 N=64\n")

    def test_classify_bad_point(self, qexp_cfg):
        assert run(["classify", str(qexp_cfg), "--point", "abc"])[0] == 2

    def test_mm(self):
        code, out = run(["mm", "--function", "exp(z)", "--radius", "1", "--depth", "3"])
        assert code == 0
        assert out == "1\t1.000000000\n2\t2.718281828\n3\t15.154262241\n"

    def test_mm_constant(self):
        assert run(["mm", "--function", "3", "--depth", "2"])[0] == 3

    def test_mm_parse_error(self):
        assert run(["mm", "--function", "1/z", "--depth", "2"])[0] == 2

    def test_words(self):
        code, out = run(["words", "--generators", "2", "--depth", "2"])
        assert code == 0 and out.splitlines() == ["6", "[0]", "[1]", "[0,0]", "[0,1]", "[1,0]", "[1,1]"]

    def test_words_capacity(self):
        assert run(["words", "--generators", "10", "--depth", "6"])[0] == 3

    def test_usage(self):
        assert run([])[0] == 1
        assert run(["bogus"])[0] == 1
        assert run(["mm", "--depth", "x", "--function", "exp(z)"])[0] == 1

    def test_missing_config(self, tmp_path):
        assert run(["classify", str(tmp_path / "nope.cfg"), "--point", "1"])[0] == 2

    def test_render(self, qexp_cfg, tmp_path):
        out = tmp_path / "img.ppm"
        code, _ = run(["render", str(qexp_cfg), "-o", str(out), "--dump", str(tmp_path / "cells.tsv")])
        assert code == 0
        data = out.read_bytes()
        assert data.startswith(b"P6\n24 16\n255\n") and len(data) == len(b"P6\n24 16\n255\n") + 24 * 16 * 3
        edge = tmp_path / "img.edge.ppm"
        assert edge.read_bytes().startswith(b"P6\n24 16\n255\n")
        assert len((tmp_path / "cells.tsv").read_text().splitlines()) == 24 * 16

    def test_render_workers_identical(self, qexp_cfg, tmp_path):
        a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
        assert run(["render", str(qexp_cfg), "-o", str(a)])[0] == 0
        assert run(["render", str(qexp_cfg), "-o", str(b), "--workers", "2"])[0] == 0
        assert a.read_bytes() == b.read_bytes()

    def test_verify_pair(self, pair_cfg, tmp_path):
        report = tmp_path / "report.txt"
        code, out = run(["verify", str(pair_cfg), "--points", "30", "--report", str(report)])
        assert code == 0
        lines = report.read_text().splitlines()
        subset = next(line for line in lines if line.startswith("PROP subset_classical"))
        assert "applicable=0" in subset
        assert out == report.read_text()
