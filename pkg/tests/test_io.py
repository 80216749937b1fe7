import json

import numpy as np
import pytest

from scsparse import fixtures, io
from scsparse.builders import sample_clustered_points
from scsparse.errors import ClosureViolation, ParseError
from scsparse.experiments import vr_complex
from scsparse.sparsify import ProbabilityMeasure


def test_complex_round_trip(tmp_path):
    c = vr_complex(20, 2.0, 1)
    w = np.random.default_rng(0).uniform(0.1, 5, c.m(2))
    c = c.with_level(2, c.level(2), w)
    path = tmp_path / "c.txt"
    io.write_complex(c, path)
    back = io.read_complex(path)
    assert back == c
    # byte-stable
    assert io.format_complex(back) == path.read_text()


def test_unit_weight_omitted():
    text = io.format_complex(fixtures.filled_triangle())
    assert text.splitlines() == ["0 1", "0 2", "0 3", "1 1 2", "1 1 3", "1 2 3", "2 1 2 3"]


def test_comments_and_blank_lines():
    c = io.parse_complex(["# header", "", "0 1", "0 2  # trailing", "1 2 1 0.5"])
    assert c.counts == (2, 1)
    assert c.weights(1).tolist() == [0.5]


def test_duplicate_vertex_line_named(tmp_path):
    path = tmp_path / "bad.txt"
    path.write_text("0 1\n0 3\n2 1 1 3\n")
    with pytest.raises(ParseError, match=r"bad.txt:3: .*vertex 1 repeated"):
        io.read_complex(path)


@pytest.mark.parametrize("line", ["x 1 2", "1 1", "1 1 2 3 4", "1 1 2 heavy"])
def test_parse_errors(line):
    with pytest.raises(ParseError, match=":1:|^1:|line"):
        io.parse_complex([line], path="f")


def test_conflicting_weights():
    with pytest.raises(ParseError):
        io.parse_complex(["0 1", "0 2", "1 1 2 2.0", "1 2 1 3.0"])


def test_closure_error_mentions_file():
    with pytest.raises(ClosureViolation, match="f.txt"):
        io.parse_complex(["0 1", "1 1 2"], path="f.txt")


def test_points_round_trip(tmp_path):
    pc = sample_clustered_points(10, 3.0, 4)
    io.write_points(pc, tmp_path / "p.csv")
    back = io.read_points(tmp_path / "p.csv")
    np.testing.assert_array_equal(back.points, pc.points)


def test_hyperedges(tmp_path):
    path = tmp_path / "h.txt"
    path.write_text("1 2 3\n# skip\n4,5\n")
    assert io.read_hyperedges(path) == [[1, 2, 3], [4, 5]]
    path.write_text("1 a\n")
    with pytest.raises(ParseError):
        io.read_hyperedges(path)


def test_vectors_and_measure_round_trip(tmp_path):
    c = fixtures.figure_one()
    p = np.array([0.25, 0.75])
    csv_path, json_path = io.write_vectors(tmp_path / "out", c, 1, {"r": np.array([1.0, 3.0]), "p": p}, {"method": "x"})
    meta = json.loads(json_path.read_text())
    assert meta["simplices"] == [[1, 2, 3], [1, 3, 4]]
    assert meta["method"] == "x"
    for path in (csv_path, json_path):
        np.testing.assert_array_equal(io.read_measure(path, 2).probs, p)
    with pytest.raises(ParseError):
        io.read_measure(json_path, 3)


def test_reals_round_trip_exactly():
    for x in (0.1, 1 / 3, 1e-300, 123456789.123456789):
        assert float(io.format_real(x)) == x


def test_write_json_numpy(tmp_path):
    io.write_json(tmp_path / "a.json", {"a": np.float64(0.5), "b": np.arange(3), "c": np.int64(2)})
    assert json.loads((tmp_path / "a.json").read_text()) == {"a": 0.5, "b": [0, 1, 2], "c": 2}
