import json

import pytest

from moravak.ahss import SpaceModel
from moravak.errors import ParseError, ValidationError
from moravak.obstruct import ManifoldData
from moravak.spacefile import parse_file, parse_module, parse_space, serialize_model

from conftest import FIXTURES


def write(tmp_path, text, name="case.space"):
    path = tmp_path / name
    path.write_text(text)
    return path


def test_all_fixtures_parse():
    for name in ("s3", "point", "rp_inf"):
        model = parse_space(FIXTURES / f"{name}.space")
        assert isinstance(model, SpaceModel)
    for name in ("synth12", "fb12", "m10", "pair12", "genspin"):
        model = parse_space(FIXTURES / f"{name}.space")
        assert isinstance(model, ManifoldData)


def test_serialize_reparse_identity(tmp_path):
    for name in ("s3", "rp_inf", "synth12", "m10", "pair12", "genspin"):
        parsed = parse_file(FIXTURES / f"{name}.space")
        doc = serialize_model(parsed)
        path = write(tmp_path, json.dumps(doc), f"{name}.json.space")
        assert serialize_model(parse_file(path)) == doc


def test_parse_errors_carry_line_numbers(tmp_path):
    path = write(tmp_path, "[generators]\nt one polynomial\n")
    with pytest.raises(ParseError) as exc:
        parse_space(path)
    assert "line 2" in str(exc.value)
    path = write(tmp_path, "stray content\n")
    with pytest.raises(ParseError) as exc:
        parse_space(path)
    assert "line 1" in str(exc.value)
    path = write(tmp_path, "[nonsense]\n")
    with pytest.raises(ParseError):
        parse_space(path)
    path = write(tmp_path, "[generators]\nt 1\n[sq]\nt t^2\n")
    with pytest.raises(ParseError):
        parse_space(path)


def test_validation_errors_name_the_axiom(tmp_path):
    path = write(tmp_path, "[generators]\nt 1\n[relations]\nt + t^2\n")
    with pytest.raises(ValidationError) as exc:
        parse_space(path)
    assert "homogeneous" in str(exc.value)
    path = write(tmp_path, """
[generators]
g 2
h 3

[sq]
g 1 g
""".strip())
    with pytest.raises(ValidationError) as exc:
        parse_space(path)
    assert "homogeneous of degree 3" in str(exc.value)


def test_comments_and_blank_lines_ignored(tmp_path):
    path = write(tmp_path, """
# leading comment
[generators]
t 1 polynomial   # trailing comment

[metadata]
cap 6            # another
""".strip())
    model = parse_space(path)
    assert model.algebra.degree_cap == 6


def test_missing_file():
    with pytest.raises(ParseError):
        parse_space("/nonexistent/nowhere.space")
    with pytest.raises(ParseError):
        parse_module("/nonexistent/nowhere.module")


def test_json_document_accepted(tmp_path):
    doc = {
        "generators": [["t", 1, "polynomial"]],
        "sq": {"t": {"1": "t^2"}},
        "metadata": {"cap": 8},
    }
    model = parse_space(write(tmp_path, json.dumps(doc)))
    assert isinstance(model, SpaceModel)
    assert model.algebra.degree_cap == 8
    with pytest.raises(ParseError):
        parse_space(write(tmp_path, "{not json"))


def test_restriction_without_boundary_rejected(tmp_path):
    path = write(tmp_path, """
[generators]
u4 4

[restriction]
u4 0

[metadata]
dimension 8
w 6 0
""".strip())
    with pytest.raises(ParseError):
        parse_space(path)


def test_module_file_errors(tmp_path):
    path = write(tmp_path, "[module]\nk 0\nrank 1\n", "m.module")
    with pytest.raises(ParseError):  # n is mandatory
        parse_module(path)
    path = write(tmp_path, "[module]\nn 2\nrank 2\ndegrees 0 6\n[operator]\n0 0\n",
                 "m2.module")
    with pytest.raises(ParseError):  # matrix must be 2x2
        parse_module(path)
    path = write(tmp_path,
                 "[module]\nn 2\ntruncation 2\nrank 1\ndegrees 0\n[operator 5]\n0\n",
                 "m3.module")
    with pytest.raises(ParseError):  # operator beyond the truncation
        parse_module(path)


def test_module_file_single_factor(tmp_path):
    path = write(tmp_path, """
[module]
n 2
k 1
rank 1
degrees 0

[operator]
1
""".strip(), "n1.module")
    mod = parse_module(path)
    assert mod.k == 1 and mod.operator == (1,)
