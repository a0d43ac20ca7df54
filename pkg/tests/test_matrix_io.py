import json

import numpy as np
import pytest

from sdc_engine.matrix_io import (
    MatrixSetFile,
    dump_matrix_set,
    dump_structure_tensor,
    load_family,
    parse_matrix_set,
    parse_structure_tensor,
    read_matrix_set,
    read_structure_tensor,
    write_matrix_set,
    write_transform,
)
from sdc_engine.shared.errors import MatrixFileError, NotSymmetricError


def matrix_set_text(**overrides) -> str:
    doc = {
        "format": "sdc-matrix-set",
        "version": 1,
        "n": 2,
        "m": 1,
        "matrices": [[[[1, 0], [0, 0]], [[0, 0], [1, 0]]]],
    }
    doc.update(overrides)
    return json.dumps(doc)


class TestCanonicalFiles:
    @pytest.mark.parametrize(
        "name", ["complex_needed.json", "kernel_deficit.json", "not_symmetric.json"]
    )
    def test_matrix_set_rewrite_is_identical(self, data_dir, name):
        text = (data_dir / name).read_text(encoding="utf-8")
        assert dump_matrix_set(parse_matrix_set(text)) == text

    @pytest.mark.parametrize(
        "name", ["diagonal_tensor.json", "embedded_deficit_tensor.json", "noncommutative_tensor.json"]
    )
    def test_tensor_rewrite_is_identical(self, data_dir, name):
        path = data_dir / name
        assert dump_structure_tensor(read_structure_tensor(path)) == path.read_text(encoding="utf-8")

    def test_written_floats_survive_exactly(self, tmp_path):
        rng = np.random.default_rng(0)
        g = rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3))
        stack = np.stack([g + g.T, -1e-300 * (g + g.T)])
        path = tmp_path / "family.json"
        write_matrix_set(path, stack, {"name": "random"})
        first = path.read_text(encoding="utf-8")
        np.testing.assert_array_equal(read_matrix_set(path).to_array(), stack)
        write_matrix_set(path, read_matrix_set(path))
        assert path.read_text(encoding="utf-8") == first

    def test_negative_zero_is_written_as_zero(self):
        model = MatrixSetFile.from_array(np.array([[[complex(-0.0, -0.0)]]]))
        assert "-0" not in dump_matrix_set(model)


class TestLoadFamily:
    def test_golden_family(self, cfg, data_dir, complex_needed):
        pencil, model = load_family(data_dir / "complex_needed.json", cfg)
        assert model.metadata.name == "complex-needed"
        np.testing.assert_allclose(pencil.matrices, np.stack(complex_needed))

    def test_asymmetric_family(self, cfg, data_dir):
        with pytest.raises(NotSymmetricError) as excinfo:
            load_family(data_dir / "not_symmetric.json", cfg)
        assert excinfo.value.index == 2

    def test_missing_file(self, cfg, tmp_path):
        with pytest.raises(MatrixFileError, match="cannot read"):
            load_family(tmp_path / "absent.json", cfg)


class TestValidation:
    def test_bad_json_reports_line(self):
        with pytest.raises(MatrixFileError) as excinfo:
            parse_matrix_set('{\n  "n": 2,\n  "m": \n}', source="broken.json")
        assert excinfo.value.location == "broken.json:4"

    def test_declared_count_mismatch(self):
        with pytest.raises(MatrixFileError, match="declared m=2"):
            parse_matrix_set(matrix_set_text(m=2))

    def test_row_length_mismatch(self):
        text = matrix_set_text(matrices=[[[[1, 0], [0, 0]], [[0, 0]]]])
        with pytest.raises(MatrixFileError, match="row 2"):
            parse_matrix_set(text)

    def test_entry_must_be_pair(self):
        text = matrix_set_text(matrices=[[[[1, 0, 0], [0, 0]], [[0, 0], [1, 0]]]])
        with pytest.raises(MatrixFileError) as excinfo:
            parse_matrix_set(text, source="f.json")
        assert "matrices[0][0][0]" in str(excinfo.value)

    def test_wrong_format_tag(self):
        with pytest.raises(MatrixFileError, match="format"):
            parse_matrix_set(matrix_set_text(format="something-else"))

    def test_non_finite_entries(self):
        text = matrix_set_text().replace("[[1, 0]", "[[Infinity, 0]", 1)
        with pytest.raises(MatrixFileError):
            parse_matrix_set(text)

    def test_unknown_field(self):
        with pytest.raises(MatrixFileError):
            parse_matrix_set(matrix_set_text(comment="hi"))

    def test_tensor_shape(self):
        with pytest.raises(MatrixFileError):
            parse_structure_tensor(
                json.dumps({"format": "sdc-structure-tensor", "version": 1, "n": 2, "entries": [[[[0, 0]]]]})
            )


class TestTransformFile:
    def test_layout(self, tmp_path):
        path = tmp_path / "transform.json"
        P = np.array([[1, 1j], [0, 2]])
        diagonals = np.stack([np.diag([1.0, 2.0]), np.diag([3j, 0.0])])
        write_transform(path, P, diagonals, source="in.json")
        model = read_matrix_set(path)
        assert model.metadata.role == "transform"
        assert model.m == 3
        np.testing.assert_array_equal(model.to_array()[0], P)
        np.testing.assert_array_equal(model.to_array()[2], diagonals[1])
