import json

import numpy as np
import pytest

import tracenorm as tn


def test_version_matches_package():
    assert tn.version() == tn.__version__ == "0.1.0"


def test_square_mesh_counts():
    hier = tn.MeshHierarchy(tn.make_geometry("square"))
    hier.refine_to(2)
    mesh = hier.mesh(2)
    assert mesh.dim == 2
    assert mesh.num_vertices == mesh.num_elements == 16
    assert mesh.h == pytest.approx(0.25)
    assert mesh.total_measure == pytest.approx(4.0)
    assert mesh.vertices.shape == (16, 2)
    assert mesh.elements.shape == (16, 2)


def test_mesh_text_round_trip():
    mesh = tn.make_geometry("lshape")
    back = tn.read_mesh(mesh.to_text())
    np.testing.assert_array_equal(back.vertices, mesh.vertices)
    np.testing.assert_array_equal(back.elements, mesh.elements)


def test_gram_matrices():
    hier = tn.MeshHierarchy(tn.make_geometry("square"))
    hier.refine_to(2)
    M = tn.mass_matrix(hier, 2)
    S = tn.slobodeckij_matrix(hier, 2)
    A = tn.h_half_matrix(hier, 2)
    one = np.ones(M.shape[0])
    assert one @ M @ one == pytest.approx(4.0)
    assert np.abs(S @ one).max() < 1e-10
    np.testing.assert_allclose(A, M + S, atol=1e-14)
    assert np.linalg.eigvalsh(A).min() > 0


def test_primal_statement_report():
    study = tn.LocalizationStudy("square")
    r = study.run("thm32", 2)
    assert r.statement == "thm32"
    assert 0 < r.lambda_min <= r.lambda_max
    assert r.dim == r.ambient_dim - r.constraints
    assert "contrast" in r.extras


def test_cube_rejects_oblique_projector():
    assert "cor33-oblique" not in tn.supported_statements(3)
    with pytest.raises(ValueError):
        tn.run_config("geometry = cube\nlevels = 0\nstatements = cor33-oblique\n")


def test_run_config_manifest():
    code, text = tn.run_config("geometry = square\nlevels = 2..3\nstatements = thm32\noracle_checks = no\n")
    manifest = json.loads(text)
    assert code == manifest["exit_code"] == 0
    rows = manifest["runs"][0]["reports"]
    assert [row["level"] for row in rows] == [2, 3]


def test_unknown_geometry():
    with pytest.raises(ValueError):
        tn.make_geometry("dodecahedron")
