"""Document format and command line behaviour."""

import json
from pathlib import Path

import numpy as np
import pytest

from gaussppt.cli import main
from gaussppt.documents import DocumentError, MatrixDocument, parse_document, read_document
from gaussppt.family import FamilyParams, build_gamma
from gaussppt.phase_space import SystemShape
from gaussppt.sampling import random_ppt_covariance
from gaussppt.separability import classify

from oracles import GAMMA_9, GAMMA_9_SPECTRUM, sigma_pair

FIXTURE = Path(__file__).resolve().parents[1] / "fixtures" / "bound_entangled_2x2.json"


def write_doc(path, gamma, f_a, f_b, **kw):
    MatrixDocument(f_a, f_b, np.asarray(gamma, dtype=float), **kw).write(path)
    return str(path)


def run_json(capsys, *argv):
    code = main(["--json", *argv])
    out = capsys.readouterr()
    lines = [json.loads(line) for line in out.out.splitlines() if line.strip()]
    return code, lines, out.err


# -- documents --------------------------------------------------------------


def test_shipped_fixture_is_the_integer_example():
    doc = read_document(FIXTURE)
    assert (doc.f_a, doc.f_b) == (2, 2)
    np.testing.assert_array_equal(doc.gamma, GAMMA_9)


def test_document_round_trip_is_lossless(tmp_path, rng):
    g = random_ppt_covariance(SystemShape(1, 2), rng)
    mean = rng.normal(size=6)
    path = write_doc(tmp_path / "d.json", g, 1, 2, mean=mean, meta={"note": "x"})
    doc = read_document(path)
    np.testing.assert_array_equal(doc.gamma, g)
    np.testing.assert_array_equal(doc.mean, mean)
    assert doc.meta == {"note": "x"}


def test_round_trip_preserves_verdicts(tmp_path, rng):
    shape = SystemShape(2, 2)
    for k in range(5):
        g = random_ppt_covariance(shape, rng)
        path = write_doc(tmp_path / f"d{k}.json", g, 2, 2)
        back = read_document(path).gamma
        a, b = classify(g, shape), classify(back, shape)
        assert a.verdict == b.verdict
        assert np.array_equal(a.certificate.g_min.gamma, b.certificate.g_min.gamma)


@pytest.mark.parametrize(
    "text, fragment",
    [
        ('{"f_a": 1, "f_b": 1, "gamma": [[1, 0', "line 1"),
        ('{"f_b": 1, "gamma": []}', "'f_a'"),
        ('{"f_a": 1, "f_b": 1}', "'gamma'"),
        ('{"f_a": 0, "f_b": 1, "gamma": []}', "'f_a'"),
        ('{"f_a": 1, "f_b": 1, "gamma": [[1,0,0,0]]}', "4 rows"),
        ('{"f_a": 1, "f_b": 1, "gamma": [[1,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]]}', "gamma[0]"),
        ('{"f_a": 1, "f_b": 1, "gamma": [[1,0,0,0],[0,"a",0,0],[0,0,1,0],[0,0,0,1]]}', "gamma[1][1]"),
        ('{"f_a": 1, "f_b": 1, "gamma": [[1,0,0,0],[0,1,0,0],[0,0,1,0],[0,0,0,1]], "mean": [0]}', "'mean'"),
        ("[1, 2]", "JSON object"),
    ],
)
def test_parse_diagnostics(text, fragment):
    with pytest.raises(DocumentError) as info:
        parse_document(text)
    assert fragment in str(info.value)


# -- validate ---------------------------------------------------------------


def test_validate_example(capsys):
    code, (report,), _ = run_json(capsys, "validate", str(FIXTURE))
    assert code == 0
    assert report["verdict"] == "valid"
    assert abs(report["min_eigenvalue"]) <= 1e-9
    assert report["symmetry_residual"] == 0


def test_validate_zero_matrix(tmp_path, capsys):
    path = write_doc(tmp_path / "z.json", np.zeros((4, 4)), 1, 1)
    code, (report,), _ = run_json(capsys, "validate", path)
    assert code == 0
    assert report["verdict"] == "not_a_state"
    assert report["min_eigenvalue"] == pytest.approx(-1.0)


def test_validate_truncated_file(tmp_path, capsys):
    path = tmp_path / "t.json"
    path.write_text(FIXTURE.read_text()[:120])
    code = main(["validate", str(path)])
    err = capsys.readouterr().err
    assert code == 1
    assert "line" in err


def test_validate_missing_file(capsys):
    assert main(["validate", "/nonexistent/file.json"]) == 1


# -- classify ---------------------------------------------------------------


def test_classify_example(capsys):
    code, (report,), _ = run_json(capsys, "classify", str(FIXTURE))
    assert code == 0
    assert report["verdict"] == "bound_entangled"
    assert report["certificate"]["joint_span_dim"] == 8
    assert report["certificate"]["off_block_norm"] > 0


def test_classify_product(tmp_path, capsys):
    path = write_doc(tmp_path / "p.json", np.eye(6), 1, 2)
    code, (report,), _ = run_json(capsys, "classify", path)
    assert code == 0
    assert report["verdict"] == "separable"
    assert report["certificate"]["gamma_a"] == [[1, 0], [0, 1]]
    assert len(report["certificate"]["gamma_b"]) == 4


def test_classify_npt(tmp_path, capsys):
    c, s = 2.0, np.sqrt(3.0)
    g = [[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]]
    path = write_doc(tmp_path / "n.json", g, 1, 1)
    code, (report,), _ = run_json(capsys, "classify", path)
    assert code == 0
    assert report["verdict"] == "npt_entangled"
    v = report["certificate"]["eigenvector"]
    vec = np.array(v["re"]) + 1j * np.array(v["im"])
    twin = sigma_pair(1, 1)[1]
    assert np.real(vec.conj() @ (np.array(g) + 1j * twin) @ vec) < 0


def test_classify_trace_and_determinism(tmp_path, capsys):
    path = write_doc(tmp_path / "t.json", 2 * np.eye(4) + 0.1 * np.ones((4, 4)), 1, 1)
    _, (first,), _ = run_json(capsys, "classify", path, "--trace")
    _, (second,), _ = run_json(capsys, "classify", path, "--trace")
    assert first == second
    assert len(first["trace"]) == first["steps"] > 0
    assert {"xi", "epsilon", "null_dims_before", "null_dims_after"} <= set(first["trace"][0])
    _, (plain,), _ = run_json(capsys, "classify", path)
    assert "trace" not in plain


def test_classify_batch_with_jobs(tmp_path, capsys):
    paths = [str(FIXTURE), write_doc(tmp_path / "p.json", np.eye(6), 1, 2)]
    code, reports, _ = run_json(capsys, "classify", *paths, "--jobs", "2")
    assert code == 0
    assert [r["verdict"] for r in reports] == ["bound_entangled", "separable"]


def test_tolerance_flags_are_recorded(capsys):
    code, (report,), _ = run_json(capsys, "classify", str(FIXTURE), "--rtol", "1e-8", "--ntol", "1e-6", "--btol", "1e-5")
    assert code == 0
    assert report["tolerances"] == {"rtol": 1e-8, "ntol": 1e-6, "btol": 1e-5, "herm_tol": 1e-12}
    code, (report,), _ = run_json(capsys, "--ntol", "1e-6", "validate", str(FIXTURE))
    assert report["tolerances"]["ntol"] == 1e-6


def test_bad_tolerance_is_input_error(capsys):
    assert main(["classify", str(FIXTURE), "--rtol", "2"]) == 1


def test_report_round_trips_through_json(capsys):
    code, (report,), _ = run_json(capsys, "classify", str(FIXTURE), "--trace")
    assert json.loads(json.dumps(report)) == report


def test_human_readable_output(capsys):
    assert main(["classify", str(FIXTURE)]) == 0
    out = capsys.readouterr().out
    assert "bound_entangled" in out and "joint real span 8" in out


# -- minimize ---------------------------------------------------------------


def test_minimize_thermal(tmp_path, capsys):
    src = write_doc(tmp_path / "in.json", 2 * np.eye(4), 1, 1)
    out = tmp_path / "out.json"
    code, (report,), _ = run_json(capsys, "minimize", src, "-o", str(out))
    assert code == 0
    assert 0 < report["steps"] <= 8
    g = read_document(out).gamma
    assert np.linalg.norm(g[:2, 2:]) <= 1e-7 * np.linalg.norm(g)


def test_minimize_example_is_unchanged(tmp_path, capsys):
    out = tmp_path / "out.json"
    code, (report,), _ = run_json(capsys, "minimize", str(FIXTURE), "-o", str(out))
    assert code == 0 and report["steps"] == 0
    np.testing.assert_array_equal(read_document(out).gamma, GAMMA_9)


def test_minimize_rejects_npt(tmp_path, capsys):
    c, s = 2.0, np.sqrt(3.0)
    g = [[c, 0, s, 0], [0, c, 0, -s], [s, 0, c, 0], [0, -s, 0, c]]
    src = write_doc(tmp_path / "n.json", g, 1, 1)
    code = main(["minimize", src, "-o", str(tmp_path / "o.json")])
    assert code == 1
    assert "NotPpt" in capsys.readouterr().err


# -- generate ---------------------------------------------------------------


def test_generate_integer_example(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["generate", "1", "1", "2", "1", "1", "-o", str(out)]) == 0
    doc = read_document(out)
    np.testing.assert_array_equal(doc.gamma, GAMMA_9)
    assert doc.meta["d"] == "3"
    assert json.loads(out.read_text())["gamma"] == json.loads(FIXTURE.read_text())["gamma"]


def test_generate_rejects_boundary(tmp_path, capsys):
    assert main(["generate", "2", "1", "1", "2", "1", "-o", str(tmp_path / "g.json")]) == 1
    assert "ParamDomain" in capsys.readouterr().err


def test_generate_then_classify(tmp_path, capsys):
    out = tmp_path / "g.json"
    assert main(["generate", "1", "1", "1", "2", "1", "-o", str(out)]) == 0
    capsys.readouterr()
    code, (report,), _ = run_json(capsys, "classify", str(out))
    assert report["verdict"] == "bound_entangled"


def test_generate_classify_matches_library(tmp_path, capsys, rng):
    for k in range(50):
        while True:
            a, b, c, e, f = np.exp(rng.uniform(np.log(0.1), np.log(10), 5))
            if a < 0.999 * c * e:
                break
        out = tmp_path / f"g{k}.json"
        assert main(["generate", *(repr(float(x)) for x in (a, b, c, e, f)), "-o", str(out)]) == 0
        capsys.readouterr()
        _, (report,), _ = run_json(capsys, "classify", str(out))
        library = classify(build_gamma(FamilyParams(a, b, c, e, f)), SystemShape(2, 2))
        assert report["verdict"] == library.verdict.value == "bound_entangled"


# -- eig --------------------------------------------------------------------


def test_eig_example(capsys):
    code, (report,), _ = run_json(capsys, "eig", str(FIXTURE))
    assert code == 0
    np.testing.assert_allclose(report["eig_sigma"], GAMMA_9_SPECTRUM, atol=1e-9)
    np.testing.assert_allclose(report["eig_sigma_t"], GAMMA_9_SPECTRUM, atol=1e-9)
