"""Command-line surface: exit codes, determinism, file round-trips."""

import json

import numpy as np
import pytest

from newton2pep import NewtonNodes, companion_pencil
from newton2pep.cli import main
from newton2pep.fileio import load_pencil, load_problem, save_problem

from helpers import random_monomial, random_newton, scalar_newton


@pytest.fixture
def qfile(tmp_path):
    rng = np.random.default_rng(0)
    q = random_newton(rng, 2, NewtonNodes(1, 2, 0.5, -1))
    path = tmp_path / "q.json"
    save_problem(path, q)
    return str(path)


@pytest.fixture
def qfile_monomial(tmp_path):
    rng = np.random.default_rng(1)
    path = tmp_path / "qm.json"
    save_problem(path, random_monomial(rng, 2))
    return str(path)


@pytest.fixture
def scalar_pair_files(tmp_path):
    rng = np.random.default_rng(2)
    p1 = tmp_path / "p1.json"
    p2 = tmp_path / "p2.json"
    save_problem(p1, random_newton(rng, 1, NewtonNodes()))
    save_problem(p2, random_newton(rng, 1, NewtonNodes()))
    return str(p1), str(p2)


def run(capsys, argv):
    code = main(argv)
    captured = capsys.readouterr()
    return code, captured.out


class TestConstruct:
    def test_companion_blocks_match_layout(self, tmp_path, qfile_monomial, capsys):
        out = tmp_path / "pencil.json"
        code, _ = run(capsys, ["construct", qfile_monomial, "--companion",
                               "--out", str(out)])
        assert code == 0
        pencil, provenance = load_pencil(out)
        q = load_problem(qfile_monomial)
        c = companion_pencil(q)
        for a, b in zip(pencil.blocks(), c.blocks()):
            np.testing.assert_array_equal(a, b)
        assert "params" in provenance and "M" in provenance

    def test_ansatz_pipeline_passes_verify(self, tmp_path, qfile, capsys):
        out = tmp_path / "pencil.json"
        code, _ = run(capsys, ["construct", qfile, "--ansatz", "1,0,0",
                               "--out", str(out)])
        assert code == 0
        code, report = run(capsys, ["verify", qfile, str(out)])
        assert code == 0
        assert "verdict: PASS" in report

    def test_general_ansatz_recovered(self, tmp_path, qfile, capsys):
        out = tmp_path / "pencil.json"
        code, report = run(capsys, ["construct", qfile, "--ansatz", "1,1,1",
                                    "--out", str(out)])
        assert code == 0
        assert "membership: member" in report

    def test_zero_ansatz_rejected_without_output(self, tmp_path, qfile, capsys):
        out = tmp_path / "pencil.json"
        code, _ = run(capsys, ["construct", qfile, "--ansatz", "0,0,0",
                               "--out", str(out)])
        assert code == 2
        assert not out.exists()

    def test_malformed_file_diagnostics(self, tmp_path, capsys):
        bad = tmp_path / "bad.json"
        bad.write_text('{"n": 1, "basis": "newton"}')
        code, _ = run(capsys, ["construct", str(bad), "--companion",
                               "--out", str(tmp_path / "p.json")])
        assert code == 2

    def test_params_as_seed(self, tmp_path, qfile, capsys):
        out = tmp_path / "pencil.json"
        code, _ = run(capsys, ["construct", qfile, "--ansatz", "2,0,0",
                               "--params", "123", "--out", str(out)])
        assert code == 0
        code, report = run(capsys, ["verify", qfile, str(out)])
        assert code == 0 and "verdict: PASS" in report

    def test_params_from_file(self, tmp_path, qfile, capsys):
        from newton2pep import E1FreeParams
        from newton2pep.fileio import params_to_dict
        rng = np.random.default_rng(8)
        params = E1FreeParams.random(2, rng)
        pfile = tmp_path / "params.json"
        pfile.write_text(json.dumps(params_to_dict(params)))
        out = tmp_path / "pencil.json"
        code, _ = run(capsys, ["construct", qfile, "--ansatz", "1,0,0",
                               "--params", str(pfile), "--out", str(out)])
        assert code == 0
        code, report = run(capsys, ["verify", qfile, str(out)])
        assert code == 0 and "verdict: PASS" in report


class TestVerify:
    def test_companion_passes_with_gamma(self, tmp_path, qfile, capsys):
        out = tmp_path / "pencil.json"
        run(capsys, ["construct", qfile, "--companion", "--out", str(out)])
        code, report = run(capsys, ["verify", qfile, str(out)])
        assert code == 0
        assert "gamma estimate:" in report
        assert "witness check: pass" in report

    def test_corrupted_pencil_fails(self, tmp_path, qfile, capsys):
        out = tmp_path / "pencil.json"
        run(capsys, ["construct", qfile, "--companion", "--out", str(out)])
        doc = json.loads(out.read_text())
        doc["blocks"]["A3"][0][0] += 1e-3
        out.write_text(json.dumps(doc))
        code, report = run(capsys, ["verify", qfile, str(out)])
        assert code == 1
        assert "verdict: FAIL" in report

    def test_too_few_samples_is_usage_error(self, tmp_path, qfile, capsys):
        out = tmp_path / "pencil.json"
        run(capsys, ["construct", qfile, "--companion", "--out", str(out)])
        code, _ = run(capsys, ["verify", qfile, str(out), "--samples", "3"])
        assert code == 2

    def test_node_mismatch_is_usage_error(self, tmp_path, qfile, capsys):
        out = tmp_path / "pencil.json"
        run(capsys, ["construct", qfile, "--companion", "--out", str(out)])
        other = tmp_path / "other.json"
        rng = np.random.default_rng(3)
        save_problem(other, random_newton(rng, 2, NewtonNodes(9, 9, 9, 9)))
        code, _ = run(capsys, ["verify", str(other), str(out)])
        assert code == 2

    def test_degenerate_determinant_is_inconclusive(self, tmp_path, capsys):
        # Every coefficient shares a zero column, so det Q vanishes
        # identically and the ratio check has nothing to compare against.
        rng = np.random.default_rng(5)
        from newton2pep import COEFF_KEYS, MatrixPoly2, complex_normal
        coeffs = {}
        for k in COEFF_KEYS:
            block = np.zeros((2, 2), dtype=complex)
            block[:, 0] = complex_normal(rng, 2)
            coeffs[k] = block
        q = MatrixPoly2.newton(coeffs, NewtonNodes())
        qpath = tmp_path / "deg.json"
        save_problem(qpath, q)
        out = tmp_path / "pencil.json"
        code, _ = run(capsys, ["construct", str(qpath), "--companion",
                               "--out", str(out)])
        assert code == 0
        code, _ = run(capsys, ["verify", str(qpath), str(out)])
        assert code == 3


class TestDelta:
    def test_companion_pair_singular_verdict(self, scalar_pair_files, capsys):
        p1, p2 = scalar_pair_files
        code, report = run(capsys, ["delta", p1, p2, "--check-singular"])
        assert code == 0
        assert "singular: yes" in report
        assert "structural zero pattern: yes" in report

    def test_node_mismatch_rejected(self, tmp_path, scalar_pair_files, capsys):
        p1, _ = scalar_pair_files
        rng = np.random.default_rng(4)
        other = tmp_path / "other.json"
        save_problem(other, random_newton(rng, 1, NewtonNodes(5, 5, 5, 5)))
        code, _ = run(capsys, ["delta", p1, str(other)])
        assert code == 2

    def test_params_file_for_both_pencils(self, tmp_path, scalar_pair_files, capsys):
        from newton2pep import E1FreeParams
        from newton2pep.fileio import params_to_dict
        p1, p2 = scalar_pair_files
        rng = np.random.default_rng(6)
        doc = {"params1": params_to_dict(E1FreeParams.random(1, rng)),
               "params2": params_to_dict(E1FreeParams.random(1, rng))}
        pfile = tmp_path / "pp.json"
        pfile.write_text(json.dumps(doc))
        code, report = run(capsys, ["delta", p1, p2, "--params", str(pfile),
                                    "--check-singular"])
        assert code == 0
        assert "singular: yes" in report

    def test_identity_delta_reported_nonsingular(self):
        # The CLI certifier itself, on an injected identity triple.
        from newton2pep import DeltaTriple, certify_singular
        eye = np.eye(9)
        cert = certify_singular(DeltaTriple(eye, eye, eye, 3, 3))
        assert not cert.is_singular


class TestSpectrum:
    def test_slice_mode_containment_table(self, tmp_path, qfile, capsys):
        out = tmp_path / "pencil.json"
        run(capsys, ["construct", qfile, "--companion", "--out", str(out)])
        csv = tmp_path / "pts.csv"
        code, report = run(capsys, ["spectrum", qfile, str(out),
                                    "--slices", "3", "--out", str(csv)])
        assert code == 0
        assert "containment: PASS" in report
        lines = csv.read_text().strip().splitlines()
        assert lines[0] == "re_lambda,im_lambda,re_mu,im_mu,residual"
        assert len(lines) > 1

    def test_pair_mode_four_rows(self, tmp_path, scalar_pair_files, capsys):
        p1, p2 = scalar_pair_files
        csv = tmp_path / "pts.csv"
        code, report = run(capsys, ["spectrum", p1, "--pair", p2,
                                    "--out", str(csv)])
        assert code == 0
        assert "count (multiplicity-aware): 4" in report
        lines = csv.read_text().strip().splitlines()
        assert len(lines) == 5  # header + 4 points

    def test_zero_slices_usage_error(self, tmp_path, qfile, capsys):
        out = tmp_path / "pencil.json"
        run(capsys, ["construct", qfile, "--companion", "--out", str(out)])
        code, _ = run(capsys, ["spectrum", qfile, str(out), "--slices", "0"])
        assert code == 2

    def test_shared_factor_pair_inconclusive(self, tmp_path, capsys):
        q = scalar_newton(1, 0, 1, 0, 0, -2)
        a = tmp_path / "a.json"
        b = tmp_path / "b.json"
        save_problem(a, q)
        save_problem(b, q)
        code, _ = run(capsys, ["spectrum", str(a), "--pair", str(b)])
        assert code == 3


class TestDeterminism:
    def test_byte_identical_reports(self, tmp_path, qfile, capsys):
        out1 = tmp_path / "pencil1.json"
        out2 = tmp_path / "pencil2.json"
        _, rep1 = run(capsys, ["construct", qfile, "--ansatz", "1,1,0",
                               "--seed", "7", "--out", str(out1)])
        _, rep2 = run(capsys, ["construct", qfile, "--ansatz", "1,1,0",
                               "--seed", "7", "--out", str(out2)])
        assert rep1.replace(str(out1), "OUT") == rep2.replace(str(out2), "OUT")
        assert out1.read_text() == out2.read_text()

        _, v1 = run(capsys, ["verify", qfile, str(out1), "--seed", "3"])
        _, v2 = run(capsys, ["verify", qfile, str(out1), "--seed", "3"])
        assert v1 == v2

    def test_env_seed_fallback(self, tmp_path, qfile, capsys, monkeypatch):
        out = tmp_path / "pencil.json"
        monkeypatch.setenv("NEWTON2PEP_SEED", "42")
        _, report = run(capsys, ["construct", qfile, "--companion",
                                 "--out", str(out)])
        assert "seed: 42" in report

    def test_roundtrip_without_loss(self, tmp_path, qfile, capsys):
        out = tmp_path / "pencil.json"
        run(capsys, ["construct", qfile, "--companion", "--out", str(out)])
        pencil, _ = load_pencil(out)
        resaved = tmp_path / "pencil2.json"
        from newton2pep.fileio import save_pencil
        save_pencil(resaved, pencil)
        again, _ = load_pencil(resaved)
        for a, b in zip(pencil.blocks(), again.blocks()):
            np.testing.assert_array_equal(a, b)
