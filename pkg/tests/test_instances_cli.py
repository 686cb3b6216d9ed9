"""Tests for the instance file format and the command-line interface."""

import json
import subprocess
import sys

import numpy as np
import pytest
from hypothesis import given, strategies as st

from interlacing import instances
from interlacing.cli import main, run
from interlacing.errors import ParseError, SchemaError
from interlacing.generators import (
    isotropic_covariances,
    parseval_frame,
    random_specs,
    weaver_instance,
    zero_diagonal_hermitian,
)
from interlacing.hermitian import rank1
from interlacing.mixedchar import brute_force_expected_charpoly, covariance, mixed_charpoly
from interlacing.instances import Instance

seeds = st.integers(0, 2**32 - 1)
finite = st.floats(allow_nan=False, allow_infinity=False)


def write(tmp_path, inst, name="inst.json"):
    path = tmp_path / name
    instances.save(inst, path)
    return str(path)


def random_vectors_instance(specs):
    return Instance("random_vectors", [(s.values, s.probs) for s in specs])


class TestRoundTrip:
    @given(st.lists(st.lists(st.tuples(finite, finite), min_size=2, max_size=2), min_size=1, max_size=4))
    def test_vectors_bit_exact(self, rows):
        arr = np.array([[complex(a, b) for a, b in row] for row in rows])
        inst = Instance("vectors", arr)
        assert instances.parse(instances.emit(inst)) == inst

    @given(seeds)
    def test_all_kinds(self, seed):
        rng = np.random.default_rng(seed)
        specs = random_specs(rng, 3, 2)
        cases = [
            Instance("vectors", np.array(parseval_frame(rng, 4, 2))),
            Instance("matrix", zero_diagonal_hermitian(rng, 3)),
            Instance("covariances", isotropic_covariances(rng, 3, 2)),
            random_vectors_instance(specs),
        ]
        for inst in cases:
            back = instances.parse(instances.emit(inst))
            assert back == inst
            assert instances.emit(back) == instances.emit(inst)

    def test_file_round_trip(self, tmp_path, rng):
        inst = Instance("matrix", zero_diagonal_hermitian(rng, 4))
        assert instances.load(write(tmp_path, inst)) == inst

    def test_specs_renormalized(self):
        doc = {"schema_version": "1", "kind": "random_vectors",
               "payload": {"random_vectors": [{"values": [[[1, 0]], [[0, 1]]], "probs": [0.5, 0.5 + 1e-10]}]}}
        spec = instances.from_dict(doc).specs()[0]
        assert spec.probs.sum() == pytest.approx(1.0, abs=1e-15)


class TestSchemaErrors:
    def base(self, **over):
        doc = {"schema_version": "1", "kind": "vectors", "payload": {"vectors": [[[1, 0], [0, 0]]]}}
        doc.update(over)
        return doc

    def test_valid_base(self):
        assert instances.from_dict(self.base()).kind == "vectors"

    @pytest.mark.parametrize("over", [
        {"schema_version": "2"},
        {"kind": "tensor"},
        {"payload": {"matrix": []}},
        {"payload": {"vectors": [[1, 0]]}},
        {"payload": {"vectors": [[[1, 0]], [[1, 0], [0, 1]]]}},
        {"kind": "matrix", "payload": {"matrix": [[[1, 0], [0, 0]]]}},
        {"kind": "covariances", "payload": {"covariances": []}},
        {"kind": "random_vectors", "payload": {"random_vectors": [{"values": [[[1, 0]]], "probs": [0.9]}]}},
        {"kind": "random_vectors", "payload": {"random_vectors": [{"values": [[[1, 0]]]}]}},
    ])
    def test_rejects(self, over):
        with pytest.raises(SchemaError):
            instances.from_dict(self.base(**over))

    def test_not_object(self):
        with pytest.raises(SchemaError):
            instances.from_dict([1, 2])

    def test_bad_json(self):
        with pytest.raises(ParseError):
            instances.parse("{not json")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ParseError):
            instances.load(tmp_path / "absent.json")


class TestCli:
    def test_mixed_charpoly(self, tmp_path, rng):
        specs = random_specs(rng, 3, 2)
        csv = tmp_path / "mu.csv"
        code, rep = run(["mixed-charpoly", write(tmp_path, random_vectors_instance(specs)), "--csv", str(csv)])
        assert code == 0
        names = {c["name"] for c in rep["checks"]}
        assert names == {"real-rooted", "oracle-agreement"}
        ref = brute_force_expected_charpoly(specs)
        np.testing.assert_allclose(rep["achieved"], ref.coeffs, atol=1e-9 * ref.scale())
        assert np.loadtxt(csv, delimiter=",").shape[0] >= 3

    def test_mixed_charpoly_covariances(self, tmp_path):
        inst = Instance("covariances", [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
        code, rep = run(["mixed-charpoly", write(tmp_path, inst)])
        assert code == 0
        np.testing.assert_allclose(rep["achieved"], [1, -2, 1])

    def test_partition(self, tmp_path, rng):
        inst = Instance("vectors", np.array(parseval_frame(rng, 9, 3)))
        code, rep = run(["partition", write(tmp_path, inst), "--r", "3"])
        assert code == 0
        assert len(rep["details"]["parts"]) == 3
        assert max(rep["achieved"]) <= rep["certified_bound"] + 1e-8

    def test_partition_non_isotropic(self, tmp_path, rng):
        inst = Instance("vectors", 0.8 * np.array(parseval_frame(rng, 5, 2)))
        code, rep = run(["partition", write(tmp_path, inst)])
        assert code == 0
        assert rep["certified_bound"] is None and rep["warnings"]

    def test_weaver(self, tmp_path, rng):
        inst = Instance("vectors", np.array(weaver_instance(rng, 18, 2)))
        code, rep = run(["weaver", write(tmp_path, inst)])
        assert code == 0
        assert rep["certified_bound"] == pytest.approx(16)

    def test_weaver_vacuous(self, tmp_path):
        inst = Instance("vectors", np.array([[1.0, 0.0], [0.0, 1.0]] * 4))
        code, rep = run(["weaver", write(tmp_path, inst), "--eta", "4"])
        assert code == 0
        assert rep["details"]["vacuous"]

    def test_weaver_precondition(self, tmp_path):
        inst = Instance("vectors", np.array([[2.0, 0.0]]))
        code, rep = run(["weaver", write(tmp_path, inst)])
        assert code == 3 and rep["error"] == "NormTooLarge"

    def test_pave(self, tmp_path, rng):
        inst = Instance("matrix", zero_diagonal_hermitian(rng, 6))
        code, rep = run(["pave", write(tmp_path, inst), "--r", "3"])
        assert code == 0
        assert rep["details"]["vacuous"]
        assert len(rep["achieved"]) == rep["details"]["n_parts"] <= 9
        assert any("asymptotic" in w for w in rep["warnings"])

    def test_pave_nonzero_diagonal(self, tmp_path):
        code, rep = run(["pave", write(tmp_path, Instance("matrix", np.eye(2)))])
        assert code == 3 and rep["error"] == "NonzeroDiagonal"

    def test_barrier_trace_basis(self, tmp_path):
        inst = Instance("covariances", [rank1(np.eye(3)[i]) for i in range(3)])
        code, rep = run(["barrier-trace", write(tmp_path, inst), "--eps", "1"])
        assert code == 0
        assert rep["certified_bound"] == pytest.approx(4)
        assert rep["achieved"][0] == pytest.approx(1)
        assert len(rep["details"]["steps"]) == 4

    def test_barrier_trace_random(self, tmp_path, rng):
        inst = Instance("covariances", isotropic_covariances(rng, 4, 3))
        code, rep = run(["barrier-trace", write(tmp_path, inst)])
        assert code == 0 and all(c["pass"] for c in rep["checks"])

    def test_barrier_hypothesis(self, tmp_path):
        inst = Instance("covariances", [np.eye(2) / 3])
        code, rep = run(["barrier-trace", write(tmp_path, inst)])
        assert code == 3 and rep["error"] == "HypothesisViolated"

    @pytest.mark.parametrize("suite", ["identities", "tree", "oracle", "stability"])
    def test_verify_suites(self, suite):
        code, rep = run(["verify", "--suite", suite, "--seed", "42"])
        assert code == 0, rep
        assert rep["checks"]

    def test_verify_tree_nodes(self):
        code, rep = run(["verify", "--suite", "tree"])
        assert code == 0 and rep["details"]["nodes_checked"] == 7

    def test_verify_oracle_deviation(self, tmp_path, rng):
        inst = random_vectors_instance(random_specs(rng, 4, 3))
        code, rep = run(["verify", write(tmp_path, inst), "--suite", "oracle"])
        assert code == 0 and rep["achieved"][0] <= 1e-9

    def test_unknown_suite(self):
        code, rep = run(["verify", "--suite", "nope"])
        assert code == 2 and rep["error"] == "UnknownSuite"

    def test_parse_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text("{oops")
        code, rep = run(["pave", str(path)])
        assert code == 2 and rep["error"] == "ParseError"

    def test_schema_error(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"schema_version": "1", "kind": "matrix", "payload": {}}))
        assert run(["pave", str(path)])[0] == 2

    def test_wrong_kind(self, tmp_path, rng):
        inst = Instance("vectors", np.array(parseval_frame(rng, 3, 2)))
        assert run(["pave", write(tmp_path, inst)])[0] == 2

    def test_failed_check_exit(self, tmp_path, rng):
        specs = random_specs(rng, 3, 2)
        code, rep = run(["mixed-charpoly", write(tmp_path, random_vectors_instance(specs)), "--tol", "-1"])
        assert code == 4
        assert not all(c["pass"] for c in rep["checks"])

    def test_digest_stable(self, tmp_path, rng):
        path = write(tmp_path, Instance("covariances", isotropic_covariances(rng, 3, 2)))
        a = run(["mixed-charpoly", path])[1]["inputs_digest"]
        b = run(["mixed-charpoly", path])[1]["inputs_digest"]
        c = run(["barrier-trace", path])[1]["inputs_digest"]
        assert a == b != c

    def test_main_prints_json(self, tmp_path, capsys):
        inst = Instance("covariances", [np.eye(2)])
        assert main(["mixed-charpoly", write(tmp_path, inst)]) == 0
        out = json.loads(capsys.readouterr().out)
        assert out["command"] == "mixed-charpoly"
        assert set(out) >= {"inputs_digest", "certified_bound", "achieved", "checks", "warnings"}

    def test_console_entry(self, tmp_path):
        inst = Instance("covariances", [np.eye(2) / 2, np.eye(2) / 2])
        proc = subprocess.run(
            [sys.executable, "-m", "interlacing.cli", "mixed-charpoly", write(tmp_path, inst)],
            capture_output=True, text=True, check=False,
        )
        assert proc.returncode == 0, proc.stderr
        mu = mixed_charpoly([np.eye(2) / 2] * 2)
        np.testing.assert_allclose(json.loads(proc.stdout)["achieved"], mu.coeffs)

    def test_oracle_matches_covariances(self, tmp_path, rng):
        specs = random_specs(rng, 2, 2)
        covs = Instance("covariances", [covariance(s) for s in specs])
        a = run(["mixed-charpoly", write(tmp_path, covs, "c.json")])[1]["achieved"]
        b = run(["mixed-charpoly", write(tmp_path, random_vectors_instance(specs), "r.json")])[1]["achieved"]
        np.testing.assert_allclose(a, b, atol=1e-12)
