import json

import numpy as np
import pytest

from hermetic import cli

SQ2 = 1 / np.sqrt(2)


def q(label, dim):
    return [{"label": label, "dim": dim}]


def k(label, *v):
    return {"layout": q(label, len(v)), "vector": list(v)}


def write(tmp_path, name, doc):
    p = tmp_path / name
    p.write_text(json.dumps(doc), encoding="utf-8")
    return p


def run(capsys, *argv):
    code = cli.main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, (json.loads(out.out) if out.out.strip() else None), out.err


def mix_doc(gram):
    return {"kind": "mix", "descriptors": [k("S", 1, 0), k("S", 0, 1)], "amplitudes": [1, 1], "gram": gram}


def test_mix_all_ones(tmp_path, capsys):
    code, out, _ = run(capsys, "run", write(tmp_path, "m.json", mix_doc([[1, 1], [1, 1]])))
    assert code == 0
    assert out["classification"]["kind"] == "Indistinguishable"
    assert abs(out["purity"] - 1) < 1e-12
    assert len(out["schmidt_coefficients"]) == 1


def test_mix_identity_and_overlap(tmp_path, capsys):
    doc = mix_doc([[1, 0], [0, 1]])
    doc["amplitudes"] = [0.6, 0.8]
    code, out, _ = run(capsys, "mix", write(tmp_path, "m.json", doc))
    assert out["classification"]["kind"] == "FullyDistinguishable"
    assert abs(out["purity"] - (0.36 ** 2 + 0.64 ** 2)) < 1e-12
    code, out, _ = run(capsys, "mix", write(tmp_path, "h.json", mix_doc([[1, 0.5], [0.5, 1]])))
    z = out["reduced"]["matrix"][0][1]
    assert abs(np.hypot(*z) - 0.25) < 1e-12


def test_mix_explicit_env_vectors(tmp_path, capsys):
    doc = mix_doc(None)
    del doc["gram"]
    doc["env_vectors"] = [k("M", 1, 0), k("M", [0, 1], 0)]
    code, out, _ = run(capsys, "run", write(tmp_path, "m.json", doc))
    assert code == 0 and out["classification"]["kind"] == "Indistinguishable"


@pytest.mark.parametrize("g,expected", [(1.0, 1.0), (0.0, 0.0), (0.6, 0.6)])
def test_slits(tmp_path, capsys, g, expected):
    path = write(tmp_path, "s.json", {"kind": "slits", "amplitudes": [1, 1], "gram": [[1, g], [g, 1]]})
    code, out, _ = run(capsys, "slits", path)
    assert code == 0 and abs(out["visibility"] - expected) < 1e-6
    csv = (tmp_path / "s.csv").read_bytes()
    assert csv.startswith(b"angle,intensity\n") and b"\r" not in csv
    assert out["csv"] == str(tmp_path / "s.csv")


def test_slits_csv_override(tmp_path, capsys):
    path = write(tmp_path, "s.json", {"kind": "slits", "amplitudes": [1, 1], "gram": [[1, 0], [0, 1]]})
    code, out, _ = run(capsys, "slits", path, "--csv", tmp_path / "other.csv")
    assert (tmp_path / "other.csv").exists() and not (tmp_path / "s.csv").exists()


def three_slit_doc(detector):
    return {
        "kind": "condition",
        "amplitudes": [1, 1, 1],
        "env_vectors": [k("D", 0, 1), k("D", 1, 0), k("D", 1, 0)],
        "detector": detector,
    }


def test_condition(tmp_path, capsys):
    doc = three_slit_doc(k("D", 1, 0))
    doc["slits"] = [1, 2]
    code, out, _ = run(capsys, "condition", write(tmp_path, "c.json", doc))
    assert code == 0 and abs(out["visibility"] - 1) < 1e-6
    assert abs(out["probability"] - 2 / 3) < 1e-12
    code, out, _ = run(capsys, "condition", write(tmp_path, "c1.json", three_slit_doc(k("D", 0, 1))))
    assert abs(out["purity"] - 1) < 1e-12
    assert abs(out["reduced"]["matrix"][0][0][0] - 1) < 1e-12


def test_condition_null_event_exit_3(tmp_path, capsys):
    doc = three_slit_doc(k("D", 1, 0, 0))
    doc["env_vectors"] = [k("D", 1, 0, 0), k("D", 0, 1, 0), k("D", 0, 1, 0)]
    doc["detector"] = k("D", 0, 0, 1)
    code, out, err = run(capsys, "run", write(tmp_path, "c.json", doc))
    assert code == 3 and out is None and "NullEventError" in err


def test_double_slit_env(tmp_path, capsys):
    me = [{"label": "M", "dim": 2}, {"label": "E", "dim": 2}]
    bell = {"layout": me, "vector": [SQ2, 0, 0, SQ2]}
    doc = {"kind": "double_slit_env", "weights": [0.5, 0.5], "psi1": bell, "psi2": bell}
    code, out, _ = run(capsys, "double-slit-env", write(tmp_path, "d.json", doc))
    assert code == 0 and abs(out["purity_s"] - 1) < 1e-12
    assert abs(out["coherence_norm"] - 0.25) < 1e-12
    assert abs(out["product_residual"] - 0.25) < 1e-12
    doc["psi2"] = {"layout": me, "vector": [1, 0, 0, 0]}
    code, _, err = run(capsys, "run", write(tmp_path, "bad.json", doc))
    assert code == 3 and "MismatchedMarginal" in err


def estimate_doc(mode, **extra):
    z = [k("Q", 1, 0), k("Q", 0, 1)]
    x = [k("Q", SQ2, SQ2), k("Q", SQ2, -SQ2)]
    doc = {"kind": "estimate", "mode": mode, "seed": 1, "shots": 200, "weights": [0.5, 0.5],
           "candidates": [k("Q", 1, 0), k("Q", SQ2, SQ2)], "design": [z, x]}
    doc.update(extra)
    return doc


def test_estimate(tmp_path, capsys):
    code, out, _ = run(capsys, "estimate", write(tmp_path, "b.json", estimate_doc("B", true_index=1)))
    assert code == 0 and out["max_posterior"] > 0.99 and out["frequency_check"] == []
    rows = (tmp_path / "b.csv").read_text().splitlines()
    assert rows[0] == "shot,w1,w2" and len(rows) == 202
    code, out, _ = run(capsys, "estimate", write(tmp_path, "a.json", estimate_doc("A", shots=4000)))
    assert code == 0 and all(r["within"] for r in out["frequency_check"])
    code, out, _ = run(capsys, "estimate", write(tmp_path, "d.json", estimate_doc("A", weights=[1, 0])))
    assert out["final_posterior"] == [1.0, 0.0]


def test_estimate_requires_seed(tmp_path, capsys):
    doc = estimate_doc("B")
    del doc["seed"]
    code, _, err = run(capsys, "run", write(tmp_path, "e.json", doc))
    assert code == 2 and "seed" in err


@pytest.mark.parametrize("text", ["{not json", json.dumps({"kind": "mix", "extra": 1}),
                                  json.dumps({"kind": "bogus"}), json.dumps([1, 2])])
def test_schema_errors_exit_2(tmp_path, capsys, text):
    p = tmp_path / "x.json"
    p.write_text(text)
    code, out, err = run(capsys, "run", p)
    assert code == 2 and out is None and "input error" in err


def test_unknown_field_rejected(tmp_path, capsys):
    doc = mix_doc([[1, 0], [0, 1]])
    doc["descriptors"][0]["colour"] = "red"
    code, _, _ = run(capsys, "run", write(tmp_path, "x.json", doc))
    assert code == 2


def test_missing_file_and_kind_mismatch(tmp_path, capsys):
    code, _, _ = run(capsys, "run", tmp_path / "absent.json")
    assert code == 2
    code, _, err = run(capsys, "slits", write(tmp_path, "m.json", mix_doc([[1, 0], [0, 1]])))
    assert code == 2 and "expected 'slits'" in err


def test_bad_numeric_input_exit_3(tmp_path, capsys):
    code, _, _ = run(capsys, "run", write(tmp_path, "m.json", mix_doc([[1, 2], [2, 1]])))
    assert code == 3


def test_verify_flags(tmp_path, capsys):
    out_a, out_b = tmp_path / "a.json", tmp_path / "b.json"
    assert cli.main(["verify", "--trials", "2", "--seed", "5", "--dims", "2,3", "--out", str(out_a)]) == 0
    assert cli.main(["verify", "--trials", "2", "--seed", "5", "--dims", "2,3", "--out", str(out_b)]) == 0
    assert out_a.read_bytes() == out_b.read_bytes()
    rep = json.loads(out_a.read_text())
    assert rep["dims"] == [2, 3] and rep["seed"] == 5 and rep["passed"]


def test_verify_corrupted_tolerance_exit_1(capsys):
    code, out, _ = run(capsys, "verify", "--trials", "10", "--tolerance", "1e-30")
    assert code == 1 and not out["passed"]


def test_verify_scenario_file(tmp_path, capsys):
    code, out, _ = run(capsys, "run", write(tmp_path, "v.json", {"kind": "verify", "trials": 1, "dims": [2]}))
    assert code == 0 and out["trials_per_property"] == 1


def test_every_output_revalidates(tmp_path, capsys):
    docs = [mix_doc([[1, 0.3], [0.3, 1]]),
            {"kind": "slits", "amplitudes": [1, [0, 1]], "gram": [[1, 0.2], [0.2, 1]]},
            three_slit_doc(k("D", 1, 0)),
            estimate_doc("A", shots=50)]
    for i, doc in enumerate(docs):
        code, out, _ = run(capsys, "run", write(tmp_path, f"{i}.json", doc))
        assert code == 0
        cli.validate_result(out)


def test_schema_command(capsys):
    code = cli.main(["schema", "scenario"])
    assert code == 0
    assert json.loads(capsys.readouterr().out)["title"] == "hermetic scenario file"


def test_argparse_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        cli.main(["verify", "--dims", "1"])
    assert exc.value.code == 2
