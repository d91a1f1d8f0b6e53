import json
import subprocess
import sys

import pytest

from lpkit.cli import main

COMMANDS = [
    ["check-kernel", "poisson:beta=1", "--alpha", "0.5"],
    ["norm"],
    ["calderon"],
    ["equivalence"],
    ["stromberg"],
    ["dilation"],
    ["corpus", "--family", "random_bandlimited"],
]


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, (out.read_bytes() if out.exists() else b"")


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0])
def test_command_succeeds_with_common_fields(argv, tmp_path):
    code, raw = run(argv, tmp_path)
    assert code == 0
    doc = json.loads(raw)
    assert doc["format_version"] == 1 and doc["command"] == argv[0]
    assert doc["passed"] is True and doc["exit_code"] == 0
    assert list(doc) == sorted(doc)


@pytest.mark.parametrize("argv", COMMANDS, ids=lambda a: a[0])
def test_reruns_are_byte_identical(argv, tmp_path):
    _, a = run(argv, tmp_path)
    _, b = run(argv, tmp_path)
    assert a == b and a


def test_check_kernel_failures(tmp_path):
    code, raw = run(["check-kernel", "zero"], tmp_path)
    assert code == 1
    doc = json.loads(raw)
    conds = doc["result"]["conditions"]
    assert not conds["C2"]["passed"] and not doc["result"]["certificate"]
    assert run(["check-kernel", "gaussd:kappa=0", "--alpha", "1"], tmp_path)[0] == 1


def test_usage_errors(tmp_path, capsys):
    assert main(["check-kernel", "nosuch"]) == 2
    assert main(["norm", "--p", "-1"]) == 2
    assert "norm.p" in capsys.readouterr().err
    assert main(["norm", "--scales", "3..1"]) == 2
    assert main(["norm", "--scales", "x"]) == 2
    assert main(["corpus", "--family", "nosuch"]) == 2
    assert "corpus.family" in capsys.readouterr().err
    with pytest.raises(SystemExit) as info:
        main(["nosuch"])
    assert info.value.code == 2


def test_negative_control_fails(tmp_path):
    code, raw = run(["equivalence", "--B", "gaussd:kappa=0", "--alpha", "1"], tmp_path)
    assert code == 1
    assert json.loads(raw)["result"]["spread"] > 100


def test_config_file_and_overrides(tmp_path):
    ini = tmp_path / "run.ini"
    ini.write_text("[grid]\nsamples = 2048\n[norm]\nalpha = 1\n[calderon]\nk = -3\n")
    code, raw = run(["norm", "--config", str(ini), "--q", "1"], tmp_path)
    assert code == 0
    cfg = json.loads(raw)["config"]
    assert cfg["grid"]["samples"] == "2048" and cfg["norm"]["alpha"] == "1"
    assert cfg["norm"]["q"] == "1"
    bad = tmp_path / "bad.ini"
    bad.write_text("[norm]\nnosuch = 1\n")
    assert main(["norm", "--config", str(bad)]) == 2
    bad.write_text("[nosuch]\na = 1\n")
    assert main(["norm", "--config", str(bad)]) == 2
    assert main(["norm", "--config", str(tmp_path / "missing.ini")]) == 2


def test_norm_equals_l2_norm(tmp_path):
    _, raw = run(["norm", "--alpha", "0"], tmp_path)
    res = json.loads(raw)["result"]
    assert res["value"] == pytest.approx(res["lp_norm_2"], rel=1e-10)


def test_csv_and_corpus_files(tmp_path):
    csv = tmp_path / "eq.csv"
    assert main(["equivalence", "--out", str(tmp_path / "eq.json"), "--csv", str(csv)]) == 0
    lines = csv.read_text().splitlines()
    assert lines[0] == "id,value_a,value_b,ratio" and len(lines) == 21
    d = tmp_path / "fields"
    code = main(["corpus", "--family", "gaussian", "--dir", str(d), "--format", "csv",
                 "--out", str(tmp_path / "c.json")])
    assert code == 0 and len(list(d.glob("gaussian_*.csv"))) == 4


def test_stdout_and_module_entry(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "lpkit", "dilation"], capture_output=True,
                          text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["command"] == "dilation"


def test_norm_of_stored_zero_field(tmp_path):
    from lpkit.grid import GridSpec, spatial_field
    from lpkit.io import write_field

    import numpy as np

    path = tmp_path / "zero.lpf"
    write_field(path, spatial_field(GridSpec(1, 64.0, 1024), np.zeros(1024)))
    code, raw = run(["norm", "--input", str(path)], tmp_path)
    assert code == 0 and json.loads(raw)["result"]["value"] == 0.0


def test_norm_q_infinity_is_max_of_terms(tmp_path):
    _, raw = run(["norm", "--q", "inf", "--alpha", "0.5"], tmp_path)
    res = json.loads(raw)["result"]
    assert res["value"] == max(res["per_scale"])


def test_calderon_example(tmp_path):
    code, raw = run(["calderon", "--kernel", "poisson:beta=1", "--scales", "-4..6"], tmp_path)
    doc = json.loads(raw)["result"]
    assert code == 0
    assert all(s["monotone"] and s["final_error"] < 1e-6 for s in doc["studies"])
