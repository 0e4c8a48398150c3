import json
import subprocess
import sys

import pytest

from betaexp.cli import main

STAR = "poly:x^3-x^2-1:[1.4,1.5]"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_constants(capsys):
    code, out, _ = run(capsys, "constants", "--beta", STAR)
    assert code == 0
    j = json.loads(out)
    assert j["schema_version"] == 1
    assert j["constants"]["n_beta"] == 8
    assert j["constants"]["window"]["p_min"] == "7/16"


def test_table_cells(capsys):
    code, out, _ = run(capsys, "table", "--beta", STAR, "--alphabet", "01")
    j = json.loads(out)
    assert code == 0 and len(j["directions"]["omega0"]) == 7
    assert j["directions"]["omega0"][0]["word"] == "1,0,0,0"


def test_expand_freq_deterministic(capsys, tmp_path):
    args = ["expand", "freq", "--beta", "1.5", "--x", "0.7", "--p", "1/2", "--n", "1000"]
    _, a, _ = run(capsys, *args)
    _, b, _ = run(capsys, *args)
    assert a == b
    assert len(a.replace("\n", "")) == 1000
    log = tmp_path / "log.jsonl"
    code, out, _ = run(capsys, *args, "--out", str(tmp_path / "d.txt"), "--log", str(log))
    assert code == 0 and json.loads(out)["digits"] == 1000
    assert (tmp_path / "d.txt").read_text() == a
    assert log.read_text().count("\n") >= 1


@pytest.mark.parametrize("kind,extra", [("accum", ["--targets", "0.45,0.55"]), ("normal", []),
                                        ("hybrid", []), ("slowgrowth", ["--growth", "sqrt"])])
def test_expand_kinds(capsys, kind, extra):
    beta = "1.7" if kind == "normal" else "1.5"
    x = "0.05" if kind == "hybrid" else "0.7"
    code, out, _ = run(capsys, "expand", kind, "--beta", beta, "--x", x, "--n", "300", *extra)
    assert code == 0
    assert len(out.replace("\n", "")) == 300


def test_exit_codes(capsys, tmp_path):
    code, _, err = run(capsys, "expand", "freq", "--beta", "1.5", "--x", "0.7", "--p", "0.9")
    assert code == 2 and "window" in err
    code, _, _ = run(capsys, "hs", "--beta1", "1.5", "--beta2", "3/2")
    assert code == 2
    code, _, _ = run(capsys, "constants", "--beta", "1.5", "--out", str(tmp_path / "no" / "such.json"))
    assert code == 4
    with pytest.raises(SystemExit) as e:
        main(["constants", "--beta", "1.5", "--bogus"])
    assert e.value.code == 2


def test_kl_multinacci_ladder_dim(capsys):
    _, out, _ = run(capsys, "kl")
    lo, hi = json.loads(out)["beta_kl"]
    assert lo.startswith("1.78723165") and hi.startswith("1.78723165")
    _, out, _ = run(capsys, "multinacci", "-n", "3", "--length", "8")
    assert json.loads(out)["quasi_greedy_prefix"] == "11101110"
    _, out, _ = run(capsys, "ladder", "-M", "3")
    assert [r["m"] for r in json.loads(out)["rungs"]] == [1, 2, 3]
    _, out, _ = run(capsys, "dim", "-k", "1", "--beta", "2")
    assert json.loads(out)["count"] == 3


def test_delta_fibre_render(capsys, tmp_path):
    code, out, _ = run(capsys, "delta", "--beta1", STAR)
    assert code == 0 and json.loads(out)["delta_float"] >= 0.041
    code, out, _ = run(capsys, "fibre", "--beta1", STAR, "--beta2", "1.03", "--beta3", "1.04",
                       "--x", "1/3", "--y", "0", "--digits", "500")
    j = json.loads(out)
    assert code == 0 and set(j["lambda"]) <= {"+", "-"}
    code, out, _ = run(capsys, "fibre", "--beta1", STAR, "--beta2", "1.2", "--beta3", "1.04", "--x", "0")
    assert code == 2
    pgm = tmp_path / "a.pgm"
    code, out, _ = run(capsys, "render", "--beta1", STAR, "--beta2", "1.03", "--beta3", "1.04",
                       "--mode", "depth", "-n", "8", "--format", "pgm", "--out", str(pgm),
                       "--width", "32", "--height", "32")
    assert code == 0 and pgm.read_bytes().startswith(b"P5\n32 32\n255\n")
    _, a, _ = run(capsys, "render", "--beta1", STAR, "--beta2", "1.03", "--beta3", "1.04", "-n", "50", "--seed", "3")
    _, b, _ = run(capsys, "render", "--beta1", STAR, "--beta2", "1.03", "--beta3", "1.04", "-n", "50", "--seed", "3")
    assert a == b and a.startswith("x,y\n")


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "betaexp.cli", "hs", "--beta1", "1.1", "--beta2", "1.2"],
                       capture_output=True, text=True, check=False)
    assert r.returncode == 0
    assert json.loads(r.stdout)["verdict"] == "satisfied"
