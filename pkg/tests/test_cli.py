import json

import pytest

from dirichlet_lab import builtin_series, smooth_truncation_eval
from dirichlet_lab.cli import UsageError, _parse_complex

from _harness import run_cached, run_cli

MOMENT_ETA = [
    "moment", "--series", "eta-factor", "--sigma", "1.0", "--T", "250",
]


def test_parse_complex_forms():
    assert _parse_complex("0.75+30i") == 0.75 + 30.0j
    assert _parse_complex("1") == 1.0 + 0.0j
    assert _parse_complex("-2.5") == -2.5 + 0.0j
    assert _parse_complex("2i") == 2.0j
    assert _parse_complex("i") == 1.0j
    assert _parse_complex("+i") == 1.0j
    assert _parse_complex("-i") == -1.0j
    assert _parse_complex("1-i") == 1.0 - 1.0j
    assert _parse_complex("1+i") == 1.0 + 1.0j
    assert _parse_complex("1.5e1-2e-1i") == 15.0 - 0.2j
    for bad in ("1+2j", "abc", "", "i+1", "1++2i"):
        with pytest.raises(UsageError, match="a\\+bi"):
            _parse_complex(bad)


def test_moment_json_document():
    code, out, err = run_cached(MOMENT_ETA)
    assert code == 0 and err == ""
    doc = json.loads(out)
    assert set(doc) == {"experiment", "config", "result"}
    assert doc["experiment"] == "moment"
    cfg = doc["config"]
    assert cfg["series"] == "eta-factor"
    assert cfg["seed"] == 0 and cfg["output"] == "json"
    assert "threads" not in cfg  # outputs must not encode the worker count
    res = doc["result"]
    assert res["target"] == 2.0
    assert abs(res["estimate"] - 2.0) < 0.01


def test_outputs_identical_across_thread_counts():
    base = run_cached(MOMENT_ETA)
    for n in ("1", "4", "8"):
        got = run_cached(MOMENT_ETA + ["--threads", n])
        assert got[0] == 0
        assert got[1] == base[1]


def test_env_thread_override(monkeypatch):
    base = run_cached(MOMENT_ETA)
    monkeypatch.setenv("DLAB_THREADS", "4")
    code, out, err = run_cli(MOMENT_ETA)
    assert code == 0 and out == base[1]
    monkeypatch.setenv("DLAB_THREADS", "0")
    code, out, err = run_cli(MOMENT_ETA)
    assert code == 1
    assert err.startswith("dlab: precondition: thread count")


def test_moment_csv_shape():
    code, out, err = run_cached(MOMENT_ETA + ["--format", "csv"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "sigma,k,T,step,estimate,target,rel_error"
    cells = lines[1].split(",")
    assert float(cells[0]) == 1.0 and int(cells[1]) == 1
    doc = json.loads(run_cached(MOMENT_ETA)[1])
    assert float(cells[4]) == doc["result"]["estimate"]


def test_moment_csv_blank_cells_without_target():
    argv = [
        "moment", "--series", "divisor_2", "--sigma", "1.5", "--T", "5",
        "--step", "0.05", "--N", "500", "--format", "csv",
    ]
    code, out, _ = run_cli(argv)
    assert code == 0
    row = out.strip().split("\n")[1]
    assert row.endswith(",,")  # no known target for this series


def test_zeros_subcommand_roundtrip():
    argv = [
        "zeros", "--series", "builtin:eta-factor", "--rect", "0.5,1.5,8.5,9.5",
    ]
    code, out, err = run_cached(argv)
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["count"] == 1
    z = doc["result"]["zeros"][0]
    assert abs(z["re"] - 1.0) < 1e-9
    assert z["confirmed"] is True
    code, out, _ = run_cached(argv + ["--format", "csv"])
    lines = out.strip().split("\n")
    assert lines[0] == "re,im,residual"
    assert float(lines[1].split(",")[0]) == z["re"]


def test_density_subcommand():
    argv = [
        "density", "--series", "eta-factor", "--sigma-list", "0.9", "--T", "50",
        "--format", "csv",
    ]
    code, out, _ = run_cli(argv)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "sigma,T,count"
    assert lines[1] == "0.9,50.0,6"


def test_flow_box_subcommand():
    argv = ["flow", "--dims", "1", "--T", "100", "--box", "0,0.5"]
    code, out, _ = run_cli(argv)
    assert code == 0
    doc = json.loads(out)
    row = doc["result"]["rows"][0]
    assert row["target"] == 0.5
    assert row["error"] < 0.05
    assert "series" not in doc["config"]
    code, out, _ = run_cli(argv + ["--format", "csv"])
    assert out.split("\n")[0] == "t-horizon,estimate,target,error"


def test_flow_argument_conflicts():
    code, _, err = run_cli(["flow", "--T", "100"])
    assert code == 64 and "dlab: usage:" in err
    code, _, err = run_cli(
        ["flow", "--T", "100", "--box", "0,0.5", "--suite", "standard"]
    )
    assert code == 64 and "mutually exclusive" in err
    code, _, err = run_cli(["flow", "--dims", "2", "--T", "100", "--box", "0,0.5"])
    assert code == 64 and "one lo,hi pair per dimension" in err


def test_recur_json_only():
    argv = [
        "recur", "--series", "eta-factor", "--s0", "1+0i", "--r", "0.05",
        "--T", "5", "--t-step", "0.01",
    ]
    code, out, _ = run_cached(argv)
    assert code == 0
    doc = json.loads(out)
    assert doc["result"]["hits"] == []  # first ladder period lies above T=5
    assert doc["result"]["lower_bound_rate"] == 0.0
    assert doc["config"]["s0"] == {"re": 1.0, "im": 0.0}
    code, _, err = run_cached(argv + ["--format", "csv"])
    assert code == 64
    assert "recur emits JSON only" in err


def test_mollify_subcommand():
    argv = [
        "mollify", "--series", "zeta", "--sigma", "0.75", "--X-list", "10,100",
        "--N", "10000", "--format", "csv",
    ]
    code, out, _ = run_cli(argv)
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "X,tail"
    x0, tail0 = lines[1].split(",")
    x1, tail1 = lines[2].split(",")
    assert (int(x0), int(x1)) == (10, 100)
    assert float(tail1) < float(tail0)


def test_truncate_subcommand():
    argv = ["truncate", "--series", "zeta", "--s", "1.5", "--k", "2", "--M", "1000"]
    code, out, _ = run_cli(argv + ["--format", "csv"])
    assert code == 0
    lines = out.strip().split("\n")
    assert lines[0] == "re,im,tail_bound"
    re_s, im_s, bound_s = lines[1].split(",")
    want, want_bound = smooth_truncation_eval(
        builtin_series("zeta"), 1.5 + 0.0j, 2, 1000
    )
    assert float(re_s) == want.real
    assert float(im_s) == want.imag
    assert float(bound_s) == want_bound


def test_series_resolution(tmp_path):
    spec = {"kind": "explicit", "coeffs": [[1, 1.0, 0.0], [2, -2.0, 0.0]]}
    path = tmp_path / "ladder.json"
    path.write_text(json.dumps(spec))
    argv_file = ["moment", "--series", str(path), "--sigma", "1.0", "--T", "50"]
    argv_builtin = ["moment", "--series", "eta-factor", "--sigma", "1.0", "--T", "50"]
    doc_file = json.loads(run_cli(argv_file)[1])
    doc_builtin = json.loads(run_cli(argv_builtin)[1])
    assert doc_file["result"] == doc_builtin["result"]
    code, _, err = run_cli(
        ["moment", "--series", "no_such_series", "--sigma", "1.0", "--T", "10"]
    )
    assert code == 1
    assert err.startswith("dlab: precondition: unknown builtin series")


def test_exit_codes_and_stderr_prefixes():
    code, _, err = run_cli(["moment", "--series", "zeta", "--sigma", "0.4", "--T", "10"])
    assert code == 1 and err.startswith("dlab: precondition:")
    code, _, err = run_cli(
        ["mollify", "--series", "zeta", "--sigma", "0.75", "--X-list", "10",
         "--N", "200"]
    )
    assert code == 2 and err.startswith("dlab: numerical: increase N")
    code, _, err = run_cli(["frobnicate"])
    assert code == 64 and err.startswith("dlab: usage:")
    code, _, err = run_cli([])
    assert code == 64
    code, _, err = run_cli(["moment", "--series", "zeta", "--T", "10"])
    assert code == 64  # --sigma is required
    code, _, err = run_cli(
        ["zeros", "--series", "eta-factor", "--rect", "1,2,3"]
    )
    assert code == 64 and "sigma_lo,sigma_hi,t_lo,t_hi" in err
    code, _, err = run_cli(
        ["recur", "--series", "eta-factor", "--s0", "1+2j", "--r", "0.05",
         "--T", "5"]
    )
    assert code == 64


def test_out_flag_writes_file(tmp_path):
    target = tmp_path / "doc.json"
    argv = MOMENT_ETA + ["--out", str(target)]
    code, out, err = run_cli(argv)
    assert code == 0 and out == "" and err == ""
    doc = json.loads(target.read_text())
    assert doc["experiment"] == "moment"
    assert doc == json.loads(run_cached(MOMENT_ETA)[1])
