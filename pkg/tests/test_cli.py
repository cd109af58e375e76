import io
import json
import subprocess
import sys
from pathlib import Path

import pytest

from powermix import power_mean
from powermix.cli import main

HERE = Path(__file__).parent
GOLDEN = HERE / "golden"
DATA = HERE / "data"

# name -> (argv, expected exit code); stdout lives in golden/<name>.txt
CASES = {
    "mix_arithmetic": (["mix", "--p", "1", "--phase", "0.25:4", "--phase", "0.75:8"], 0),
    "mix_geometric": (["mix", "--p", "0", "--phase", "0.5:2", "--phase", "0.5:8"], 0),
    "mix_max": (["mix", "--p", "inf", "--phase", "0.3:10", "--phase", "0.7:2"], 0),
    "invert_phase": (["invert", "phase", "--p", "2", "--comp", "0.5,0.5", "--known", "_,1", "--target", "5"], 0),
    "invert_fraction": (
        ["invert", "fraction", "--p", "0", "--sigma1", "10", "--sigma2", "1", "--target", "3.1622776601683795"],
        0,
    ),
    "invert_archie": (["invert", "archie-sw", "--sigma", "0.05", "--sigma-w", "5", "--phi", "0.2", "--m", "2"], 0),
    "fit_single": (["fit", str(DATA / "single.csv")], 0),
    "fit_exact_half": (["fit", str(DATA / "exact_half.csv")], 0),
    "check_power2": (["check", "power:2"], 0),
    "check_log": (["check", "log"], 0),
    "check_cubic": (["check", "witness:cubic-plus-linear"], 1),
    "check_exp": (["check", "witness:exp"], 1),
    "sweep_p": (["sweep", "--from", "-5", "--to", "5", "--steps", "101", "--phase", "0.5:1", "--phase", "0.5:4"], 0),
    "sweep_t": (["sweep", "--variable", "t", "--values", "1e-3,1,1e3", "--p", "2",
                 "--phase", "0.5:1", "--phase", "0.5:4"], 0),
}


def run(argv):
    buf = io.StringIO()
    code = main(argv, out=buf)
    return code, buf.getvalue()


def run_exit(argv):
    """Exit code of a call that may end in argparse's own ``exit``."""
    try:
        code, _ = run(argv)
    except SystemExit as exc:
        code = exc.code
    return code


@pytest.mark.parametrize("name", sorted(CASES))
def test_golden(name):
    argv, expected_code = CASES[name]
    code, text = run(argv)
    assert code == expected_code
    assert text == (GOLDEN / f"{name}.txt").read_text(encoding="utf-8")


def test_golden_values():
    # the golden files themselves carry the expected numbers
    assert run(CASES["mix_arithmetic"][0])[1] == "7\n"
    assert run(CASES["mix_geometric"][0])[1] == "4\nflags: GeometricLimitUsed\n"
    assert run(CASES["mix_max"][0])[1] == "10\n"
    assert run(CASES["invert_phase"][0])[1] == "7\n"
    assert float(run(CASES["invert_fraction"][0])[1]) == pytest.approx(0.5, abs=1e-15)
    assert float(run(CASES["invert_archie"][0])[1]) == pytest.approx(0.5, rel=1e-15)
    assert run(CASES["fit_single"][0])[1].startswith("p_hat 1")


def test_fit_exact_half():
    lines = dict(line.split(" ", 1) for line in run(CASES["fit_exact_half"][0])[1].splitlines())
    assert abs(float(lines["p_hat"]) - 0.5) <= 1e-8


def test_sweep_p_contract():
    _, text = run(CASES["sweep_p"][0])
    assert text.endswith("\n") and "\r" not in text
    rows = text.splitlines()
    assert rows[0] == "p,value,flags"
    body = [r.split(",") for r in rows[1:]]
    assert len(body) == 101
    values = [float(v) for _, v, _ in body]
    assert all(a <= b for a, b in zip(values, values[1:]))
    assert 1.0 < values[0] < 1.6 and 2.5 < values[-1] < 4.0
    p0 = [r for r in body if float(r[0]) == 0.0]
    assert len(p0) == 1 and float(p0[0][1]) == 2.0 and p0[0][2] == "GeometricLimitUsed"


def test_sweep_t_proportional():
    rows = [r.split(",") for r in run(CASES["sweep_t"][0])[1].splitlines()[1:]]
    base = power_mean(2, (0.5, 0.5), (1, 4)).value
    for t, v, _ in rows:
        assert float(v) == pytest.approx(float(t) * base, rel=1e-15)


def test_sweep_byte_identical(tmp_path):
    argv = CASES["sweep_p"][0]
    outs = []
    for k in range(2):
        path = tmp_path / f"s{k}.csv"
        assert main(argv + ["-o", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    assert outs[0] == (GOLDEN / "sweep_p.txt").read_bytes()


def test_sweep_fraction():
    code, text = run(["sweep", "--variable", "a1", "--values", "0,1", "--p", "1",
                      "--phase", "0.5:1", "--phase", "0.5:4"])
    assert code == 0
    assert text.splitlines()[1:] == ["0,4,", "1,1,"]


def test_round_trip_17_digits():
    for p in ("0.37", "-2.5", "3"):
        _, text = run(["mix", "--p", p, "--phase", "0.3:1.1", "--phase", "0.7:9.7"])
        assert float(text.splitlines()[0]) == power_mean(float(p), (0.3, 0.7), (1.1, 9.7)).value


def test_complex_literal():
    _, text = run(["mix", "--p", "0.5", "--phase", "0.5:80+10i", "--phase", "0.5:4-1i"])
    assert text.strip().endswith("i")
    z = complex(text.strip().replace("i", "j"))
    assert abs(z.imag) > 0


@pytest.mark.parametrize(
    "argv, code",
    [
        (["invert", "phase", "--p", "2", "--comp", "0.5,0.5", "--known", "_,10", "--target", "5"], 2),
        (["invert", "fraction", "--p", "1", "--sigma1", "1", "--sigma2", "2", "--target", "3"], 2),
        (["mix", "--p", "1", "--phase", "0.5:1", "--phase", "0.6:2"], 2),
        (["mix", "--p", "x", "--phase", "0.5:1", "--phase", "0.5:2"], 64),
        (["mix", "--phase", "0.5:1", "--phase", "0.5:2"], 64),
        (["check", "foo"], 64),
        (["sweep", "--from", "0", "--to", "1", "--steps", "1", "--phase", "1:1"], 64),
        (["sweep", "--from", "1", "--to", "0", "--steps", "3", "--phase", "1:1"], 64),
        (["fit", str(DATA / "empty.csv")], 2),
        (["fit", str(DATA / "bad.csv")], 65),
        (["fit", str(DATA / "missing.csv")], 73),
        (["sweep", "--from", "0", "--to", "1", "--steps", "3", "--phase", "1:1", "-o", "/nonexistent/x.csv"], 73),
        (["frobnicate"], 64),
        (["mix", "--bogus"], 64),
    ],
)
def test_exit_codes(argv, code):
    assert run_exit(argv) == code


def test_error_diagnostics(capsys):
    main(["fit", str(DATA / "empty.csv")], out=io.StringIO())
    assert "EmptyDataset" in capsys.readouterr().err
    main(["fit", str(DATA / "bad.csv")], out=io.StringIO())
    assert "line 3" in capsys.readouterr().err
    main(["invert", "phase", "--p", "2", "--comp", "0.5,0.5", "--known", "_,10", "--target", "5"], out=io.StringIO())
    assert "Infeasible" in capsys.readouterr().err


def test_per_sample(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("a1,a2,s1,s2,measured\n0.5,0.5,1,4,2.5\n0.5,0.5,3,3,3\n0.5,0.5,1,4,4\n")
    code, text = run(["fit", str(path), "--per-sample"])
    assert code == 0
    first, *rest = text.splitlines()[-3:]
    assert first.startswith("sample 0 p ") and float(first.split()[-1]) == pytest.approx(1, abs=1e-14)
    assert rest == ["sample 1 Degenerate", "sample 2 Unsolvable +inf"]


def test_config_and_override(tmp_path):
    cfg = tmp_path / "c.json"
    cfg.write_text(json.dumps({"p": "1", "phase": ["0.25:4", "0.75:8"]}))
    assert run(["mix", "--config", str(cfg)])[1] == "7\n"
    assert run(["mix", "--config", str(cfg), "--p", "inf"])[1] == "8\n"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"nope": 1}))
    assert run_exit(["mix", "--config", str(bad)]) == 64


@pytest.mark.parametrize("cmd", [[], ["mix"], ["invert"], ["invert", "phase"], ["fit"], ["check"], ["sweep"]])
def test_help(cmd):
    assert run_exit(cmd + ["--help"]) == 0


def test_module_entry_point():
    res = subprocess.run(
        [sys.executable, "-m", "powermix", "mix", "--p", "1", "--phase", "0.25:4", "--phase", "0.75:8"],
        capture_output=True, text=True, check=False,
    )
    assert res.returncode == 0 and res.stdout == "7\n"
