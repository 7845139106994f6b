"""End-to-end checks of the command line front end.

Each test drives cli.main() with an argv list and inspects the files or
stdout it produces. The numerics behind each subcommand are covered by
the module tests; here the concern is plumbing: flags reach the right
functions, artifacts land where --out says, headers carry the config,
and exit codes follow the documented convention.
"""

import json
import math
import subprocess
import sys

import pytest

from juliaspec import __version__, cli


def test_simulate_writes_trajectory_and_histogram(tmp_path):
    out = str(tmp_path / "sim")
    rc = cli.main([
        "simulate", "--p", "0.5", "--steps", "50", "--samples", "400",
        "--states", "0", "3", "--seed", "7", "--out", out,
    ])
    assert rc == 0

    traj = (tmp_path / "sim.trajectory.csv").read_text().splitlines()
    assert traj[0].startswith("# juliaspec simulate ")
    assert traj[1] == "step,state"
    assert len(traj) == 2 + 51  # start state plus 50 sampled steps
    assert traj[2] == "0,0"
    for i, line in enumerate(traj[2:]):
        step, state = line.split(",")
        assert int(step) == i and int(state) >= 0

    hist = (tmp_path / "sim.histogram.csv").read_text().splitlines()
    assert hist[1] == "source,target,exact,empirical"
    mass = {}
    for line in hist[2:]:
        src, _tgt, exact, emp = line.split(",")
        mass[src] = mass.get(src, 0.0) + float(exact)
        assert 0.0 <= float(emp) <= 1.0
    assert sorted(mass) == ["0", "3"]
    assert all(abs(v - 1.0) <= 1e-12 for v in mass.values())


def test_simulate_deterministic_for_seed(tmp_path):
    argv = ["simulate", "--steps", "30", "--samples", "200", "--states", "2",
            "--seed", "11", "--out"]
    assert cli.main(argv + [str(tmp_path / "a")]) == 0
    assert cli.main(argv + [str(tmp_path / "b")]) == 0
    for suffix in (".trajectory.csv", ".histogram.csv"):
        a = (tmp_path / ("a" + suffix)).read_text()
        b = (tmp_path / ("b" + suffix)).read_text()
        assert a == b


def test_row_prints_bare_json(capsys):
    rc = cli.main(["row", "--n", "3", "--p", "0.5"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc == {"0": 0.125, "2": 0.25, "3": 0.5, "4": 0.125}


def test_row_out_wraps_config(tmp_path, capsys):
    path = tmp_path / "row.json"
    rc = cli.main(["row", "--base", "fib", "--n", "4", "--p", "0.5",
                   "--out", str(path)])
    assert rc == 0
    printed = json.loads(capsys.readouterr().out)
    wrapped = json.loads(path.read_text())
    assert wrapped["config"] == {"base": "fib", "p": 0.5, "n": 4}
    assert wrapped["row"] == printed
    assert wrapped["version"] == __version__
    assert abs(sum(wrapped["row"].values()) - 1.0) <= 1e-12


def test_matrix_stdout_matches_file(tmp_path, capsys):
    rc = cli.main(["matrix", "--size", "8", "--p", "0.5"])
    assert rc == 0
    text = capsys.readouterr().out
    lines = text.splitlines()
    assert lines[0] == "# binary 0.5 8"
    assert lines[1] == "0\t0\t0.5"
    for line in lines[1:]:
        i, j, v = line.split("\t")
        assert 0 <= int(i) < 8 and 0 <= int(j) < 8
        assert 0.0 < float(v) <= 1.0

    path = tmp_path / "m.txt"
    rc = cli.main(["matrix", "--size", "8", "--p", "0.5", "--out", str(path)])
    assert rc == 0
    assert path.read_text() == text
    assert "wrote" in capsys.readouterr().out


def test_qseq_csv_fixed_point(tmp_path):
    path = tmp_path / "q.csv"
    rc = cli.main(["qseq", "--base", "fib", "--p", "0.7",
                   "--lambda", "1.0", "0.0", "--n", "8", "--out", str(path)])
    assert rc == 0
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# juliaspec qseq ")
    assert lines[1] == "n,re,im"
    assert len(lines) == 2 + 9
    # the whole family fixes 1, so every row is exactly 1
    for k, line in enumerate(lines[2:]):
        assert line == "%d,1,0" % k


def test_julia_raster_artifacts(tmp_path, capsys):
    out = tmp_path / "j.ppm"
    rc = cli.main(["julia", "--p", "0.7", "--res", "16", "12",
                   "--iters", "40", "--out", str(out)])
    assert rc == 0
    data = out.read_bytes()
    head, _, payload = data.partition(b"255\n")
    lines = head.splitlines()
    assert lines[0] == b"P6"
    assert lines[1].startswith(b"# juliaspec binary ")
    assert lines[2] == b"16 12"
    assert len(payload) == 3 * 16 * 12

    side = json.loads((tmp_path / "j.json").read_text())
    assert side["base"] == "binary"
    assert side["resolution"] == [16, 12]
    assert side["max_iter"] == 40
    assert 0 < side["bounded_count"] <= 16 * 12
    assert "%d bounded of %d pixels" % (side["bounded_count"], 192) in capsys.readouterr().out


def test_ep_raster_artifacts(tmp_path):
    out = tmp_path / "e.ppm"
    rc = cli.main(["ep", "--p", "0.7", "--res", "12", "10",
                   "--iters", "40", "--out", str(out)])
    assert rc == 0
    head = out.read_bytes().partition(b"255\n")[0].splitlines()
    assert head[0] == b"P6"
    assert head[1].startswith(b"# juliaspec fib ")
    assert head[2] == b"12 10"
    side = json.loads((tmp_path / "e.json").read_text())
    assert side["base"] == "fib"
    assert side["window"] == [-2.0, 2.0, -2.0, 2.0]
    assert side["bounded_count"] > 0


def test_residual_report_document(tmp_path, capsys):
    path = tmp_path / "r.json"
    rc = cli.main(["residual", "--lambda", "1.0", "0.0", "--p", "0.7",
                   "--nmax", "8", "--terms", "60", "--out", str(path)])
    assert rc == 0
    doc = json.loads(path.read_text())
    ns = [n for n, _ in doc["residuals"]]
    assert ns == list(range(1, 9))
    vals = [v for _, v in doc["residuals"]]
    assert all(b < a for a, b in zip(vals[4:], vals[5:]))
    assert doc["identity_applicable"] is True
    # truncating the telescoping sum leaves exactly the geometric tail,
    # so 60 terms are needed before the gap sinks under the flag's 1e-6
    assert abs(doc["identity_gap"] - 0.7 ** 60) <= 1e-14
    assert doc["flags"] == {"q_bounded": True, "inv_q_bounded": True,
                            "identity_holds": True}
    assert doc["thresholds"]["identity_tol"] == 1e-6
    assert "wrote" in capsys.readouterr().out

    # fib rows start at the first splittable index
    rc = cli.main(["residual", "--base", "fib", "--nmax", "5"])
    assert rc == 0
    doc = json.loads(capsys.readouterr().out)
    assert [n for n, _ in doc["residuals"]] == [2, 3, 4, 5]


def test_candidates_table(tmp_path, capsys):
    path = tmp_path / "c.csv"
    rc = cli.main(["candidates", "--p", "0.7", "--depth", "3",
                   "--terms", "20", "--out", str(path)])
    assert rc == 0
    lines = path.read_text().splitlines()
    assert lines[1] == "re,im,q_max,q_min,identity_gap,q_bounded,inv_q_bounded,identity_holds"
    body = lines[2:]
    assert 1 <= len(body) <= 8
    for line in body:
        cells = line.split(",")
        assert len(cells) == 8
        assert cells[5] == "1"  # depth-3 pullbacks stay inside the set
    assert "%d candidates" % len(body) in capsys.readouterr().out


def test_eig_csv_and_summary(tmp_path, capsys):
    path = tmp_path / "eig.csv"
    rc = cli.main(["eig", "--size", "16", "--res", "24", "24",
                   "--iters", "60", "--out", str(path)])
    assert rc == 0
    lines = path.read_text().splitlines()
    assert lines[0] == "re,im,escape_iter,member"
    assert len(lines) == 17
    summary = json.loads(capsys.readouterr().out)
    assert summary["M"] == 16
    assert summary["resolution"] == [24, 24]
    assert 0.0 < summary["fraction_member"] <= 1.0


def test_verify_reports_every_check_ok(capsys):
    rc = cli.main(["verify", "--base", "binary", "--p", "0.5", "--seed", "1"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 12
    assert all(line.startswith("ok  ") for line in lines)
    names = {line.split()[1] for line in lines}
    assert "tilde" in names  # binary-only operator checks ran


def test_verify_fib_lane(capsys):
    rc = cli.main(["verify", "--base", "fib", "--p", "0.7"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 9
    assert all(line.startswith("ok  ") for line in lines)


def test_usage_errors_exit_two():
    with pytest.raises(SystemExit) as exc:
        cli.main(["row"])  # --n is required
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        cli.main(["no-such-command"])
    assert exc.value.code == 2


def test_caught_errors_exit_one(capsys):
    rc = cli.main(["row", "--n", "5", "--p", "1.5"])
    assert rc == 1
    assert capsys.readouterr().err.startswith("error:")

    rc = cli.main(["julia", "--res", "8", "8", "--resc", "2.0"])
    assert rc == 1
    assert "error:" in capsys.readouterr().err


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "juliaspec", "--version"],
        capture_output=True, text=True, cwd=str(tmp_path),
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "juliaspec " + __version__
