from __future__ import annotations

import subprocess
import sys

import pytest

from conftest import FIXTURES
from icotomo import formats as fmt
from icotomo.cli import main
from icotomo.parallel import ordered_map, worker_count

DIR0 = ["0", "-1", "-2", "2", "1", "-1"]
DIR1 = ["-1", "0", "2", "-1", "-1", "1"]


def report(out: str) -> dict[str, str]:
    return dict(line.split("=", 1) for line in out.splitlines() if "=" in line and " " not in line.split("=", 1)[0])


@pytest.fixture(scope="module")
def pipeline(tmp_path_factory):
    d = tmp_path_factory.mktemp("pipe")
    win = str(FIXTURES / "icosahedron.win")
    assert main(["generate", "--window", win, "--shift", "1/1000,1/1000,1/1000", "--radius", "3", "--out", str(d / "p.l")]) == 0
    assert main(["slice", str(d / "p.l"), "--out-dir", str(d / "s")]) == 0
    central = next(p for p in sorted((d / "s").iterdir()) if p.read_text().startswith("slice height 0/1\n"))
    assert main(["xray", str(central), "--dir", *DIR0, "--out", str(d / "A.xr")]) == 0
    assert main(["xray", str(central), "--dir", *DIR1, "--out", str(d / "B.xr")]) == 0
    return d, central, win


def test_generate_and_slice(pipeline, patch3):
    d, central, _ = pipeline
    assert fmt.parse_points((d / "p.l").read_text()) == patch3.points
    assert len(list((d / "s").iterdir())) == 13
    assert len(fmt.parse_slice(central.read_text())) == 25


def test_grid_report(pipeline, capsys):
    d, _, _ = pipeline
    assert main(["grid", "--xray", str(d / "A.xr"), "--xray", str(d / "B.xr")]) == 0
    r = report(capsys.readouterr().out)
    assert r["grid_size"] == "64" and r["cosets"] == "1" and r["l_class"] == "0"


def test_reconstruct_fixed(pipeline, capsys):
    d, central, win = pipeline
    rc = main(["reconstruct", "--xray", str(d / "A.xr"), "--xray", str(d / "B.xr"), "--window", win,
               "--shift", "1/1000,1/1000,1/1000", "--out", str(d / "sol.l")])
    assert rc == 0
    assert report(capsys.readouterr().out)["points"] == "25"
    sol = set(fmt.parse_points((d / "sol.l").read_text()))
    assert sol == set(fmt.parse_slice(central.read_text()).points)


def test_reconstruct_all(pipeline, capsys):
    d, _, win = pipeline
    rc = main(["reconstruct", "--xray", str(d / "A.xr"), "--xray", str(d / "B.xr"), "--window", win, "--all", "5",
               "--out", str(d / "many.l")])
    assert rc == 0
    r = report(capsys.readouterr().out)
    assert r["solutions"] == "1" and r["truncated"] == "0"
    assert (d / "many_0.l").exists()


def test_reconstruct_search(pipeline, capsys):
    d, _, win = pipeline
    rc = main(["reconstruct", "--xray", str(d / "A.xr"), "--xray", str(d / "B.xr"), "--window", win,
               "--search-plane", "1/500-1/1000t"])
    assert rc == 0
    assert report(capsys.readouterr().out)["feasible"] == "1"


def test_reconstruct_infeasible_and_errors(pipeline, tmp_path, capsys):
    d, _, win = pipeline
    far = ["--shift", "50,0,0"]
    assert main(["reconstruct", "--xray", str(d / "A.xr"), "--xray", str(d / "B.xr"), "--window", win, *far]) == 2
    assert report(capsys.readouterr().out)["feasible"] == "0"
    assert main(["reconstruct", "--xray", str(d / "A.xr"), "--xray", str(d / "A.xr"), "--window", win]) == 1
    bad = tmp_path / "bad.xr"
    bad.write_text("xray direction 0 -1 -2 2 1 -1\nbase 1/0+2t 0 0 count 1\n")
    assert main(["grid", "--xray", str(bad), "--xray", str(d / "B.xr")]) == 1
    err = capsys.readouterr().err
    assert "bad.xr:2:6" in err and "zero denominator" in err


def test_upolygon_and_determine(pipeline, capsys):
    _, central, _ = pipeline
    assert main(["upolygon", "--slice", str(central), "--dirs", str(FIXTURES / "dirs3.txt"), "--radius", "3"]) == 0
    r = report(capsys.readouterr().out)
    assert r["found"] == "1" and r["vertices"] == "6" and r["verified"] == "1" and r["ambient"] == "ball-slice"
    assert main(["determine", "--slice", str(central), "--dirs", str(FIXTURES / "dirs4_empirical.txt"), "--size-bound", "10"]) == 0
    assert report(capsys.readouterr().out)["result"] == "determined-up-to-bound"
    assert main(["upolygon", "--slice", str(central), "--dirs", str(FIXTURES / "dirs3.txt"), "--radius", "1"]) == 1


def test_plot_command(pipeline, capsys):
    d, central, win = pipeline
    outs = []
    for k in range(2):
        path = d / f"f{k}.svg"
        assert main(["plot", "--slice", str(central), "--window", win, "--out", str(path)]) == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1] and b"<polygon" in outs[0]
    assert main(["plot", "--kind", "grid-star-with-window", "--slice", str(central), "--dirs",
                 str(FIXTURES / "dirs3.txt"), "--out", str(d / "g.svg")]) == 0


def test_demo_default(capsys):
    assert main(["demo"]) == 0
    r = report(capsys.readouterr().out)
    assert r["patch_size"] == "160" and r["central_slice_size"] == "25"
    assert r["feasible"] == "1" and r["status"] == "ok"
    assert r["verify_xray"] == r["verify_window"] == r["verify_coset"] == "1"


def test_demo_corrupt(capsys):
    assert main(["demo", "--corrupt-xray", "--no-search"]) == 2
    r = report(capsys.readouterr().out)
    assert r["stage"] == "reconstruct" and r["reason"] == "marginal sums differ"


def test_demo_radius_zero(capsys):
    assert main(["demo", "--radius", "0"]) == 0
    r = report(capsys.readouterr().out)
    assert r["patch_size"] == "0" and r["grid_size"] == "0" and r["solution_size"] == "0"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "icotomo", "demo", "--radius", "0"], capture_output=True, text=True)
    assert res.returncode == 0 and "status=ok" in res.stdout


def test_worker_count():
    assert worker_count({}) == 1
    assert worker_count({"ICOTOMO_THREADS": "3"}) == 3
    assert worker_count({"ICOTOMO_THREADS": "0"}) >= 1
    with pytest.raises(ValueError):
        worker_count({"ICOTOMO_THREADS": "-2"})
    assert ordered_map(abs, [-3, 1, -2], 2) == [3, 1, 2]
