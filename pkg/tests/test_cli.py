import shutil
from importlib import resources
from pathlib import Path

import pytest

from geoprox import config as cfgmod
from geoprox.cli import main

SCENARIOS = resources.files("geoprox") / "scenarios"
NAMES = ["crossing", "disjoint", "asymptotic", "cyclic_balls", "minimize"]


def scenario(name):
    return Path(str(SCENARIOS / f"{name}.ini"))


@pytest.mark.parametrize("name", NAMES)
def test_bundled_configs_round_trip(name):
    cfg = cfgmod.load(scenario(name))
    again = cfgmod.parse(cfg.serialize())
    assert again == cfg
    cfgmod.build(again)


@pytest.mark.parametrize("name,regime", [("crossing", "CommonFixedPoint"), ("disjoint", "BestApproximationPair"),
                                         ("asymptotic", "Divergent")])
def test_bundled_regimes(tmp_path, capsys, name, regime):
    assert main(["run", str(scenario(name)), "-o", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert f"regime={regime}" in out
    assert (tmp_path / f"{name}.csv").exists()
    svg = (tmp_path / f"{name}.svg").read_text()
    assert svg.startswith("<svg") and 'class="iterates"' in svg


def test_certificates_reported(tmp_path, capsys):
    assert main(["run", str(scenario("cyclic_balls")), "-o", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "certificate steps: theta-r bound=1728 HOLDS" in out


def test_directory_run_in_parallel(tmp_path, capsys):
    src = tmp_path / "cfg"
    shutil.copytree(str(SCENARIOS), src)
    assert main(["run", str(src), "-o", str(tmp_path / "out"), "-j", "2"]) == 0
    assert len(list((tmp_path / "out").glob("*.csv"))) == len(NAMES)


def test_same_seed_same_bytes(tmp_path):
    cfg = tmp_path / "noisy.ini"
    text = scenario("crossing").read_text().replace("escape_radius = 50", "escape_radius = 50\nerrors = powerlaw 0.1 2")
    cfg.write_text(text)
    assert main(["run", str(cfg), "-o", str(tmp_path / "a")]) == 0
    assert main(["run", str(cfg), "-o", str(tmp_path / "b")]) == 0
    assert (tmp_path / "a" / "noisy.csv").read_bytes() == (tmp_path / "b" / "noisy.csv").read_bytes()


def test_env_seed_override(tmp_path, monkeypatch):
    cfg = tmp_path / "noisy.ini"
    cfg.write_text(scenario("crossing").read_text().replace("escape_radius = 50",
                                                         "escape_radius = 50\nerrors = powerlaw 0.1 2"))
    main(["run", str(cfg), "-o", str(tmp_path / "a")])
    monkeypatch.setenv("GEOPROX_SEED", "99")
    main(["run", str(cfg), "-o", str(tmp_path / "b")])
    assert (tmp_path / "a" / "noisy.csv").read_bytes() != (tmp_path / "b" / "noisy.csv").read_bytes()
    assert "seed=99" in (tmp_path / "b" / "noisy.summary.txt").read_text()


def test_negative_lambda_names_field(tmp_path, capsys):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(scenario("minimize").read_text().replace("lambda = 1", "lambda = -1"))
    assert main(["run", str(cfg), "-o", str(tmp_path)]) == 2
    assert "problem.lambda" in capsys.readouterr().err


@pytest.mark.parametrize("edit,field", [
    (("kind = halfplane", "kind = klein"), "space.kind"),
    (("T1 = P:B", "T1 = P:Z"), "problem.T1"),
    (("start = 3 1", "start = 3 -1"), "problem.start"),
    (("mode = alternating", "mode = sideways"), "experiment.mode"),
])
def test_config_errors_name_field(tmp_path, capsys, edit, field):
    cfg = tmp_path / "bad.ini"
    cfg.write_text(scenario("crossing").read_text().replace(*edit))
    assert main(["run", str(cfg), "-o", str(tmp_path)]) == 2
    assert field in capsys.readouterr().err


@pytest.mark.parametrize("argv,expect", [
    (["theta2", "1", "2", "2", "2"], "bound=512"),
    (["theta2", "4", "2", "2", "2"], "bound=0"),
    (["theta-min", "0.1", "1", "0", "0.5"], "bound=101"),
    (["theta-r", "1", "1", "2", "2", "3"], "bound=108"),
])
def test_rate(capsys, argv, expect):
    assert main(["rate"] + argv) == 0
    assert expect in capsys.readouterr().out


def test_rate_usage_errors(capsys):
    assert main(["rate", "theta2", "1", "2"]) == 2
    assert main(["rate", "theta2", "-1", "2", "2", "2"]) == 2
    assert main(["rate", "nope"]) == 2


def test_plot_from_csv(tmp_path):
    main(["run", str(scenario("disjoint")), "-o", str(tmp_path)])
    out = tmp_path / "again.svg"
    assert main(["plot", str(tmp_path / "disjoint.csv"), str(scenario("disjoint")), "-o", str(out)]) == 0
    assert out.read_text() == (tmp_path / "disjoint.svg").read_text()


def test_plot_rejects_empty_and_unsupported(tmp_path):
    empty = tmp_path / "empty.csv"
    empty.write_text("n,x_1,x_2,step,residual_1,fejer\n")
    assert main(["plot", str(empty), str(scenario("crossing")), "-o", str(tmp_path / "e.svg")]) == 2
    assert not (tmp_path / "e.svg").exists()
    tree = tmp_path / "tree.ini"
    tree.write_text("""
[experiment]
mode = cyclic
[space]
kind = tree
vertices = a b c
edges = a-b:1, b-c:2
[set.S]
kind = subtree
vertices = a b
[problem]
start = @c
mappings = P:S
""")
    assert main(["run", str(tree), "-o", str(tmp_path)]) == 0
    assert main(["plot", str(tmp_path / "tree.csv"), str(tree), "-o", str(tmp_path / "t.svg")]) == 2


def test_check_suite_small(capsys):
    assert main(["check", "--samples", "50"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out.replace("PASS square map", "")
