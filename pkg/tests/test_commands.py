# tests/test_commands.py
import os

import pandas as pd
import pytest

from rewirecap.config import ExitCodes, OutputConfig


# ----- Common fixtures -----
@pytest.fixture(autouse=True)
def patch_logger(monkeypatch):
    class L:
        def debug(self, *a, **k): pass
        def info(self, *a, **k): pass
        def warning(self, *a, **k): pass
        def error(self, *a, **k): pass
    monkeypatch.setattr("rewirecap.commands.logger", L())
    monkeypatch.setattr("cli_utils.regist.logger", L())


@pytest.fixture(autouse=True)
def clean_env(monkeypatch):
    for key in ("REWIRECAP_SEED", "REWIRECAP_OUT_DIR", "REWIRECAP_WORKERS"):
        monkeypatch.delenv(key, raising=False)


def run(argv):
    from rewirecap.commands import RewireCapCommands
    from rewirecap.utils.command_utils import CommandParser
    args = CommandParser.build_parser().parse_args(argv)
    handler = getattr(RewireCapCommands, f"{args.command}_command")
    return handler(args)


def dispatch(argv):
    from cli_utils.regist import CommandRegistrar
    return CommandRegistrar.dispatch(argv)


def read(path):
    with open(path, encoding="utf-8") as f:
        return f.read()


# ----- generate / rewire -----
def test_generate_writes_edge_list(tmp_path, capsys):
    assert run(["generate", "--ba", "30,3,2", "--seed", "1", "--out", str(tmp_path)]) == ExitCodes.OK
    path = tmp_path / "ba_30_3_2.edges"
    assert capsys.readouterr().out.strip() == str(path)
    assert len(read(path).splitlines()) == 3 + 27 * 2


def test_rewire_none_reproduces_input(tmp_path):
    run(["generate", "--ba", "30,3,2", "--seed", "1", "--out", str(tmp_path)])
    source = tmp_path / "ba_30_3_2.edges"
    out = tmp_path / "rewired"

    code = run(["rewire", "--dataset", str(source), "--strategy", "none", "--rf", "0.2", "--out", str(out)])
    assert code == ExitCodes.OK
    assert read(out / "ba_30_3_2_none.edges") == read(source)

    report = pd.read_csv(out / "ba_30_3_2_none_report.csv")
    assert list(report.columns) == OutputConfig.REPORT_COLUMNS
    assert report.loc[0, "accepted"] == 0


def test_rewire_dpa_keeps_edge_count(tmp_path, capsys):
    code = run(["rewire", "--ba", "40,4,2", "--seed", "2", "--strategy", "dpa", "--rf", "0.1",
                "--out", str(tmp_path)])
    assert code == ExitCodes.OK
    lines = read(tmp_path / "ba_40_4_2_dpa.edges").splitlines()
    assert len(lines) == 6 + 36 * 2
    assert "moves accepted" in capsys.readouterr().out


def test_rewire_takes_one_strategy(tmp_path):
    argv = ["rewire", "--dataset", "karate", "--strategy", "dpa,dec", "--rf", "0.1", "--out", str(tmp_path)]
    assert dispatch(argv) == ExitCodes.DATA_ERROR


# ----- metrics -----
def test_metrics_on_karate(tmp_path, capsys):
    assert run(["metrics", "--dataset", "karate", "--out", str(tmp_path)]) == ExitCodes.OK
    out = capsys.readouterr().out
    assert "network: karate (N=34, |E|=78)" in out
    assert "g_max: 0.4376" in out
    assert "degree tail slope:" in out

    for suffix in ("metrics", "centrality", "cores", "rich_club"):
        assert (tmp_path / f"karate_{suffix}.csv").exists()
    assert len(pd.read_csv(tmp_path / "karate_centrality.csv")) == 34


def test_metrics_needs_a_network():
    assert dispatch(["metrics"]) == ExitCodes.DATA_ERROR


# ----- simulate -----
def test_simulate_writes_traces(tmp_path, capsys):
    code = run(["simulate", "--ba", "30,3,2", "--seed", "3", "--beta", "0.5", "--lambda", "0.5,1",
                "--horizon", "10", "--packets", "--out", str(tmp_path)])
    assert code == ExitCodes.OK
    out = capsys.readouterr().out
    assert "lambda_c=" in out
    assert ", C=" in out

    analytic = pd.read_csv(tmp_path / "ba_30_3_2_analytic.csv")
    assert len(analytic) == 2 * 10
    packets = pd.read_csv(tmp_path / "ba_30_3_2_packets.csv")
    assert list(packets.columns) == ["beta", "lambda"] + OutputConfig.TRACE_COLUMNS
    assert len(packets) == 2 * 10
    thresholds = pd.read_csv(tmp_path / "ba_30_3_2_thresholds.csv")
    assert list(thresholds.columns) == ["beta", "lambda_c", "free_flow_lambda"]
    assert (tmp_path / "ba_30_3_2_nodes_beta0.5.csv").exists()


# ----- sweep / plot -----
def test_sweep_with_plots(tmp_path, capsys):
    code = run(["sweep", "--ba", "30,3,2", "--strategy", "dpa", "--rf", "0.05", "--beta", "0.5",
                "--lambda", "1", "--realizations", "1", "--horizon", "10", "--workers", "1",
                "--out", str(tmp_path), "--plots"])
    assert code == ExitCodes.OK
    assert "Results in" in capsys.readouterr().out

    metrics = pd.read_csv(tmp_path / OutputConfig.METRICS_CSV)
    assert list(metrics["strategy"]) == ["original", "dpa"]
    plots = tmp_path / OutputConfig.PLOTS_DIR
    assert (plots / "rf_sweep.svg").exists()
    assert (plots / "degree_distribution.svg").exists()

    capsys.readouterr()
    assert run(["plot", "--out", str(tmp_path)]) == ExitCodes.OK
    printed = capsys.readouterr().out.splitlines()
    assert all(os.path.exists(p) for p in printed)
    assert printed


def test_plot_without_results(tmp_path):
    assert dispatch(["plot", "--out", str(tmp_path)]) == ExitCodes.DATA_ERROR


# ----- environment -----
def test_bad_integer_env_maps_to_data_error(tmp_path, monkeypatch):
    monkeypatch.setenv("REWIRECAP_SEED", "not-a-seed")
    assert dispatch(["generate", "--ba", "30,3,2", "--out", str(tmp_path)]) == ExitCodes.DATA_ERROR
    assert not (tmp_path / "ba_30_3_2.edges").exists()

    monkeypatch.setenv("REWIRECAP_SEED", "17")
    monkeypatch.setenv("REWIRECAP_WORKERS", "two")
    code = dispatch(["sweep", "--ba", "30,3,2", "--strategy", "dpa", "--rf", "0.05",
                     "--realizations", "1", "--horizon", "5", "--out", str(tmp_path)])
    assert code == ExitCodes.DATA_ERROR
