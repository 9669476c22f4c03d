import csv
import json
import statistics

import pytest

from aclsim.cli import main
from aclsim.config import ConfigError, apply_overrides, default_config_dict, load_config
from aclsim.graph import load_graph
from aclsim.harness import (
    SIM1_FIELDS,
    SIM2_FIELDS,
    network_for,
    run_simulation1,
    run_simulation2,
    summarize,
)

SMALL = ["generator.nodes=150", "diffusion.replications=3", "diffusion.seedCounts=[10, 20]"]


def small_cfg(*extra):
    return load_config(None, SMALL + list(extra))


def read_csv(path):
    with open(path, newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


# -- config --------------------------------------------------------------------


def test_default_config_loads():
    cfg = load_config()
    assert list(cfg.conditions) == ["H1", "H2", "H3"]
    assert cfg.untrusted == ("workplace", "Ikea", 10)
    assert cfg.diffusion.beta == 0.6 and cfg.diffusion.replications == 100
    assert [str(f) for f in cfg.diffusion.removal_fractions] == ["0", "1/3", "2/3"]


def test_overrides_parse_json_and_reject_bad_keys():
    d = apply_overrides(default_config_dict(), ["diffusion.beta=0.25", "outputDir=elsewhere"])
    assert d["diffusion"]["beta"] == 0.25 and d["outputDir"] == "elsewhere"
    with pytest.raises(ConfigError):
        apply_overrides(default_config_dict(), ["nonsense"])
    with pytest.raises(ConfigError):
        apply_overrides(default_config_dict(), ["masterSeed.x=1"])


@pytest.mark.parametrize("override", [
    "diffusion.beta=1.5", "generator.m=0", "untrusted.value=\"Amazon\"", "untrusted.n=0",
    "diffusion.replications=0", "masterSeed=-1", "diffusion.removalFractions=[\"3/2\"]",
])
def test_invalid_configs_rejected(override):
    with pytest.raises((ConfigError, ValueError)):
        load_config(None, [override])


def test_condition_network_is_shared_between_runs():
    cfg = small_cfg()
    assert network_for(cfg, "H2") == network_for(cfg, "H2")
    assert network_for(cfg, "H2") != network_for(cfg, "H3")
    with pytest.raises(ConfigError, match="unknown homophily condition"):
        network_for(cfg, "H9")


# -- simulations ---------------------------------------------------------------


def test_simulation1_rows():
    res = run_simulation1(small_cfg())
    assert len(res.rows) == 9
    assert {(r["condition"], r["method"]) for r in res.rows} == {
        (c, m) for c in ("H1", "H2", "H3") for m in ("MC", "LE", "LiC")
    }
    for r in res.rows:
        assert r["error"] == ""
        assert 0 <= float(r["precision"]) <= 1 and int(r["aclSize"]) >= 1


def test_simulation2_rows_and_summary():
    cfg = small_cfg()
    res = run_simulation2(cfg)
    assert len(res.rows) == 3 * 2 * 3 * 3
    assert all(not r["error"] for r in res.rows)
    cells = [s for s in res.summary if "*" not in (s["homophilyConfig"], s["seedCount"], s["removalFraction"])]
    assert len(cells) == 18
    for s in cells:
        vals = [float(r["infectedAclFraction"]) for r in res.rows
                if (r["homophilyConfig"], r["seedCount"], r["removalFraction"])
                == (s["homophilyConfig"], s["seedCount"], s["removalFraction"])]
        assert s["n"] == 3
        assert float(s["meanInfectedAclFraction"]) == pytest.approx(statistics.fmean(vals), abs=1e-12)
    # marginals: one line per level of each factor
    assert sum(1 for s in res.summary if s["seedCount"] == "*" and s["removalFraction"] == "*") == 3


def test_summary_skips_error_rows():
    rows = [
        {"homophilyConfig": "H1", "seedCount": 1, "removalFraction": "0", "infectedAclFraction": "0.5", "error": ""},
        {"homophilyConfig": "H1", "seedCount": 1, "removalFraction": "0", "infectedAclFraction": "", "error": "boom"},
    ]
    cell = summarize(rows)[0]
    assert cell["n"] == 1 and cell["meanInfectedAclFraction"] == "0.500000000000"


def test_infeasible_seed_count_gives_error_rows():
    res = run_simulation2(small_cfg("diffusion.seedCounts=[1000]", "diffusion.removalFractions=[\"0\"]"))
    assert res.rows and all("eligible" in r["error"] for r in res.rows)
    assert res.summary == []


def test_sim2_reuses_sim1_graphs():
    cfg = small_cfg()
    s1 = run_simulation1(cfg)
    s2 = run_simulation2(cfg)
    assert s1.graphs == s2.graphs
    le = {c: p.acl for (c, m), p in s1.predictions.items() if m.value == "LE"}
    assert le == {c: pred.acl for c, (_, pred) in s2.acls.items()}


# -- CLI -----------------------------------------------------------------------


def run_cli(tmp_path, *args):
    return main([*args, "--out", str(tmp_path), *sum((["--set", s] for s in SMALL), [])])


def test_cli_validate_and_errors(tmp_path, capsys):
    assert run_cli(tmp_path, "validate-config") == 0
    assert "config ok" in capsys.readouterr().out
    assert main(["validate-config", "--config", str(tmp_path / "missing.json")]) == 1
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["validate-config", "--config", str(bad)]) == 1
    assert main(["validate-config", "--set", "diffusion.beta=2"]) == 1
    err = capsys.readouterr().err
    assert "error" in err
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2


def test_cli_pipeline(tmp_path, capsys):
    assert run_cli(tmp_path, "generate", "--condition", "H3", "--export", "graphml", "--export", "dot") == 0
    graph = tmp_path / "graph_H3.json"
    assert graph.exists() and (tmp_path / "graph_H3.graphml").exists() and (tmp_path / "graph_H3.dot").exists()
    assert len(load_graph(graph)) == 150

    assert run_cli(tmp_path, "detect", "--graph", str(graph), "--method", "MC") == 0
    cover = tmp_path / "cover_H3_MC.json"
    assert run_cli(tmp_path, "acl", "--graph", str(graph), "--cover", str(cover)) == 0
    acl = tmp_path / "acl_H3_MC.json"
    doc = json.loads(acl.read_text())
    assert doc["method"] == "MC" and doc["aclSize"] == len(doc["acl"])

    assert run_cli(tmp_path, "diffuse", "--graph", str(graph), "--acl", str(acl)) == 0
    rows = read_csv(tmp_path / "diffuse_H3.csv")
    assert len(rows) == 2 * 3 * 3 and list(rows[0]) == SIM2_FIELDS
    assert main(["detect", "--graph", str(tmp_path / "nope.json"), "--method", "LE",
                 "--out", str(tmp_path)]) == 1


def test_cli_sim1_sim2_outputs(tmp_path):
    assert run_cli(tmp_path, "sim1") == 0
    rows = read_csv(tmp_path / "sim1.csv")
    assert len(rows) == 9 and list(rows[0]) == SIM1_FIELDS
    assert run_cli(tmp_path, "sim2", "--seed", "7") == 0
    rows = read_csv(tmp_path / "sim2.csv")
    assert len(rows) == 54 and {r["masterSeed"] for r in rows} == {"7"}
    assert (tmp_path / "summary.csv").exists() and (tmp_path / "sim2_meta.json").exists()
    assert b"\r\n" not in (tmp_path / "sim2.csv").read_bytes()


def test_cli_traces(tmp_path):
    assert run_cli(tmp_path, "sim2", "--set", "diffusion.writeTraces=true") == 0
    lines = (tmp_path / "traces_sim2.jsonl").read_text().splitlines()
    assert len(lines) == 54
    rec = json.loads(lines[0])
    assert {"seeds", "trace", "removedGatekeepers"} <= set(rec)
