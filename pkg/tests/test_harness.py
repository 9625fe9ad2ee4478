"""Sweep runner, scenario scripts, and the command-line entry point."""

import io
from dataclasses import replace
from fractions import Fraction

import pytest

from pubchain.errors import ConfigError, ScenarioParseError
from pubchain.harness import (
    SweepSpec,
    run_scenario,
    run_sweep,
    write_balances_csv,
    write_csv,
    write_settlement_csv,
)
from pubchain.harness.cli import main
from pubchain.tokenomics import EconomicParams
from pubchain.units import SUBUNITS_PER_TOKEN as U

# sweep spec


def spec(**overrides):
    base = dict(n_reviews=40, replications=3, readers_per_review=(10,))
    base.update(overrides)
    return SweepSpec(**base)


@pytest.mark.parametrize(
    "bad",
    [
        {"strategy": 3},
        {"replications": 0},
        {"n_malicious": (100, 100)},
        {"n_malicious": (200, 100)},
        {"n_malicious": ()},
        {"readers_per_review": ()},
        {"fake_reviewer_fraction": ()},
    ],
)
def test_spec_validation(bad):
    with pytest.raises(ConfigError):
        spec(**bad)


def test_spec_coerces_scalars_to_tuples():
    s = spec(n_malicious=5, readers_per_review=10, fake_reviewer_fraction=0.2)
    assert s.n_malicious == (5,)
    assert s.readers_per_review == (10,)
    assert s.fake_reviewer_fraction == (0.2,)


def test_spec_from_mapping_rejects_unknown_keys():
    with pytest.raises(ConfigError) as info:
        SweepSpec.from_mapping({"strategy": 1, "bogus": 3})
    assert "bogus" in str(info.value)


def test_grid_shape():
    s = spec(strategy=2, n_malicious=(0, 10), readers_per_review=(10, 40),
             fake_reviewer_fraction=(0.1, 0.5))
    cells = list(s.grid())
    assert len(cells) == 8
    assert cells[0][0] == 0 and cells[-1][0] == 7  # stable enumeration order


def test_strategy1_grid_ignores_fraction_axis():
    cells = list(spec(fake_reviewer_fraction=(0.1, 0.5)).grid())
    assert len(cells) == 1
    assert cells[0][2] is None  # delta column empty for strategy 1


# sweep rows


def test_noise_free_rows_are_exact():
    rows = run_sweep(spec(score_variance=0.0, n_malicious=(0, 40)))
    assert [(r.n_mn, r.mean_s, r.std_s, r.benchmark_mean_s) for r in rows] \
        == [(0, 40.0, 0.0, 40.0), (40, 80.0, 0.0, 80.0)]


def test_csv_format():
    rows = run_sweep(spec(score_variance=0.0))
    buf = io.StringIO()
    write_csv(rows, buf)
    lines = buf.getvalue().splitlines()
    assert lines[0] == "strategy,n_mn,n_rs,delta,seed_count,mean_s,std_s,benchmark_mean_s"
    assert lines[1] == "1,0,10,,3,40.00000000,0.00000000,40.00000000"


def test_sweep_runs_are_byte_identical():
    s = spec(n_malicious=(0, 20))
    dumps = []
    for _ in range(2):
        buf = io.StringIO()
        write_csv(run_sweep(s), buf)
        dumps.append(buf.getvalue())
    assert dumps[0] == dumps[1]


def test_seed_changes_noisy_output():
    a = run_sweep(spec(n_malicious=(20,)))
    b = run_sweep(replace(spec(n_malicious=(20,)), seed=1))
    assert a[0].mean_s != b[0].mean_s


# scenario scripts

DEMO = """
register author reviewer miner r1 r2
seal author            # grants land, author can afford the fee
post author paper-a
review reviewer paper-a 85
score r1 paper-a reviewer 90
score r2 paper-a reviewer 90
seal miner
seal miner
""".strip().splitlines()


def demo_params():
    return EconomicParams(min_reader_scores=2, reward_window=3)


def test_scenario_runs_and_labels_accounts():
    result = run_scenario(DEMO, demo_params())
    ledger = result.ledger
    author = ledger.accounts[result.addresses["author"]]
    # grant 50, fee -10; no minting in the bootstrap phase, so no author tranche
    assert author.balance == (50 - 10) * U
    assert result.label(result.addresses["reviewer"]) == "reviewer"
    assert result.label("not-an-address") == "not-an-address"
    paper = ledger.papers[result.papers["paper-a"]]
    assert paper.score == Fraction(85)


def test_scenario_citation_line():
    lines = DEMO + ["post r1 paper-b cites paper-a", "seal miner"]
    result = run_scenario(lines, demo_params())
    assert len(result.papers) == 2
    citing = result.ledger.papers[result.papers["paper-b"]]
    assert citing.citations == (result.papers["paper-a"],)


@pytest.mark.parametrize(
    ("line", "fragment"),
    [
        ("frobnicate x", "unknown command"),
        ("post ghost paper-z", "unknown account"),
        ("post author paper-a", "reused"),
        ("review reviewer paper-zz 50", "unknown paper"),
        ("score r1 paper-a r2 50", "no review"),
        ("review reviewer paper-a", "expected:"),
        ("review miner paper-a eleven", "not a number"),
        ('post author "unterminated', "quotation"),
    ],
)
def test_scenario_errors_carry_line_numbers(line, fragment):
    lines = DEMO + [line]
    with pytest.raises(ScenarioParseError) as info:
        run_scenario(lines, demo_params())
    assert fragment in str(info.value)
    assert info.value.line_no == len(lines)


def test_scenario_wraps_rule_violations():
    lines = DEMO + ["review author paper-a 99"]  # self-review
    with pytest.raises(ScenarioParseError) as info:
        run_scenario(lines, demo_params())
    assert info.value.line_no == len(lines)


def test_empty_scenario_is_fine():
    result = run_scenario(["# nothing but commentary", ""])
    assert result.ledger.minted == 0


def test_settlement_and_balance_reports():
    result = run_scenario(DEMO, demo_params())
    settle, balances = io.StringIO(), io.StringIO()
    write_settlement_csv(result, settle)
    write_balances_csv(result, balances)
    assert settle.getvalue().splitlines()[0] == "block,account,reason,amount"
    lines = balances.getvalue().splitlines()
    assert lines[0] == "account,balance"
    assert lines[1].startswith("author,")
    assert lines[-2].startswith("pool,")
    assert lines[-1].startswith("burned,")
    assert "reviewer,reviewer_reward," in settle.getvalue()


# command line


def test_cli_sweep_writes_csv(tmp_path):
    spec_file = tmp_path / "spec.toml"
    spec_file.write_text(
        "strategy = 1\nn_reviews = 30\nscore_variance = 0.0\n"
        "n_malicious = [0, 30]\nreaders_per_review = [10]\nreplications = 2\n"
    )
    out = tmp_path / "rows.csv"
    assert main(["sweep", "--spec", str(spec_file), "--out", str(out)]) == 0
    lines = out.read_text().splitlines()
    assert len(lines) == 3
    assert lines[1].endswith(",2,40.00000000,0.00000000,40.00000000")


def test_cli_sweep_overrides(tmp_path, capsys):
    spec_file = tmp_path / "spec.toml"
    spec_file.write_text(
        "strategy = 1\nn_reviews = 30\nscore_variance = 0.0\n"
        "n_malicious = [0]\nreaders_per_review = [10]\nreplications = 2\n"
    )
    assert main(["sweep", "--spec", str(spec_file), "--replications", "5",
                 "--seed", "9"]) == 0
    assert ",5,40.00000000," in capsys.readouterr().out


def test_cli_economy_end_to_end(tmp_path, capsys):
    scenario = tmp_path / "scenario.txt"
    scenario.write_text("\n".join(DEMO) + "\n")
    params = tmp_path / "params.toml"
    params.write_text("min_reader_scores = 2\nreward_window = 3\n")
    out = tmp_path / "settlement.csv"
    store = tmp_path / "blobs"
    code = main(["economy", "--scenario", str(scenario), "--params", str(params),
                 "--out", str(out), "--store", str(store)])
    assert code == 0
    assert out.read_text().startswith("block,account,reason,amount")
    printed = capsys.readouterr().out
    assert printed.startswith("account,balance")
    assert "author,40.0" in printed
    assert any(store.iterdir())  # manuscripts landed in the blob store


def test_cli_economy_bad_scenario_exit_1(tmp_path, capsys):
    scenario = tmp_path / "scenario.txt"
    scenario.write_text("register a\nfrobnicate\n")
    assert main(["economy", "--scenario", str(scenario)]) == 1
    assert "line 2" in capsys.readouterr().err


def test_cli_missing_files_exit_1(tmp_path, capsys):
    assert main(["sweep", "--spec", str(tmp_path / "absent.toml")]) == 1
    assert "absent.toml" in capsys.readouterr().err
    assert main(["economy", "--scenario", str(tmp_path / "absent.txt")]) == 1
    assert "absent.txt" in capsys.readouterr().err


def test_cli_bad_toml_exit_1(tmp_path, capsys):
    spec_file = tmp_path / "broken.toml"
    spec_file.write_text("strategy = [unclosed\n")
    assert main(["sweep", "--spec", str(spec_file)]) == 1
    assert "broken.toml" in capsys.readouterr().err


def test_cli_usage_errors_exit_1(capsys):
    with pytest.raises(SystemExit) as info:
        main(["sweep", "--no-such-flag"])
    assert info.value.code == 1
    with pytest.raises(SystemExit) as info:
        main(["frobnicate"])
    assert info.value.code == 1
    capsys.readouterr()


def test_cli_selftest_passes(capsys):
    assert main(["selftest"]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out
    assert out.count("PASS") >= 9


def test_cli_selftest_failure_exit_2(monkeypatch, capsys):
    from pubchain.harness import selftest as mod

    def broken(seed=0):
        return [mod.CheckResult("rigged", False, "synthetic failure")]

    monkeypatch.setattr("pubchain.harness.cli.run_selftest", broken)
    assert main(["selftest"]) == 2
    assert "FAIL  rigged" in capsys.readouterr().out
