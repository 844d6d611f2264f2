import pytest

from gmudgame import cli
from gmudgame.config import ConfigError, PRESETS, parse_config, preset_config
from gmudgame.experiment import read_results


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write(tmp_path, text, name="s.cfg"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_enumerate_three(capsys):
    code, out, _ = run(["enumerate", "--players", "3"], capsys)
    assert code == 0
    assert out.splitlines() == ["123", "12|3", "13|2", "1|23", "1|2|3", "count: 5"]


def test_enumerate_one_and_four(capsys):
    assert run(["enumerate", "--players", "1"], capsys)[1].splitlines() == ["1", "count: 1"]
    lines = run(["enumerate", "--players", "4"], capsys)[1].splitlines()
    assert len(lines) == 16 and lines[-1] == "count: 15"


@pytest.mark.parametrize("n", ["0", "13"])
def test_enumerate_out_of_range(n, capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["enumerate", "--players", n])
    assert exc.value.code != 0
    assert "--players" in capsys.readouterr().err


def test_stability_default_single_bs(tmp_path, capsys):
    cfg = write(tmp_path, "scenario = single_bs\nsystem.snr_db = 27\n")
    code, out, _ = run(["stability", "--config", cfg], capsys)
    assert code == 0
    assert "core: 123\n" in out
    assert "stable (individually rational, group rational, in core): 123" in out
    assert "12|3: {123} deviates" in out


def test_stability_single_user(tmp_path, capsys):
    cfg = write(tmp_path, "scenario = custom\nstation.A = 0 0\nuser.1 = 100 0 A\n")
    code, out, _ = run(["stability", "--config", cfg], capsys)
    assert code == 0
    assert "core: 1\n" in out


def test_stability_writes_csv(tmp_path, capsys):
    cfg = write(tmp_path, "scenario = two_bs\nstructures = 1234 1|2|3|4\n")
    out_csv = tmp_path / "st.csv"
    code, out, _ = run(["stability", "--config", cfg, "--out", str(out_csv)], capsys)
    assert code == 0
    _, rows = read_results(str(out_csv))
    assert {r["structure_label"] for r in rows} == {"1234", "1|2|3|4"}
    assert {r["sweep_value"] for r in rows} == {"27.0"}


def test_rho_one_rejected(tmp_path, capsys):
    cfg = write(tmp_path, "scenario = single_bs\n\nsystem.rho = 1.0\n")
    code, _, err = run(["stability", "--config", cfg], capsys)
    assert code == 1
    assert "rho must be in [0,1)" in err
    assert "key 'system.rho'" in err and "s.cfg:3" in err


@pytest.mark.parametrize("text, key", [
    ("fading.mu = -2\n", "fading.mu"),
    ("fading.sigma_s_db = x\n", "fading.sigma_s_db"),
    ("mc_runs = 0\n", "mc_runs"),
    ("seed = -1\n", "seed"),
    ("scenario = ring\n", "scenario"),
    ("geometry.distances = 10 0\n", "geometry.distances"),
    ("structures = 12|34\n", "structures"),
    ("sweep.variable = power\nsweep.values = 1\n", "sweep.variable"),
    ("sweep.variable = mu\nsweep.values = 1 1\n", "sweep.values"),
    ("sweep.start = 1\n", "sweep.variable"),
    ("bogus.key = 1\n", "bogus.key"),
    ("system.rho = 0.1\nsystem.rho = 0.2\n", "system.rho"),
    ("scenario = custom\nstation.A = 0 0\nuser.1 = 0 0 A\n", "user.1"),
])
def test_config_errors_name_the_key(text, key):
    with pytest.raises(ConfigError, match=f"key '{key}'"):
        parse_config(text, "t.cfg")


def test_malformed_line():
    with pytest.raises(ConfigError, match="t.cfg:2"):
        parse_config("seed = 1\nno equals sign\n", "t.cfg")


def test_missing_config_file(tmp_path, capsys):
    code, _, err = run(["stability", "--config", str(tmp_path / "nope.cfg")], capsys)
    assert code == 1 and "error" in err


def test_custom_scenario_parsing():
    cfg = parse_config("""
        scenario = custom
        station.A = 0 0
        station.B = 1000 0
        user.2 = 50 0 A
        user.1 = 60 10 A
        user.10 = 900 0 B
        system.snr_db = 10
    """)
    sc = cfg.scenario
    assert [u.id for u in sc.users] == [1, 2, 10]
    assert [s.id for s in sc.stations] == ["A", "B"]
    assert cfg.snr_db == 10
    assert sc.system.tx_power == pytest.approx(10.0)


def test_sweep_requires_output(tmp_path, capsys):
    cfg = write(tmp_path, "sweep.variable = snr_db\nsweep.values = 0 10\n")
    code, _, err = run(["sweep", "--config", cfg], capsys)
    assert code == 1 and "output" in err


def test_sweep_command(tmp_path, capsys):
    out_csv = tmp_path / "out.csv"
    cfg = write(tmp_path, f"sweep.variable = snr_db\nsweep.values = -10 0 10\noutput = {out_csv}\n")
    code, out, _ = run(["sweep", "--config", cfg], capsys)
    assert code == 0
    assert f"wrote {out_csv}" in out
    assert "snr_db = -10: max group payoff" in out and "snr_db = 10: max group payoff" in out
    meta, rows = read_results(str(out_csv))
    assert {r["sweep_value"] for r in rows} == {"-10.0", "0.0", "10.0"}


@pytest.mark.parametrize("name, variable, lo, hi, n_structures, n_stations", [
    ("fig2", "snr_db", -40.0, 40.0, 5, 1),
    ("fig4", "mu", 0.5, 8.0, 5, 1),
    ("fig5", "snr_db", -60.0, 20.0, 4, 2),
])
def test_presets(tmp_path, capsys, name, variable, lo, hi, n_structures, n_stations):
    out_csv = tmp_path / f"{name}.csv"
    code, _, _ = run(["preset", "--name", name, "--out", str(out_csv)], capsys)
    assert code == 0
    _, rows = read_results(str(out_csv))
    values = sorted({float(r["sweep_value"]) for r in rows})
    assert {r["sweep_variable"] for r in rows} == {variable}
    assert (values[0], values[-1]) == (lo, hi)
    assert len({r["structure_label"] for r in rows}) == n_structures
    assert len({r["station_id"] for r in rows}) == n_stations


def test_preset_seed_override():
    assert preset_config("fig3", seed=11).scenario.seed == 11
    assert preset_config("fig3").scenario.mc_runs == 10
    with pytest.raises(ConfigError):
        preset_config("fig9")


def test_all_presets_parse():
    for name in PRESETS:
        cfg = preset_config(name)
        assert cfg.sweep is not None


def test_rerun_is_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        assert run(["preset", "--name", "fig3", "--out", str(path), "--seed", "4"], capsys)[0] == 0
    assert a.read_bytes() == b.read_bytes()
