import math

import pytest

from nonclassical import cli
from nonclassical.measures import fock_coherent_overlap
from nonclassical.states import load_density_matrix
from nonclassical.sweep import ConfigError, config_from_text, run_sweep, validate_config


def write(tmp_path, text, name="run.cfg"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_minimal_config_defaults(tmp_path):
    cfg = validate_config(write(tmp_path, "scenario = static_measures\nn_max = 3\n"))
    assert cfg.n_range == (0, 3)
    assert cfg.gamma_t == (0.0,) and cfg.N == (0.0,)
    assert cfg.measures == ("hillery", "bures", "dodonov", "negativity")
    assert cfg.families == ("coherent", "thermal", "rho_nu_plus")
    assert cfg.truncation == 13
    assert cfg.budget == 500


def test_lists_from_repeated_keys():
    cfg = config_from_text("scenario = zero_temp_dynamics\nn_max = 4\ngamma_t = 0.05\ngamma_t = 0.15, 0.3\n")
    assert cfg.gamma_t == (0.05, 0.15, 0.3)
    assert cfg.n_range == (1, 4)


def test_missing_N_is_named(tmp_path):
    with pytest.raises(ConfigError) as exc:
        validate_config(write(tmp_path, "scenario = finite_temp_negativity\nn_max = 5\ngamma_t = 0\n"))
    assert any("'N'" in e for e in exc.value.errors)


def test_truncation_violation_lists_numbers(tmp_path):
    with pytest.raises(ConfigError) as exc:
        validate_config(write(tmp_path, "scenario = static_measures\nn_max = 12\ntruncation = 15\n"))
    (msg,) = exc.value.errors
    assert "15" in msg and "22" in msg and "12" in msg


def test_all_errors_reported_with_locations(tmp_path):
    text = "scenario = finite_temp_negativity\nn_max = five\nwat = 1\nmeasure = purity\nno equals sign\n"
    with pytest.raises(ConfigError) as exc:
        validate_config(write(tmp_path, text))
    errs = exc.value.errors
    assert len(errs) >= 5
    assert any(":2:" in e and "n_max" in e for e in errs)
    assert any(":3:" in e and "wat" in e for e in errs)
    assert any(":5:" in e for e in errs)


def test_superposition_truncation_uses_highest_level():
    cfg = config_from_text("scenario = superposition_families\nstate_family = geometric\nn_max = 4\n")
    assert cfg.truncation == 7 + 10
    with pytest.raises(ConfigError):
        config_from_text("scenario = superposition_families\nstate_family = geometric\nn_max = 4\ntruncation = 14\n")


def test_dodonov_sweep_matches_closed_form(tmp_path):
    cfg = config_from_text("scenario = static_measures\nn_max = 10\nmeasure = dodonov\nfamily = coherent\n")
    res = run_sweep(cfg, out=tmp_path / "d.csv")
    for row in res.rows:
        assert float(row[4]) == pytest.approx(fock_coherent_overlap(int(row[1])), abs=1e-3)
    assert "argmin_n = 10" in res.summary()


def test_sweep_deterministic_and_thread_independent(tmp_path):
    text = "scenario = zero_temp_dynamics\nn_max = 5\ngamma_t = 0.1\ngamma_t = 0.3\n"
    cfg = config_from_text(text)
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run_sweep(cfg, threads=1, out=a)
    run_sweep(cfg, threads=3, out=b)
    la, lb = a.read_text().splitlines(), b.read_text().splitlines()
    assert la[0].startswith("# ") and lb[0].startswith("# ")
    assert la[1:] == lb[1:]
    assert la[1] == "measure,n_or_state_id,gamma_t,N,value,converged,evaluations"
    assert [r.split(",")[1] for r in la[2:]] == ["1", "2", "3", "4", "5"] * 2


def test_failed_cells_do_not_stop_sweep(monkeypatch):
    from nonclassical import sweep
    from nonclassical.errors import QuadratureError

    real = sweep.measure

    def flaky(name, rho, fams, config):
        if rho.populations[2] > 0.5:
            raise QuadratureError("boom")
        return real(name, rho, fams, config)

    monkeypatch.setattr(sweep, "measure", flaky)
    res = run_sweep(config_from_text("scenario = static_measures\nn_max = 3\nmeasure = negativity\n"))
    assert [r[5] for r in res.rows] == ["true", "true", "failed", "true"]
    assert math.isnan(float(res.rows[2][4]))
    assert len(res.failures) == 1


def test_cli_evolve_roundtrip(tmp_path):
    out = tmp_path / "rho.txt"
    assert cli.main(["evolve", "--state", "fock:2", "--gamma-t", "0.3", "--N", "0.06", "--out", str(out)]) == 0
    rho = load_density_matrix(out)
    assert rho.trace() == pytest.approx(1, abs=1e-10)
    assert rho.populations[2] < 1


def test_cli_measure(capsys):
    assert cli.main(["measure", "--state", "fock:1", "--measure", "dodonov", "--family", "coherent"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].startswith("dodonov,fock:1,0.0,0.0,0.3678")


def test_cli_sweep_reports_config_errors(tmp_path, capsys):
    cfg = write(tmp_path, "scenario = finite_temp_negativity\nn_max = 3\ngamma_t = 0\n")
    assert cli.main(["sweep", "--config", str(cfg)]) == 2
    assert "'N'" in capsys.readouterr().err


def test_cli_sweep_writes_csv(tmp_path):
    cfg = write(tmp_path, "scenario = finite_temp_negativity\nn_min = 0\nn_max = 3\nN = 0.06\ngamma_t = 0\n")
    out = tmp_path / "o.csv"
    assert cli.main(["sweep", "--config", str(cfg), "--out", str(out), "--threads", "2", "--seed", "7"]) == 0
    assert len(out.read_text().splitlines()) == 2 + 4


def test_cli_rejects_bad_state():
    with pytest.raises(SystemExit):
        cli.main(["evolve", "--state", "banana:3", "--gamma-t", "1"])


def test_selftest_checks_pass():
    assert all(ok for _, ok, _ in cli.selftest_checks())
