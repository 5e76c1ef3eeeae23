import json

import numpy as np
import pytest
from click.testing import CliRunner

from oamfour.cli import main
from oamfour.fock import FockState
from oamfour.modes import MubBasis, dicke_state
from oamfour.correlations import probability_table


@pytest.fixture
def runner():
    return CliRunner()


def test_crystal_command(runner):
    result = runner.invoke(main, ["crystal", "--delta-ng", "0.456", "--pulse-ps", "2"])
    assert result.exit_code == 0
    assert "D = 1.521 ps/mm" in result.output
    assert "L_gv = 1.315 mm" in result.output


def test_crystal_rejects_nonpositive(runner):
    result = runner.invoke(main, ["crystal", "--delta-ng", "-1", "--pulse-ps", "2"])
    assert result.exit_code == 2


def test_state_command(runner, tmp_path):
    out = tmp_path / "state"
    result = runner.invoke(main, ["state", "--lmax", "1", "--order", "2", "-o", str(out)])
    assert result.exit_code == 0
    payload = json.loads((out / "four_photon_state.json").read_text())
    state = FockState.from_json_dict(payload)
    assert state.amplitude((2, 2)) == pytest.approx(1.0, abs=1e-12)
    assert (out / "spdc_state.json").exists()
    assert (out / "run_config.json").exists()


def test_state_order1_writes_pair_state(runner, tmp_path):
    out = tmp_path / "state1"
    result = runner.invoke(main, ["state", "--order", "1", "--lmax", "2", "-o", str(out)])
    assert result.exit_code == 0
    payload = json.loads((out / "two_photon_state.json").read_text())
    state = FockState.from_json_dict(payload)
    # anticorrelated superposition of the two OAM pairs
    assert state.amplitude((1, 0, 0, 1)) == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    assert state.amplitude((0, 1, 1, 0)) == pytest.approx(1 / np.sqrt(2), abs=1e-12)
    assert not (out / "four_photon_state.json").exists()


def test_state_empty_mode_set_fails(runner, tmp_path):
    result = runner.invoke(
        main, ["state", "--lmax", "0", "--no-gaussian", "-o", str(tmp_path)]
    )
    assert result.exit_code == 2


def test_correlations_theory(runner, tmp_path):
    out = tmp_path / "corr"
    result = runner.invoke(main, ["correlations", "--no-figures", "-o", str(out)])
    assert result.exit_code == 0
    tables = json.loads((out / "correlations_theory.json").read_text())
    d = dicke_state(4, 2)
    for basis in MubBasis:
        expected = probability_table(d, basis)
        for setting, value in expected.items():
            assert tables[basis.name][setting] == pytest.approx(value, abs=1e-12)


def test_correlations_noisy_needs_seed(runner, tmp_path, monkeypatch):
    monkeypatch.delenv("OAMFOUR_SEED", raising=False)
    result = runner.invoke(
        main, ["correlations", "--noisy", "--no-figures", "-o", str(tmp_path)]
    )
    assert result.exit_code == 2


def test_correlations_noisy_with_env_seed(runner, tmp_path, monkeypatch):
    monkeypatch.setenv("OAMFOUR_SEED", "31")
    out = tmp_path / "noisy"
    result = runner.invoke(
        main, ["correlations", "--noisy", "--no-figures", "-o", str(out)]
    )
    assert result.exit_code == 0
    noisy = json.loads((out / "correlations_noisy.json").read_text())
    total = sum(noisy["Z_RL"].values())
    assert total == pytest.approx(1.0, abs=1e-9)
    config = json.loads((out / "run_config.json").read_text())
    assert config["parameters"]["seed"] == 31


def test_correlations_pure_white_noise_gives_flat_tables(runner, tmp_path):
    out = tmp_path / "flat"
    result = runner.invoke(
        main,
        [
            "correlations", "--noisy", "--white-noise", "1.0",
            "--background-fraction", "0.0", "--misalignment-sigma", "0.0",
            "--seed", "1", "--no-figures", "-o", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    noisy = json.loads((out / "correlations_noisy.json").read_text())
    for table in noisy.values():
        for value in table.values():
            assert value == pytest.approx(1 / 16, abs=1e-12)


def test_reproduce_fig3_byte_identical(runner, tmp_path):
    outs = [tmp_path / name for name in ("r1", "r2")]
    for out in outs:
        result = runner.invoke(
            main, ["reproduce", "fig3", "--seed", "23", "--no-figures", "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
    for name in ("correlations_theory.json", "correlations_noisy.json", "run_config.json"):
        assert (outs[0] / name).read_bytes() == (outs[1] / name).read_bytes()


def test_powerscan_reproducible(runner, tmp_path):
    out_a, out_b, out_c = (tmp_path / n for n in ("a", "b", "c"))
    for out in (out_a, out_b):
        result = runner.invoke(
            main, ["powerscan", "--seed", "17", "--no-figures", "-o", str(out)]
        )
        assert result.exit_code == 0
    assert (out_a / "powerscan.csv").read_bytes() == (out_b / "powerscan.csv").read_bytes()
    assert (out_a / "powerscan_fit.json").read_bytes() == (
        out_b / "powerscan_fit.json"
    ).read_bytes()
    result = runner.invoke(
        main, ["powerscan", "--seed", "18", "--no-figures", "-o", str(out_c)]
    )
    assert result.exit_code == 0
    assert (out_a / "powerscan.csv").read_bytes() != (out_c / "powerscan.csv").read_bytes()


def test_tomo_and_witness_chain(runner, tmp_path):
    out = tmp_path / "tomo"
    result = runner.invoke(
        main,
        [
            "tomo", "--noise", "ideal", "--rate-scale", "2.0", "--duration", "60",
            "--seed", "3", "--no-figures", "-o", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    metrics = json.loads((out / "tomography_metrics.json").read_text())
    assert metrics["fidelity_to_dicke"] > 0.9

    wout = tmp_path / "wit"
    result = runner.invoke(
        main,
        [
            "witness", "--rho", str(out / "density_matrix.json"),
            "--optimize", "none", "-o", str(wout),
        ],
    )
    assert result.exit_code == 0, result.output
    reports = json.loads((wout / "witness_reports.json").read_text())
    assert reports["collective_spin"]["value"] > 5.5
    assert reports["i24"]["verdict"] == "GME"


def test_tomo_replays_counts_csv(runner, tmp_path):
    out = tmp_path / "sim"
    result = runner.invoke(
        main,
        [
            "tomo", "--noise", "ideal", "--rate-scale", "1.0", "--duration", "30",
            "--seed", "4", "--no-figures", "-o", str(out),
        ],
    )
    assert result.exit_code == 0, result.output
    replay = tmp_path / "replay"
    result = runner.invoke(
        main,
        [
            "tomo", "--counts", str(out / "tomography_counts.csv"),
            "--seed", "4", "--no-figures", "-o", str(replay),
        ],
    )
    assert result.exit_code == 0, result.output
    rho_a = json.loads((out / "density_matrix.json").read_text())
    rho_b = json.loads((replay / "density_matrix.json").read_text())
    np.testing.assert_allclose(np.array(rho_a["re"]), np.array(rho_b["re"]), atol=1e-12)


def test_reproduce_fig2_and_fig3(runner, tmp_path):
    out2 = tmp_path / "fig2"
    result = runner.invoke(main, ["reproduce", "fig2", "--seed", "11", "-o", str(out2)])
    assert result.exit_code == 0, result.output
    assert (out2 / "powerscan.csv").exists()
    assert (out2 / "powerscan.png").exists()
    fit = json.loads((out2 / "powerscan_fit.json").read_text())
    assert abs(fit["singles_exponent"] - 1.0) < 0.05
    assert abs(fit["fourfold_exponent"] - 2.0) < 0.05
    assert abs(fit["delayed_ratio"] - 0.10) < 0.02

    out3 = tmp_path / "fig3"
    result = runner.invoke(
        main, ["reproduce", "fig3", "--seed", "11", "--no-figures", "-o", str(out3)]
    )
    assert result.exit_code == 0, result.output
    theory = json.loads((out3 / "correlations_theory.json").read_text())
    assert theory["X_HV"]["HHHH"] == pytest.approx(3 / 8, abs=1e-12)


def test_config_file_supplies_defaults(runner, tmp_path):
    config = tmp_path / "config.json"
    config.write_text(json.dumps({"crystal": {"delta_ng": 0.456, "pulse_ps": 2.0}}))
    result = runner.invoke(main, ["--config", str(config), "crystal"])
    assert result.exit_code == 0
    assert "L_gv = 1.315 mm" in result.output
