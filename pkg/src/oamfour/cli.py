"""Command line interface tying the simulation pipeline together.

Every randomized command needs an explicit --seed (or the OAMFOUR_SEED
environment variable); identical configuration and seed reproduce the
output files byte for byte.  Exit codes: 0 success, 2 validation error,
3 numerical failure.
"""

from __future__ import annotations

import dataclasses
import functools
import json
import os
import sys
from pathlib import Path

import click
import numpy as np

from .correlations import (
    DEFAULT_NOISE,
    CountRecord,
    NoiseModel,
    PowerScanConfig,
    apply_noise,
    counts_from_csv,
    counts_to_csv,
    power_scan,
    probability_table,
)
from .crystal import walkoff_report
from .figures import (
    save_correlation_figure,
    save_density_matrix_figure,
    save_power_scan_figure,
)
from .modes import MubBasis, dicke_state
from .pipeline import (
    DEFAULT_DURATION_S,
    DEFAULT_RATE_SCALE_HZ,
    ideal_detector_state,
    run_pipeline,
    simulate_detected_state,
)
from .spdc import SpdcParams, expand_vacuum, four_photon_state
from .tomography import (
    CUSTOM,
    MleOptions,
    TomographyDataset,
    density_matrix_from_json_dict,
    fidelity,
    purity,
    reconstruct_mle,
)
from .witnesses import (
    WITNESS_IDS,
    collective_spin_witness,
    fidelity_witness_dicke,
    i24_witness,
    optimize_witness,
)

ENV_SEED = "OAMFOUR_SEED"


def _guarded(fn):
    """Map exceptions onto the documented exit codes."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except (np.linalg.LinAlgError, ArithmeticError) as exc:
            click.echo(f"numerical failure: {exc}", err=True)
            sys.exit(3)
        except (ValueError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    return wrapper


def _resolve_seed(seed):
    if seed is not None:
        return int(seed)
    env = os.environ.get(ENV_SEED)
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise click.UsageError(f"{ENV_SEED}={env!r} is not an integer")
    raise click.UsageError(
        f"this command is randomized: pass --seed or set {ENV_SEED}"
    )


def _ensure_dir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_json(path, payload) -> None:
    with open(path, "w") as handle:
        json.dump(payload, handle, indent=2, sort_keys=True)
        handle.write("\n")


def _write_run_config(outdir: Path, command: str, parameters: dict) -> None:
    _write_json(outdir / "run_config.json", {"command": command, "parameters": parameters})


@click.group()
@click.option(
    "--config",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSON file with per-command default parameters.",
)
@click.pass_context
def main(ctx, config):
    """Four-photon OAM entanglement: simulation, tomography and witnesses."""
    if config:
        with open(config) as handle:
            ctx.default_map = json.load(handle)


# ---------------------------------------------------------------------------
# state
# ---------------------------------------------------------------------------


@main.command()
@click.option("--gain", type=float, default=0.1, show_default=True)
@click.option("--lmax", type=int, default=1, show_default=True)
@click.option("--order", type=int, default=2, show_default=True)
@click.option("--gaussian/--no-gaussian", default=False, show_default=True)
@click.option("-o", "--output-dir", type=click.Path(file_okay=False), default=".")
@_guarded
def state(gain, lmax, order, gaussian, output_dir):
    """Write the expanded source state and its photon-number sectors (JSON)."""
    params = SpdcParams(gain=gain, lmax=lmax, include_gaussian=gaussian, order=order)
    outdir = _ensure_dir(output_dir)
    full = expand_vacuum(params)
    _write_json(outdir / "spdc_state.json", full.to_json_dict())
    written = ["spdc_state.json"]
    two = full.project_photon_number(2)
    if not two.is_zero():
        _write_json(outdir / "two_photon_state.json", two.normalize().to_json_dict())
        written.append("two_photon_state.json")
    if order >= 2:
        _write_json(
            outdir / "four_photon_state.json", four_photon_state(params).to_json_dict()
        )
        written.append("four_photon_state.json")
    _write_run_config(
        outdir,
        "state",
        {"gain": gain, "lmax": lmax, "order": order, "gaussian": gaussian},
    )
    click.echo(f"wrote {', '.join(written)} to {outdir}")


# ---------------------------------------------------------------------------
# correlations
# ---------------------------------------------------------------------------


def _all_tables(state_or_rho) -> dict:
    return {b.name: probability_table(state_or_rho, b) for b in MubBasis}


@main.command()
@click.option("--noisy/--theory-only", default=False, show_default=True)
@click.option(
    "--background-fraction", type=float, default=DEFAULT_NOISE.background_fraction,
    show_default=True,
)
@click.option("--white-noise", type=float, default=DEFAULT_NOISE.white_noise, show_default=True)
@click.option(
    "--misalignment-sigma", type=float, default=DEFAULT_NOISE.misalignment_sigma,
    show_default=True,
)
@click.option("--seed", type=int, default=None, help="alignment session seed (noisy mode)")
@click.option("--figures/--no-figures", default=True, show_default=True)
@click.option("-o", "--output-dir", type=click.Path(file_okay=False), default=".")
@_guarded
def correlations(
    noisy, background_fraction, white_noise, misalignment_sigma, seed, figures, output_dir
):
    """Joint detection probability tables in the three mutually unbiased bases."""
    outdir = _ensure_dir(output_dir)
    psi = ideal_detector_state()
    theory = _all_tables(psi)
    _write_json(outdir / "correlations_theory.json", theory)
    written = ["correlations_theory.json"]
    simulated = None
    run_params = {
        "noisy": noisy,
        "figures": figures,
    }
    if noisy:
        seed = _resolve_seed(seed)
        noise = NoiseModel(
            background_fraction=background_fraction,
            white_noise=white_noise,
            misalignment_sigma=misalignment_sigma,
            seed=seed,
        )
        simulated = _all_tables(apply_noise(psi, noise))
        _write_json(outdir / "correlations_noisy.json", simulated)
        written.append("correlations_noisy.json")
        run_params.update(
            background_fraction=background_fraction,
            white_noise=white_noise,
            misalignment_sigma=misalignment_sigma,
            seed=seed,
        )
    if figures:
        save_correlation_figure(theory, simulated, outdir / "correlations.png")
        written.append("correlations.png")
    _write_run_config(outdir, "correlations", run_params)
    click.echo(f"wrote {', '.join(written)} to {outdir}")


# ---------------------------------------------------------------------------
# power scan
# ---------------------------------------------------------------------------


@main.command()
@click.option(
    "--powers", default="10,14,19.5,27,37,51,70", show_default=True,
    help="comma-separated pump powers (mW)",
)
@click.option("--duration", type=float, default=300.0, show_default=True)
@click.option("--singles-per-mw", type=float, default=400.0, show_default=True)
@click.option("--fourfold-per-mw2", type=float, default=0.05, show_default=True)
@click.option("--background-fraction", type=float, default=0.10, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--figures/--no-figures", default=True, show_default=True)
@click.option("-o", "--output-dir", type=click.Path(file_okay=False), default=".")
@_guarded
def powerscan(
    powers, duration, singles_per_mw, fourfold_per_mw2, background_fraction,
    seed, figures, output_dir,
):
    """Singles and four-fold rates vs pump power, with fitted exponents."""
    seed = _resolve_seed(seed)
    outdir = _ensure_dir(output_dir)
    config = PowerScanConfig(
        powers_mw=tuple(float(p) for p in powers.split(",")),
        duration_s=duration,
        singles_per_mw_hz=singles_per_mw,
        fourfold_per_mw2_hz=fourfold_per_mw2,
        background_fraction=background_fraction,
    )
    result = power_scan(config, seed)
    result.to_csv(outdir / "powerscan.csv")
    _write_json(outdir / "powerscan_fit.json", result.fit_dict())
    written = ["powerscan.csv", "powerscan_fit.json"]
    if figures:
        save_power_scan_figure(result, outdir / "powerscan.png")
        written.append("powerscan.png")
    _write_run_config(
        outdir,
        "powerscan",
        {**dataclasses.asdict(config), "powers_mw": list(config.powers_mw), "seed": seed},
    )
    click.echo(
        f"wrote {', '.join(written)} to {outdir} "
        f"(exponents {result.singles_exponent:.3f}, {result.fourfold_exponent:.3f}; "
        f"delayed ratio {result.delayed_ratio:.3f})"
    )


# ---------------------------------------------------------------------------
# tomography
# ---------------------------------------------------------------------------


def _noise_for_preset(preset: str, seed: int):
    if preset == "ideal":
        return None
    return dataclasses.replace(DEFAULT_NOISE, seed=seed)


@main.command()
@click.option(
    "--counts", "counts_csv", type=click.Path(exists=True, dir_okay=False), default=None,
    help="replay an existing counts CSV instead of simulating",
)
@click.option(
    "--noise", "noise_preset", type=click.Choice(["default", "ideal"]),
    default="default", show_default=True,
)
@click.option("--rate-scale", type=float, default=DEFAULT_RATE_SCALE_HZ, show_default=True)
@click.option("--duration", type=float, default=DEFAULT_DURATION_S, show_default=True)
@click.option("--restarts", type=int, default=1, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("--figures/--no-figures", default=True, show_default=True)
@click.option("-o", "--output-dir", type=click.Path(file_okay=False), default=".")
@_guarded
def tomo(counts_csv, noise_preset, rate_scale, duration, restarts, seed, figures, output_dir):
    """Simulate (or replay) tomography counts and reconstruct the density matrix."""
    seed = _resolve_seed(seed)
    outdir = _ensure_dir(output_dir)
    written = []
    if counts_csv:
        records = counts_from_csv(counts_csv)
        dataset = TomographyDataset.from_records(records, projector_set_id=CUSTOM)
    else:
        noise = _noise_for_preset(noise_preset, seed)
        rho_true = simulate_detected_state(noise)
        dataset = TomographyDataset.sampled(rho_true, rate_scale, duration, seed)
        # re-emit the sampled dataset so the run can be replayed
        counts_to_csv(
            [
                CountRecord(setting=s, duration=float(d), count=int(c))
                for s, d, c in zip(dataset.settings, dataset.durations, dataset.counts)
            ],
            outdir / "tomography_counts.csv",
        )
        written.append("tomography_counts.csv")
    result = reconstruct_mle(dataset, MleOptions(seed=seed, restarts=restarts))
    _write_json(outdir / "density_matrix.json", result.to_json_dict())
    written.append("density_matrix.json")
    target = dicke_state(4, 2)
    metrics = {
        "fidelity_to_dicke": fidelity(result.rho, np.outer(target, target.conj())),
        "purity": purity(result.rho),
        "log_likelihood": result.log_likelihood,
        "iterations": result.iterations,
        "converged": result.converged,
    }
    _write_json(outdir / "tomography_metrics.json", metrics)
    written.append("tomography_metrics.json")
    if figures:
        save_density_matrix_figure(result.rho, outdir / "density_matrix.png")
        written.append("density_matrix.png")
    _write_run_config(
        outdir,
        "tomo",
        {
            "counts": counts_csv,
            "noise": noise_preset,
            "rate_scale": rate_scale,
            "duration": duration,
            "restarts": restarts,
            "seed": seed,
        },
    )
    click.echo(
        f"wrote {', '.join(written)} to {outdir} "
        f"(fidelity to Dicke {metrics['fidelity_to_dicke']:.4f})"
    )


# ---------------------------------------------------------------------------
# witnesses
# ---------------------------------------------------------------------------


@main.command()
@click.option(
    "--rho", "rho_json", type=click.Path(exists=True, dir_okay=False), required=True,
    help="density matrix JSON as written by the tomo command",
)
@click.option(
    "--optimize", "optimize_mode", type=click.Choice(["i24", "all", "none"]),
    default="i24", show_default=True,
)
@click.option("--starts", type=int, default=32, show_default=True)
@click.option("--seed", type=int, default=None)
@click.option("-o", "--output-dir", type=click.Path(file_okay=False), default=".")
@_guarded
def witness(rho_json, optimize_mode, starts, seed, output_dir):
    """Evaluate the entanglement witnesses on a reconstructed density matrix."""
    outdir = _ensure_dir(output_dir)
    with open(rho_json) as handle:
        rho = density_matrix_from_json_dict(json.load(handle))
    reports = {
        "collective_spin": collective_spin_witness(rho),
        "fidelity_dicke": fidelity_witness_dicke(rho),
        "i24": i24_witness(rho),
    }
    if optimize_mode != "none":
        seed = _resolve_seed(seed)
        targets = WITNESS_IDS if optimize_mode == "all" else ("i24",)
        for wid in targets:
            reports[f"{wid}_optimized"] = optimize_witness(
                rho, wid, n_starts=starts, seed=seed
            )
    payload = {key: rep.to_json_dict() for key, rep in reports.items()}
    _write_json(outdir / "witness_reports.json", payload)
    _write_run_config(
        outdir,
        "witness",
        {"rho": str(rho_json), "optimize": optimize_mode, "starts": starts, "seed": seed},
    )
    summary = ", ".join(f"{k}={rep.value:.3f} ({rep.verdict})" for k, rep in reports.items())
    click.echo(f"wrote witness_reports.json to {outdir}: {summary}")


# ---------------------------------------------------------------------------
# crystal utility
# ---------------------------------------------------------------------------


@main.command()
@click.option("--delta-ng", type=float, required=True, help="group index difference")
@click.option("--pulse-ps", type=float, required=True, help="pulse duration (ps)")
@click.option("-o", "--output-dir", type=click.Path(file_okay=False), default=None)
@_guarded
def crystal(delta_ng, pulse_ps, output_dir):
    """Group-velocity dispersion and walk-off length of the crystal."""
    report = walkoff_report(delta_ng, pulse_ps)
    if output_dir is not None:
        outdir = _ensure_dir(output_dir)
        _write_json(outdir / "crystal.json", report.to_json_dict())
        _write_run_config(
            outdir, "crystal", {"delta_ng": delta_ng, "pulse_ps": pulse_ps}
        )
    click.echo(
        f"D = {report.dispersion_ps_per_mm:.3f} ps/mm, "
        f"L_gv = {report.walkoff_length_mm:.3f} mm"
    )


# ---------------------------------------------------------------------------
# reproduce presets
# ---------------------------------------------------------------------------


@main.command()
@click.argument("preset", type=click.Choice(["fig2", "fig3", "fig4", "witnesses"]))
@click.option("--seed", type=int, default=None)
@click.option("--starts", type=int, default=12, show_default=True,
              help="optimizer starts (witnesses preset)")
@click.option("--figures/--no-figures", default=True, show_default=True)
@click.option("-o", "--output-dir", type=click.Path(file_okay=False), default=None)
@_guarded
def reproduce(preset, seed, starts, figures, output_dir):
    """Run a full preset chain with no manual intermediate steps."""
    seed = _resolve_seed(seed)
    outdir = _ensure_dir(output_dir or f"reproduce_{preset}")

    if preset == "fig2":
        result = power_scan(PowerScanConfig(), seed)
        result.to_csv(outdir / "powerscan.csv")
        _write_json(outdir / "powerscan_fit.json", result.fit_dict())
        if figures:
            save_power_scan_figure(result, outdir / "powerscan.png")

    elif preset == "fig3":
        psi = ideal_detector_state()
        theory = _all_tables(psi)
        noise = dataclasses.replace(DEFAULT_NOISE, seed=seed)
        simulated = _all_tables(apply_noise(psi, noise))
        _write_json(outdir / "correlations_theory.json", theory)
        _write_json(outdir / "correlations_noisy.json", simulated)
        if figures:
            save_correlation_figure(theory, simulated, outdir / "correlations.png")

    elif preset == "fig4":
        noise = dataclasses.replace(DEFAULT_NOISE, seed=seed)
        rho_true = simulate_detected_state(noise)
        dataset = TomographyDataset.sampled(
            rho_true, DEFAULT_RATE_SCALE_HZ, DEFAULT_DURATION_S, seed
        )
        result = reconstruct_mle(dataset, MleOptions(seed=seed))
        _write_json(outdir / "density_matrix.json", result.to_json_dict())
        target = dicke_state(4, 2)
        rho_target = np.outer(target, target.conj())
        _write_json(
            outdir / "tomography_metrics.json",
            {
                "fidelity_to_dicke": fidelity(result.rho, rho_target),
                "purity": purity(result.rho),
                "log_likelihood": result.log_likelihood,
            },
        )
        if figures:
            save_density_matrix_figure(result.rho, outdir / "density_matrix.png")
            save_density_matrix_figure(rho_target, outdir / "density_matrix_theory.png")

    else:  # witnesses
        noise = dataclasses.replace(DEFAULT_NOISE, seed=seed)
        chain = run_pipeline(noise, seed, optimize_starts=starts)
        _write_json(
            outdir / "witness_reports.json",
            {key: rep.to_json_dict() for key, rep in chain.reports.items()},
        )
        _write_json(outdir / "density_matrix.json", chain.mle.to_json_dict())
        if figures:
            save_density_matrix_figure(chain.rho, outdir / "density_matrix.png")

    _write_run_config(
        outdir,
        f"reproduce {preset}",
        {"seed": seed, "starts": starts, "figures": figures},
    )
    click.echo(f"reproduce {preset}: outputs in {outdir}")
