"""Joint detection probabilities, noise model and synthetic count generation.

Measurement settings are 4-letter strings over {R, L, H, V, D, A} (one
projector per detector arm); the Gaussian letter G is accepted only in the
rate-scan path, never for qubit projections.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

import numpy as np

from .modes import MODE_KETS, N_ARMS, MubBasis, two_pair_component

QUBIT_LETTERS = frozenset(MODE_KETS)

ARM_PAIRINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))


def validate_setting(setting: str, allow_gaussian: bool = False) -> str:
    letters = QUBIT_LETTERS | ({"G"} if allow_gaussian else set())
    if len(setting) != N_ARMS or any(c not in letters for c in setting):
        raise ValueError(
            f"setting {setting!r} is not a 4-letter combination of {sorted(letters)}"
        )
    return setting


def setting_ket(setting: str) -> np.ndarray:
    """Four-qubit product ket of a measurement setting."""
    validate_setting(setting)
    ket = np.array([1.0], dtype=complex)
    for letter in setting:
        ket = np.kron(ket, MODE_KETS[letter])
    return ket


def basis_settings(basis: MubBasis) -> List[str]:
    """The sixteen settings of one basis, first arm as most significant bit."""
    a, b = basis.letters
    return ["".join(combo) for combo in itertools.product((a, b), repeat=N_ARMS)]


def _as_density_matrix(state: np.ndarray) -> np.ndarray:
    state = np.asarray(state)
    if state.ndim == 1:
        return np.outer(state, state.conj())
    if state.shape != (16, 16):
        raise ValueError(f"expected a 16-vector or 16x16 matrix, got {state.shape}")
    return state


def joint_probability(state: np.ndarray, setting: str) -> float:
    """Tr[rho . P1 x P2 x P3 x P4] for one projector per arm."""
    ket = setting_ket(setting)
    rho = _as_density_matrix(state)
    return float(np.real(ket.conj() @ rho @ ket))


def probability_table(state: np.ndarray, basis: MubBasis) -> Dict[str, float]:
    """All sixteen joint probabilities of one basis, keyed by setting."""
    rho = _as_density_matrix(state)
    return {s: float(np.real(setting_ket(s).conj() @ rho @ setting_ket(s)))
            for s in basis_settings(basis)}


# ---------------------------------------------------------------------------
# noise model
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class NoiseModel:
    """Detection noise: uncorrelated double pairs, white noise, misalignment.

    background_fraction: weight of two independent pairs landing in one
        coincidence window (equal mixture over the three arm pairings).
    white_noise: weight of the maximally mixed state.
    misalignment_sigma: std dev (radians) of one small random rotation per
        arm, drawn once per alignment session from `seed`.
    """

    background_fraction: float = 0.0
    white_noise: float = 0.0
    misalignment_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.background_fraction <= 1.0:
            raise ValueError("background_fraction must be in [0, 1]")
        if not 0.0 <= self.white_noise <= 1.0:
            raise ValueError("white_noise must be in [0, 1]")
        if self.background_fraction + self.white_noise > 1.0:
            raise ValueError("background_fraction + white_noise must be <= 1")
        if self.misalignment_sigma < 0.0:
            raise ValueError("misalignment_sigma must be >= 0")


# Calibrated so the simulated pipeline lands near the measured collective-spin
# value of about 5.17 while the delayed/zero-delay count ratio stays at the
# observed 10%.  This is a fit to the reported numbers, not a measured
# parameter set.
DEFAULT_NOISE = NoiseModel(
    background_fraction=0.10, white_noise=0.16, misalignment_sigma=0.05, seed=7
)


def background_state() -> np.ndarray:
    """Equal mixture over the three pairings of two independent routed pairs."""
    rho = np.zeros((16, 16), dtype=complex)
    for pairing in ARM_PAIRINGS:
        vec = two_pair_component(pairing)
        rho += np.outer(vec, vec.conj())
    return rho / len(ARM_PAIRINGS)


def misalignment_unitary(sigma: float, seed: int) -> np.ndarray:
    """Tensor product of one small random rotation per arm.

    Each arm rotates by an angle ~ N(0, sigma) about an isotropic random
    axis; the draw is deterministic in `seed` (one draw per session).
    """
    rng = np.random.default_rng(seed)
    pauli = [
        np.array([[0, 1], [1, 0]], dtype=complex),
        np.array([[0, -1j], [1j, 0]], dtype=complex),
        np.array([[1, 0], [0, -1]], dtype=complex),
    ]
    total = np.eye(1, dtype=complex)
    for _ in range(N_ARMS):
        axis = rng.normal(size=3)
        axis /= np.linalg.norm(axis)
        angle = rng.normal(0.0, sigma) if sigma > 0 else 0.0
        generator = sum(a * p for a, p in zip(axis, pauli))
        u = math.cos(angle / 2) * np.eye(2) - 1j * math.sin(angle / 2) * generator
        total = np.kron(total, u)
    return total


def apply_noise(state: np.ndarray, noise: NoiseModel) -> np.ndarray:
    """Mix the ideal pure state with background pairs and white noise.

    rho = (1 - f - w) U rho_ideal U^dag + f rho_bg + w 1/16 with U the
    per-session misalignment rotation.
    """
    psi = np.asarray(state, dtype=complex)
    if psi.shape != (16,):
        raise ValueError(f"expected a pure 16-vector, got shape {psi.shape}")
    u = misalignment_unitary(noise.misalignment_sigma, noise.seed)
    rotated = u @ psi
    rho = np.outer(rotated, rotated.conj())
    f, w = noise.background_fraction, noise.white_noise
    return (1.0 - f - w) * rho + f * background_state() + w * np.eye(16) / 16.0


# ---------------------------------------------------------------------------
# count simulation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class CountRecord:
    """One coincidence measurement: setting, integration time, observed count."""

    setting: str
    duration: float
    count: int

    def __post_init__(self):
        if self.count < 0:
            raise ValueError("count must be >= 0")
        if self.duration <= 0:
            raise ValueError("duration must be > 0")


def simulate_counts(
    rho: np.ndarray,
    setting: str,
    rate_scale: float,
    duration: float,
    seed: int,
    stream: int = 0,
) -> CountRecord:
    """Poisson coincidence count for one setting, deterministic under seed.

    `stream` keeps draws independent per setting so batches can run in any
    order (or concurrently) and still reproduce.
    """
    if rate_scale <= 0:
        raise ValueError("rate_scale must be > 0")
    p = joint_probability(rho, setting)
    mean = rate_scale * max(p, 0.0) * duration
    rng = np.random.default_rng((seed, stream))
    return CountRecord(setting=setting, duration=duration, count=int(rng.poisson(mean)))


def simulate_count_records(
    rho: np.ndarray,
    settings: Sequence[str],
    rate_scale: float,
    duration: float,
    seed: int,
) -> List[CountRecord]:
    """Simulate one record per setting with per-index RNG streams."""
    return [
        simulate_counts(rho, s, rate_scale, duration, seed, stream=i)
        for i, s in enumerate(settings)
    ]


def counts_to_csv(records: Sequence[CountRecord], path) -> None:
    with open(path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(["setting", "duration_s", "count"])
        for rec in records:
            writer.writerow([rec.setting, repr(rec.duration), rec.count])


def counts_from_csv(path) -> List[CountRecord]:
    records = []
    with open(path, newline="") as handle:
        for row in csv.DictReader(handle):
            records.append(
                CountRecord(
                    setting=validate_setting(row["setting"]),
                    duration=float(row["duration_s"]),
                    count=int(row["count"]),
                )
            )
    return records


# ---------------------------------------------------------------------------
# pump-power scan
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PowerScanConfig:
    """Rates for the pump-power scan.

    Pair emission probability grows linearly with pump power, so singles
    scale as P and both four-fold channels as P^2; the delayed channel
    (arms C, D shifted by one pulse) measures the uncorrelated double-pair
    background, a fraction `background_fraction` of the zero-delay rate.
    """

    powers_mw: Tuple[float, ...] = (10.0, 14.0, 19.5, 27.0, 37.0, 51.0, 70.0)
    duration_s: float = 300.0
    singles_per_mw_hz: float = 400.0
    fourfold_per_mw2_hz: float = 0.05
    background_fraction: float = 0.10

    def __post_init__(self):
        if any(p <= 0 for p in self.powers_mw):
            raise ValueError("pump powers must be > 0")
        if min(self.duration_s, self.singles_per_mw_hz, self.fourfold_per_mw2_hz) <= 0:
            raise ValueError("scan rates and duration must be > 0")
        if not 0.0 <= self.background_fraction < 1.0:
            raise ValueError("background_fraction must be in [0, 1)")


@dataclass(frozen=True)
class PowerScanResult:
    powers_mw: Tuple[float, ...]
    singles_hz: Tuple[float, ...]
    fourfold_hz: Tuple[float, ...]
    fourfold_delayed_hz: Tuple[float, ...]
    singles_exponent: float
    fourfold_exponent: float
    delayed_ratio: float

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(
                ["power_mw", "singles_hz", "fourfold_hz", "fourfold_delayed_hz"]
            )
            for row in zip(
                self.powers_mw, self.singles_hz, self.fourfold_hz,
                self.fourfold_delayed_hz,
            ):
                writer.writerow([repr(v) for v in row])

    def fit_dict(self) -> dict:
        return {
            "singles_exponent": self.singles_exponent,
            "fourfold_exponent": self.fourfold_exponent,
            "delayed_ratio": self.delayed_ratio,
        }


def _loglog_slope(x: Sequence[float], y: Sequence[float]) -> float:
    pairs = [(xi, yi) for xi, yi in zip(x, y) if yi > 0]
    if len(pairs) < 2:
        raise ValueError("not enough nonzero rates to fit a power law")
    lx, ly = np.log([p[0] for p in pairs]), np.log([p[1] for p in pairs])
    return float(np.polyfit(lx, ly, 1)[0])


def power_scan(config: PowerScanConfig, seed: int) -> PowerScanResult:
    """Simulate singles and four-fold rates versus pump power and fit exponents."""
    rng = np.random.default_rng(seed)
    duration = config.duration_s
    singles, four, four_delayed = [], [], []
    for power in config.powers_mw:
        mean_singles = config.singles_per_mw_hz * power * duration
        mean_four = config.fourfold_per_mw2_hz * power**2 * duration
        mean_delayed = config.background_fraction * mean_four
        singles.append(rng.poisson(mean_singles) / duration)
        four.append(rng.poisson(mean_four) / duration)
        four_delayed.append(rng.poisson(mean_delayed) / duration)
    total_four = sum(four)
    ratio = sum(four_delayed) / total_four if total_four > 0 else math.nan
    return PowerScanResult(
        powers_mw=tuple(config.powers_mw),
        singles_hz=tuple(singles),
        fourfold_hz=tuple(four),
        fourfold_delayed_hz=tuple(four_delayed),
        singles_exponent=_loglog_slope(config.powers_mw, singles),
        fourfold_exponent=_loglog_slope(config.powers_mw, four),
        delayed_ratio=float(ratio),
    )
