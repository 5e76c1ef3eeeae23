"""Maximum-likelihood reconstruction of the four-qubit density matrix.

The density matrix is parameterized through a lower-triangular complex
matrix T as rho = T^dag T / Tr(T^dag T), which is positive semidefinite
with unit trace for any of the 256 real parameters.  Counts are modeled as
Poisson with mean eta * duration * Tr(rho Pi_s); the overall scale eta is
profiled out analytically at every evaluation, and the remaining
log-likelihood is climbed with L-BFGS using the analytic gradient.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import minimize

from .correlations import CountRecord, setting_ket, simulate_count_records
from .modes import MODE_KETS
from .witnesses import validate_density_matrix

DIM = 16
N_PARAMS = DIM + DIM * (DIM - 1)  # 16 real diagonals + 120 complex lower entries

FULL_MUB_1296 = "FULL_MUB_1296"
CUSTOM = "CUSTOM"

_LOWER_ROWS, _LOWER_COLS = np.tril_indices(DIM, k=-1)


def full_mub_settings() -> List[str]:
    """All 6^4 = 1296 single-outcome settings from the three mutually unbiased bases."""
    letters = sorted(MODE_KETS)
    return ["".join(c) for c in itertools.product(letters, repeat=4)]


def _projector_kets(settings: Sequence[str]) -> np.ndarray:
    """Stack the setting kets as columns of a 16 x S matrix."""
    return np.stack([setting_ket(s) for s in settings], axis=1)


def projector_set_is_complete(settings: Sequence[str]) -> bool:
    """True when the projectors span the full 256-dimensional operator space."""
    kets = _projector_kets(settings)
    ops = np.einsum("is,js->sij", kets, kets.conj()).reshape(len(settings), DIM * DIM)
    return np.linalg.matrix_rank(ops) == DIM * DIM


@dataclass(frozen=True)
class TomographyDataset:
    """Counts per setting.  Synthetic expected counts may be non-integer."""

    settings: Tuple[str, ...]
    durations: np.ndarray
    counts: np.ndarray
    projector_set_id: str = CUSTOM

    def __post_init__(self):
        if not (len(self.settings) == len(self.durations) == len(self.counts)):
            raise ValueError("settings, durations and counts must align")
        if np.any(np.asarray(self.counts) < 0):
            raise ValueError("counts must be >= 0")
        if np.any(np.asarray(self.durations) <= 0):
            raise ValueError("durations must be > 0")
        if self.projector_set_id == CUSTOM and not projector_set_is_complete(
            self.settings
        ):
            raise ValueError("projector set does not span the operator space")

    @classmethod
    def from_records(
        cls, records: Sequence[CountRecord], projector_set_id: str = CUSTOM
    ) -> "TomographyDataset":
        return cls(
            settings=tuple(r.setting for r in records),
            durations=np.array([r.duration for r in records], dtype=float),
            counts=np.array([r.count for r in records], dtype=float),
            projector_set_id=projector_set_id,
        )

    @classmethod
    def expected(
        cls, rho: np.ndarray, rate_scale: float, duration: float
    ) -> "TomographyDataset":
        """Noiseless dataset: exact Poisson means over the full MUB set."""
        settings = full_mub_settings()
        kets = _projector_kets(settings)
        probs = np.real(np.einsum("is,ij,js->s", kets.conj(), rho, kets))
        return cls(
            settings=tuple(settings),
            durations=np.full(len(settings), float(duration)),
            counts=rate_scale * duration * np.clip(probs, 0.0, None),
            projector_set_id=FULL_MUB_1296,
        )

    @classmethod
    def sampled(
        cls, rho: np.ndarray, rate_scale: float, duration: float, seed: int
    ) -> "TomographyDataset":
        """Poisson-sampled dataset over the full MUB set."""
        records = simulate_count_records(
            rho, full_mub_settings(), rate_scale, duration, seed
        )
        return cls.from_records(records, projector_set_id=FULL_MUB_1296)


# ---------------------------------------------------------------------------
# Cholesky-style parameterization
# ---------------------------------------------------------------------------


def params_to_matrix(params: np.ndarray) -> np.ndarray:
    """Lower-triangular complex T from 256 reals (diagonal first, then re/im pairs)."""
    params = np.asarray(params, dtype=float)
    if params.shape != (N_PARAMS,):
        raise ValueError(f"expected {N_PARAMS} parameters, got {params.shape}")
    t = np.zeros((DIM, DIM), dtype=complex)
    t[np.diag_indices(DIM)] = params[:DIM]
    t[_LOWER_ROWS, _LOWER_COLS] = params[DIM::2] + 1j * params[DIM + 1 :: 2]
    return t


def matrix_to_params(t: np.ndarray) -> np.ndarray:
    params = np.zeros(N_PARAMS)
    params[:DIM] = np.real(np.diag(t))
    lower = t[_LOWER_ROWS, _LOWER_COLS]
    params[DIM::2] = lower.real
    params[DIM + 1 :: 2] = lower.imag
    return params


def params_to_density_matrix(params: np.ndarray) -> np.ndarray:
    t = params_to_matrix(params)
    rho = t.conj().T @ t
    return rho / np.trace(rho).real


def _gradient_to_params(m: np.ndarray) -> np.ndarray:
    """Map dL = 2 Re <M, dT> onto the real parameter layout."""
    grad = np.zeros(N_PARAMS)
    grad[:DIM] = 2.0 * np.real(np.diag(m))
    lower = m[_LOWER_ROWS, _LOWER_COLS]
    grad[DIM::2] = 2.0 * lower.real
    grad[DIM + 1 :: 2] = 2.0 * lower.imag
    return grad


def log_likelihood_and_gradient(
    params: np.ndarray,
    kets: np.ndarray,
    counts: np.ndarray,
    durations: np.ndarray,
) -> Tuple[float, np.ndarray]:
    """Poisson log-likelihood (scale eta profiled out) and its analytic gradient.

    With A_s = |T pi_s|^2 and N = |T|_F^2 the model mean is
    mu_s = eta * d_s * A_s / N and the profiled scale is
    eta* = sum(n) * N / sum(d_s A_s), which zeroes the gradient term along N.
    """
    t = params_to_matrix(params)
    tk = t @ kets  # (16, S): T |pi_s> as columns
    a = np.einsum("is,is->s", tk.conj(), tk).real
    norm = np.einsum("ij,ij->", t.conj(), t).real
    total = counts.sum()
    da = durations * a
    eta = total * norm / da.sum()

    safe_a = np.clip(a, 1e-300, None)
    loglik = float(
        np.sum(counts * (np.log(eta * durations * safe_a) - math.log(norm)))
        - eta * da.sum() / norm
    )

    weights = np.where(counts > 0, counts / safe_a, 0.0) - eta * durations / norm
    scalar = -total / norm + eta * da.sum() / norm**2  # zero at the profiled eta
    m = (tk * weights) @ kets.conj().T + scalar * t
    return loglik, _gradient_to_params(m)


# ---------------------------------------------------------------------------
# reconstruction
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MleOptions:
    seed: int = 0
    restarts: int = 1
    maxiter: int = 20000
    ftol: float = 1e-13
    gtol: float = 1e-10
    record_path: bool = False


@dataclass(frozen=True)
class MleResult:
    rho: np.ndarray
    log_likelihood: float
    iterations: int
    seed: int
    converged: bool
    likelihood_path: Optional[List[float]] = None

    def to_json_dict(self) -> dict:
        return {
            "re": np.real(self.rho).tolist(),
            "im": np.imag(self.rho).tolist(),
            "meta": {
                "log_likelihood": self.log_likelihood,
                "iterations": self.iterations,
                "seed": self.seed,
                "converged": self.converged,
            },
        }


def density_matrix_from_json_dict(payload: dict) -> np.ndarray:
    rho = np.array(payload["re"], dtype=float) + 1j * np.array(payload["im"], dtype=float)
    return validate_density_matrix(rho)


def _initial_params(rng: np.random.Generator, attempt: int) -> np.ndarray:
    if attempt == 0:
        # maximally mixed start: T = I/4 gives rho = I/16
        return matrix_to_params(np.eye(DIM, dtype=complex) / 4.0)
    t = rng.normal(size=(DIM, DIM)) + 1j * rng.normal(size=(DIM, DIM))
    return matrix_to_params(np.tril(t) / math.sqrt(DIM))


def reconstruct_mle(
    data: TomographyDataset, options: MleOptions = MleOptions()
) -> MleResult:
    """Most-likely density matrix for a counts dataset.

    Climbs the profiled Poisson log-likelihood with L-BFGS from a maximally
    mixed start plus `restarts - 1` random starts; deterministic under the
    options seed.
    """
    if data.projector_set_id == CUSTOM and not projector_set_is_complete(
        data.settings
    ):
        raise ValueError("projector set does not span the operator space")
    counts = np.asarray(data.counts, dtype=float)
    if counts.sum() <= 0:
        raise ValueError("dataset has no counts")
    durations = np.asarray(data.durations, dtype=float)
    kets = _projector_kets(data.settings)

    def negative(params: np.ndarray):
        value, grad = log_likelihood_and_gradient(params, kets, counts, durations)
        return -value, -grad

    rng = np.random.default_rng(options.seed)
    best = None
    for attempt in range(max(1, options.restarts)):
        x0 = _initial_params(rng, attempt)
        local_path: List[float] = []
        callback = None
        if options.record_path:

            def callback(xk, _path=local_path):
                _path.append(
                    log_likelihood_and_gradient(xk, kets, counts, durations)[0]
                )

        res = minimize(
            negative,
            x0,
            jac=True,
            method="L-BFGS-B",
            callback=callback,
            options={
                "maxiter": options.maxiter,
                "maxfun": 4 * options.maxiter,
                "ftol": options.ftol,
                "gtol": options.gtol,
                "maxcor": 30,
            },
        )
        if best is None or -res.fun > best[0]:
            best = (-res.fun, res.x, res.nit, res.status == 0, local_path)
    loglik, x, nit, converged, path = best
    return MleResult(
        rho=params_to_density_matrix(x),
        log_likelihood=float(loglik),
        iterations=int(nit),
        seed=options.seed,
        converged=bool(converged),
        likelihood_path=path if options.record_path else None,
    )


# ---------------------------------------------------------------------------
# state metrics
# ---------------------------------------------------------------------------


def _clip_spectrum(vals: np.ndarray) -> np.ndarray:
    """Zero negative parts and float dust that would leak through sqrt."""
    vals = np.clip(vals, 0.0, None)
    vals[vals < 1e-14 * max(vals.max(), 1e-300)] = 0.0
    return vals


def _psd_sqrt(rho: np.ndarray) -> np.ndarray:
    vals, vecs = np.linalg.eigh(rho)
    vals = _clip_spectrum(vals)
    return (vecs * np.sqrt(vals)) @ vecs.conj().T


def fidelity(rho: np.ndarray, sigma: np.ndarray) -> float:
    """Uhlmann fidelity (Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2, clipped to [0, 1]."""
    rho = validate_density_matrix(rho)
    sigma = validate_density_matrix(sigma)
    s = _psd_sqrt(rho)
    vals = _clip_spectrum(np.linalg.eigvalsh(s @ sigma @ s))
    value = float(np.sum(np.sqrt(vals)) ** 2)
    return min(max(value, 0.0), 1.0)


def purity(rho: np.ndarray) -> float:
    """Tr(rho^2), clipped to [0, 1]."""
    rho = validate_density_matrix(rho)
    value = float(np.real(np.trace(rho @ rho)))
    return min(max(value, 0.0), 1.0)
