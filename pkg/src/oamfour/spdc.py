"""Downconversion source: truncated series expansion of the pair Hamiltonian.

The interaction creates and destroys photons in pairs of opposite OAM.  The
dimensionless generator applied here is

    K = (1/2) * sum_ell (a_ell^dag a_{-ell}^dag - a_ell a_{-ell})

with the sum over all ell in [-lmax, +lmax]; every unordered pair
{ell, -ell} therefore enters twice and the ell = 0 (Gaussian) term once.
The physical Hamiltonian is i*kappa*hbar*K; the prefactor and interaction
time are never represented separately, only their product survives as the
single-pass amplitude gain carried by each pair application during the
exponential expansion.
"""

from __future__ import annotations

from dataclasses import dataclass

from .fock import BasisMismatchError, FockState, ModeBasis, ModeLabel


@dataclass(frozen=True)
class SpdcParams:
    """Source parameters.

    gain: single-pass amplitude gain (dimensionless, one factor per emitted pair).
    lmax: symmetric OAM cutoff of the mode sum.
    include_gaussian: include the ell = 0 (Gaussian) term of the mode sum.
    order: pair-order truncation of the exponential series; 2 covers the
        four-photon physics, 3 exists to check the truncation error.
    """

    gain: float
    lmax: int = 1
    include_gaussian: bool = False
    order: int = 2

    def __post_init__(self):
        if not self.gain > 0:
            raise ValueError(f"gain must be > 0, got {self.gain}")
        if self.lmax < 1:
            raise ValueError(f"lmax must be >= 1, got {self.lmax}")
        if self.order not in (1, 2, 3):
            raise ValueError(f"order must be 1, 2 or 3, got {self.order}")

    def basis(self) -> ModeBasis:
        return ModeBasis(self.lmax, self.include_gaussian)


def apply_hamiltonian(state: FockState, params: SpdcParams) -> FockState:
    """Apply the dimensionless pair generator K to a state.

    Returns (1/2) sum_ell (a_ell^dag a_{-ell}^dag - a_ell a_{-ell}) |state>.
    The physical i*kappa*hbar prefactor is absorbed into the gain at
    expansion time, so K itself is anti-Hermitian and i*K is the (Hermitian)
    Hamiltonian in gain units.
    """
    basis = params.basis()
    if state.basis != basis:
        raise BasisMismatchError(
            f"state basis {state.basis!r} does not match params basis {basis!r}"
        )
    out = FockState.zero(basis)
    for ell in range(-params.lmax, params.lmax + 1):
        if ell == 0:
            if not params.include_gaussian:
                continue
            mode_a = mode_b = ModeLabel.gaussian()
        else:
            mode_a = ModeLabel.oam(ell)
            mode_b = ModeLabel.oam(-ell)
        out = out + state.create(mode_b).create(mode_a).scaled(0.5)
        out = out - state.annihilate(mode_b).annihilate(mode_a).scaled(0.5)
    return out


def expand_vacuum(params: SpdcParams) -> FockState:
    """Truncated exponential series exp(gain * K)|0> up to `order` pair applications.

    The result is intentionally unnormalized: photon-number sector weights
    then scale exactly as gain^(2k) for k emitted pairs.
    """
    basis = params.basis()
    term = FockState.vacuum(basis)
    total = term
    factorial = 1.0
    for k in range(1, params.order + 1):
        term = apply_hamiltonian(term, params)
        factorial *= k
        total = total + term.scaled(params.gain**k / factorial)
    return total


def four_photon_state(params: SpdcParams) -> FockState:
    """Normalized four-photon sector of the expanded vacuum.

    At lmax = 1 without the Gaussian mode this is exactly |2_{+1}; 2_{-1}>.
    """
    if params.order < 2:
        raise ValueError("four-photon sector requires order >= 2")
    sector = expand_vacuum(params).project_photon_number(4)
    return sector.normalize()
