"""First-order transverse-mode qubits, beamsplitter routing and Dicke states.

Qubit convention (Bloch poles = circular LG modes, in analogy with
polarization):

    z basis: R = LG(ell=+1) -> (1, 0),  L = LG(ell=-1) -> (0, 1)
    x basis: H = (R + L)/sqrt2,  V = (R - L)/sqrt2      (Hermite-Gauss)
    y basis: D = (R + i L)/sqrt2,  A = (R - i L)/sqrt2  (45-deg Hermite-Gauss)

Four-qubit computational states are indexed by 4-bit strings, detector arm
A as the most significant bit and bit value 1 meaning L.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .fock import FockState, ModeLabel

N_ARMS = 4

# Fixed convention for each 50:50 splitter in the 1 -> 4 tree: transmit
# carries +1, reflect carries +i.  Arm amplitudes (A, B, C, D) below are the
# products along the tree paths.  The post-selected one-photon-per-arm state
# from a symmetric input uses every arm exactly once, so any other phase
# choice differs only by local phases.
SPLITTER_TREE_AMPLITUDES = np.array([1.0, 1.0j, 1.0j, -1.0]) / 2.0

_SQRT2 = math.sqrt(2.0)

# Single-photon mode projector kets in the z (R/L) basis.
MODE_KETS = {
    "R": np.array([1.0, 0.0], dtype=complex),
    "L": np.array([0.0, 1.0], dtype=complex),
    "H": np.array([1.0, 1.0], dtype=complex) / _SQRT2,
    "V": np.array([1.0, -1.0], dtype=complex) / _SQRT2,
    "D": np.array([1.0, 1.0j], dtype=complex) / _SQRT2,
    "A": np.array([1.0, -1.0j], dtype=complex) / _SQRT2,
}


class MubBasis(Enum):
    """The three mutually unbiased single-qubit bases."""

    Z_RL = ("R", "L")
    X_HV = ("H", "V")
    Y_DA = ("D", "A")

    @property
    def letters(self):
        return self.value


def mub_projector(basis: MubBasis, outcome: int) -> np.ndarray:
    """Ket of the projector for one outcome (0 or 1) of a MUB measurement."""
    if outcome not in (0, 1):
        raise ValueError(f"outcome must be 0 or 1, got {outcome}")
    return MODE_KETS[basis.letters[outcome]].copy()


def dicke_state(n: int = 4, k: int = 2) -> np.ndarray:
    """Symmetric Dicke state: equal superposition of all n-bit strings with k ones."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got (n, k) = ({n}, {k})")
    dim = 2**n
    vec = np.zeros(dim, dtype=complex)
    for idx in range(dim):
        if bin(idx).count("1") == k:
            vec[idx] = 1.0
    return vec / np.linalg.norm(vec)


@dataclass(frozen=True)
class PostSelectionResult:
    """Conditional detector-basis state and its post-selection probability."""

    state: np.ndarray
    success_probability: float


def split_to_detectors(source: FockState) -> PostSelectionResult:
    """Route a four-photon ell = +-1 state through the beamsplitter tree.

    Each photon is sent to one of the four arms with the tree amplitudes,
    the outcome is projected on exactly one photon per arm and renormalized.
    Events with two or more photons in one arm are discarded rather than
    modeled as detector saturation.
    """
    plus = source.basis.index(ModeLabel.oam(1))
    minus = source.basis.index(ModeLabel.oam(-1))
    tree = SPLITTER_TREE_AMPLITUDES
    tree_product = np.prod(tree)

    amplitudes = np.zeros(2**N_ARMS, dtype=complex)
    for occ, amp in source.terms.items():
        if sum(occ) != 4:
            raise ValueError(f"input term {occ} does not hold exactly 4 photons")
        n_plus, n_minus = occ[plus], occ[minus]
        if n_plus + n_minus != 4:
            raise ValueError(f"input term {occ} occupies modes outside ell = +-1")
        # One photon per arm: choose which arms receive the ell = +1 photons.
        # Expanding (sum_k t_k b_k^dag)^n / sqrt(n!) gives amplitude
        # sqrt(n!) prod(t) for any all-distinct arm assignment, and every
        # post-selected outcome uses each arm once, hence prod(t) = tree_product.
        weight = amp * math.sqrt(math.factorial(n_plus) * math.factorial(n_minus))
        for r_arms in itertools.combinations(range(N_ARMS), n_plus):
            idx = 0
            for arm in range(N_ARMS):
                idx = (idx << 1) | (0 if arm in r_arms else 1)
            amplitudes[idx] += weight * tree_product

    input_norm_sq = source.norm() ** 2
    if input_norm_sq == 0.0:
        raise ValueError("cannot post-select the zero state")
    success = float(np.sum(np.abs(amplitudes) ** 2) / input_norm_sq)
    if success == 0.0:
        raise ValueError("post-selection has zero success probability")
    state = amplitudes / np.linalg.norm(amplitudes)
    return PostSelectionResult(state=state, success_probability=success)


def routed_pair_state() -> np.ndarray:
    """Two-qubit conditional state of one anticorrelated pair on two arms.

    Routing a_+1^dag a_-1^dag |0> to two fixed arms and keeping one photon
    per arm yields (|RL> + |LR>)/sqrt2 for any splitter phases; the common
    path factor drops out on renormalization.
    """
    vec = np.zeros(4, dtype=complex)
    vec[0b01] = vec[0b10] = 1.0
    return vec / _SQRT2


def two_pair_component(pairing) -> np.ndarray:
    """Product of two independently routed pairs on a disjoint arm pairing.

    `pairing` is ((i, j), (k, l)) covering all four arms; the result is
    (|R_i L_j> + |L_i R_j>)/sqrt2 tensor (|R_k L_l> + |L_k R_l>)/sqrt2
    written in the four-qubit arm ordering.
    """
    (i, j), (k, l) = pairing
    if sorted((i, j, k, l)) != [0, 1, 2, 3]:
        raise ValueError(f"pairing {pairing} does not cover the four arms")
    out = np.zeros(2**N_ARMS, dtype=complex)
    for l_first in (i, j):
        for l_second in (k, l):
            idx = (1 << (N_ARMS - 1 - l_first)) | (1 << (N_ARMS - 1 - l_second))
            out[idx] = 0.5
    return out
