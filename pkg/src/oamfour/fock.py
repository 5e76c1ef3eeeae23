"""Sparse bosonic Fock-state algebra over a truncated set of transverse modes.

The mode set holds the fundamental Gaussian mode (optional) plus OAM modes
with topological charge ell in [-lmax, -1] and [+1, +lmax].  States are
sparse maps from occupation vectors to complex amplitudes; at the cutoffs
used here the four-photon sector has a few dozen terms, so dense Fock
tensors are never built.

All operations are pure: a `FockState` is immutable after construction and
every operator returns a new state.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from types import MappingProxyType
from typing import Dict, Iterable, Mapping, Tuple

PRUNE_THRESHOLD = 1e-15

Occupation = Tuple[int, ...]


class ModeCutoffError(ValueError):
    """A mode label lies outside the basis cutoff."""


class BasisMismatchError(ValueError):
    """Two states (or a state and an operator) use different mode bases."""


class ModeKind(Enum):
    GAUSSIAN = "gaussian"
    OAM = "oam"


@dataclass(frozen=True)
class ModeLabel:
    """A transverse mode: the fundamental Gaussian or an OAM mode of charge ell.

    ell = 0 is only ever represented by the Gaussian label, so labels are
    unique and hashable keys.
    """

    kind: ModeKind
    ell: int = 0

    def __post_init__(self):
        if self.kind is ModeKind.GAUSSIAN and self.ell != 0:
            raise ValueError("the Gaussian mode carries no OAM charge")
        if self.kind is ModeKind.OAM and self.ell == 0:
            raise ValueError("ell = 0 is represented by the Gaussian mode")

    @classmethod
    def gaussian(cls) -> "ModeLabel":
        return cls(ModeKind.GAUSSIAN, 0)

    @classmethod
    def oam(cls, ell: int) -> "ModeLabel":
        return cls(ModeKind.OAM, ell)

    def __str__(self) -> str:
        return "G" if self.kind is ModeKind.GAUSSIAN else f"{self.ell:+d}"

    @classmethod
    def from_string(cls, text: str) -> "ModeLabel":
        if text == "G":
            return cls.gaussian()
        return cls.oam(int(text))


class ModeBasis:
    """Canonically ordered mode set: Gaussian first, then ell = -lmax..-1, +1..+lmax.

    The ordering is fixed at construction so occupation vectors are value
    types usable as map keys across all states sharing the basis.
    """

    def __init__(self, lmax: int, include_gaussian: bool = True):
        if lmax < 0:
            raise ValueError(f"lmax must be >= 0, got {lmax}")
        labels = []
        if include_gaussian:
            labels.append(ModeLabel.gaussian())
        labels.extend(ModeLabel.oam(ell) for ell in range(-lmax, 0))
        labels.extend(ModeLabel.oam(ell) for ell in range(1, lmax + 1))
        if not labels:
            raise ValueError("empty mode set (lmax = 0 without the Gaussian mode)")
        self.lmax = lmax
        self.include_gaussian = include_gaussian
        self.labels: Tuple[ModeLabel, ...] = tuple(labels)
        self._index: Dict[ModeLabel, int] = {m: i for i, m in enumerate(labels)}

    def __len__(self) -> int:
        return len(self.labels)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, ModeBasis)
            and self.lmax == other.lmax
            and self.include_gaussian == other.include_gaussian
        )

    def __hash__(self) -> int:
        return hash((self.lmax, self.include_gaussian))

    def __repr__(self) -> str:
        return f"ModeBasis(lmax={self.lmax}, include_gaussian={self.include_gaussian})"

    def index(self, mode: ModeLabel) -> int:
        try:
            return self._index[mode]
        except KeyError:
            raise ModeCutoffError(f"mode {mode} outside basis {self!r}") from None

    def total_oam(self, occupation: Occupation) -> int:
        """Net OAM charge sum(n_ell * ell) of an occupation vector."""
        return sum(n * m.ell for n, m in zip(occupation, self.labels))


class FockState:
    """Sparse multimode Fock state: map occupation vector -> complex amplitude.

    Amplitudes with modulus below `prune` are dropped at construction.
    Instances are immutable; arithmetic and ladder operators return new
    states and are linear over the stored terms.
    """

    __slots__ = ("basis", "_terms")

    def __init__(
        self,
        basis: ModeBasis,
        terms: Mapping[Occupation, complex] | None = None,
        prune: float = PRUNE_THRESHOLD,
    ):
        self.basis = basis
        clean: Dict[Occupation, complex] = {}
        if terms:
            nmodes = len(basis)
            for occ, amp in terms.items():
                if len(occ) != nmodes:
                    raise ValueError(
                        f"occupation {occ} has {len(occ)} entries, basis has {nmodes}"
                    )
                if any(n < 0 for n in occ):
                    raise ValueError(f"negative occupation in {occ}")
                if abs(amp) >= prune:
                    clean[tuple(occ)] = complex(amp)
        self._terms = clean

    # -- constructors --------------------------------------------------

    @classmethod
    def vacuum(cls, basis: ModeBasis) -> "FockState":
        return cls(basis, {(0,) * len(basis): 1.0})

    @classmethod
    def zero(cls, basis: ModeBasis) -> "FockState":
        return cls(basis, {})

    # -- inspection ----------------------------------------------------

    @property
    def terms(self) -> Mapping[Occupation, complex]:
        return MappingProxyType(self._terms)

    def amplitude(self, occupation: Occupation) -> complex:
        return self._terms.get(tuple(occupation), 0.0 + 0.0j)

    def is_zero(self) -> bool:
        return not self._terms

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for a in self._terms.values()))

    def photon_number_weights(self) -> Dict[int, float]:
        """Squared-amplitude weight per total photon number (unnormalized)."""
        weights: Dict[int, float] = {}
        for occ, amp in self._terms.items():
            n = sum(occ)
            weights[n] = weights.get(n, 0.0) + abs(amp) ** 2
        return weights

    # -- algebra -------------------------------------------------------

    def _require_same_basis(self, other: "FockState") -> None:
        if self.basis != other.basis:
            raise BasisMismatchError(
                f"basis mismatch: {self.basis!r} vs {other.basis!r}"
            )

    def __add__(self, other: "FockState") -> "FockState":
        self._require_same_basis(other)
        out = dict(self._terms)
        for occ, amp in other._terms.items():
            out[occ] = out.get(occ, 0.0) + amp
        return FockState(self.basis, out)

    def __sub__(self, other: "FockState") -> "FockState":
        return self + other.scaled(-1.0)

    def scaled(self, factor: complex) -> "FockState":
        return FockState(
            self.basis, {occ: factor * amp for occ, amp in self._terms.items()}
        )

    def normalize(self) -> "FockState":
        n = self.norm()
        if n == 0.0:
            raise ValueError("cannot normalize the zero state")
        return self.scaled(1.0 / n)

    def inner(self, other: "FockState") -> complex:
        """<self|other>, conjugate-linear in self."""
        self._require_same_basis(other)
        return complex(
            sum(
                amp.conjugate() * other._terms[occ]
                for occ, amp in self._terms.items()
                if occ in other._terms
            )
        )

    # -- ladder operators ------------------------------------------------

    def create(self, mode: ModeLabel) -> "FockState":
        """Apply the creation operator: |.., n, ..> -> sqrt(n+1) |.., n+1, ..>."""
        k = self.basis.index(mode)
        out: Dict[Occupation, complex] = {}
        for occ, amp in self._terms.items():
            n = occ[k]
            new = occ[:k] + (n + 1,) + occ[k + 1 :]
            out[new] = out.get(new, 0.0) + amp * math.sqrt(n + 1)
        return FockState(self.basis, out)

    def annihilate(self, mode: ModeLabel) -> "FockState":
        """Apply the annihilation operator: |.., n, ..> -> sqrt(n) |.., n-1, ..>."""
        k = self.basis.index(mode)
        out: Dict[Occupation, complex] = {}
        for occ, amp in self._terms.items():
            n = occ[k]
            if n == 0:
                continue
            new = occ[:k] + (n - 1,) + occ[k + 1 :]
            out[new] = out.get(new, 0.0) + amp * math.sqrt(n)
        return FockState(self.basis, out)

    # -- projections -----------------------------------------------------

    def project_photon_number(self, n: int) -> "FockState":
        """Keep only terms with total photon number n.  Not renormalized."""
        if n < 0:
            raise ValueError(f"photon number must be >= 0, got {n}")
        return FockState(
            self.basis, {occ: amp for occ, amp in self._terms.items() if sum(occ) == n}
        )

    def restrict_to(self, modes: Iterable[ModeLabel]) -> "FockState":
        """Keep only terms whose photons all sit in the given modes."""
        keep = {self.basis.index(m) for m in modes}
        out = {
            occ: amp
            for occ, amp in self._terms.items()
            if all(n == 0 or k in keep for k, n in enumerate(occ))
        }
        return FockState(self.basis, out)

    # -- serialization ---------------------------------------------------

    def to_json_dict(self) -> dict:
        """JSON form: mode header in canonical order plus one entry per term."""
        return {
            "modes": [str(m) for m in self.basis.labels],
            "terms": [
                {"occupation": list(occ), "re": amp.real, "im": amp.imag}
                for occ, amp in sorted(self._terms.items())
            ],
        }

    @classmethod
    def from_json_dict(cls, payload: dict) -> "FockState":
        labels = tuple(ModeLabel.from_string(s) for s in payload["modes"])
        ells = [m.ell for m in labels if m.kind is ModeKind.OAM]
        lmax = max((abs(e) for e in ells), default=0)
        include_gaussian = any(m.kind is ModeKind.GAUSSIAN for m in labels)
        basis = ModeBasis(lmax, include_gaussian)
        if basis.labels != labels:
            raise ValueError("mode header is not a canonical basis ordering")
        terms = {
            tuple(entry["occupation"]): complex(entry["re"], entry["im"])
            for entry in payload["terms"]
        }
        return cls(basis, terms)

    def __repr__(self) -> str:
        body = " + ".join(
            f"({amp:.3g})|{','.join(map(str, occ))}>"
            for occ, amp in sorted(self._terms.items())
        )
        return f"FockState({body or '0'})"
