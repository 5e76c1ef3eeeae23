"""Group-velocity walk-off estimate for the downconversion crystal.

A group-index difference between pump and downconverted light makes the
pulses separate while propagating; the crystal should be no longer than the
length over which they slip by one pulse duration.
"""

from __future__ import annotations

from dataclasses import dataclass

SPEED_OF_LIGHT_MM_PER_PS = 0.299792458  # c in mm/ps


@dataclass(frozen=True)
class WalkoffReport:
    group_index_difference: float
    pulse_duration_ps: float
    dispersion_ps_per_mm: float
    walkoff_length_mm: float

    def to_json_dict(self) -> dict:
        return {
            "group_index_difference": self.group_index_difference,
            "pulse_duration_ps": self.pulse_duration_ps,
            "dispersion_ps_per_mm": self.dispersion_ps_per_mm,
            "walkoff_length_mm": self.walkoff_length_mm,
        }


def dispersion_ps_per_mm(group_index_difference: float) -> float:
    """Temporal walk-off per unit length, D = delta_n_g / c."""
    if group_index_difference <= 0:
        raise ValueError("group index difference must be > 0")
    return group_index_difference / SPEED_OF_LIGHT_MM_PER_PS


def walkoff_length_mm(pulse_duration_ps: float, dispersion: float) -> float:
    """Length over which the pulses separate by one duration, L = dt / D."""
    if pulse_duration_ps < 0:
        raise ValueError("pulse duration must be >= 0")
    if dispersion <= 0:
        raise ValueError("dispersion must be > 0")
    return pulse_duration_ps / dispersion


def walkoff_report(
    group_index_difference: float, pulse_duration_ps: float
) -> WalkoffReport:
    d = dispersion_ps_per_mm(group_index_difference)
    return WalkoffReport(
        group_index_difference=group_index_difference,
        pulse_duration_ps=pulse_duration_ps,
        dispersion_ps_per_mm=d,
        walkoff_length_mm=walkoff_length_mm(pulse_duration_ps, d),
    )
