import math

import numpy as np
import pytest

from oamfour.fock import FockState, ModeBasis, ModeLabel
from oamfour.spdc import SpdcParams, apply_hamiltonian, expand_vacuum, four_photon_state


def symbolic_double_pair(lmax, include_gaussian, gain):
    """Independent oracle: apply the pair sum twice to vacuum, explicit bookkeeping.

    Walks every ordered (l1, l2) of the written double mode sum with the
    bosonic sqrt factors computed from a plain occupation counter; carries
    (1/2)^2 from the two sum prefactors and 1/2! from the series.
    """
    basis = ModeBasis(lmax, include_gaussian)
    terms = {}
    ells = [ell for ell in range(-lmax, lmax + 1) if ell != 0 or include_gaussian]
    for l1 in ells:
        for l2 in ells:
            occ = [0] * len(basis)
            amp = 0.25 * gain**2 / 2.0
            for ell in (l1, -l1, l2, -l2):
                mode = ModeLabel.gaussian() if ell == 0 else ModeLabel.oam(ell)
                idx = basis.index(mode)
                amp *= math.sqrt(occ[idx] + 1)
                occ[idx] += 1
            key = tuple(occ)
            terms[key] = terms.get(key, 0.0) + amp
    return basis, terms


def test_hamiltonian_on_vacuum_lmax2():
    """K|0> = |1_{+1};1_{-1}> + |1_{+2};1_{-2}>: each pair enters the sum twice."""
    params = SpdcParams(gain=0.1, lmax=2)
    basis = params.basis()
    out = apply_hamiltonian(FockState.vacuum(basis), params)
    assert out.amplitude((1, 0, 0, 1)) == pytest.approx(1.0)
    assert out.amplitude((0, 1, 1, 0)) == pytest.approx(1.0)
    assert len(out.terms) == 2


def test_hamiltonian_gaussian_term():
    # ell = 0 enters once: (1/2)(a_G^dag)^2 |0> = (1/sqrt2)|2_G>
    params = SpdcParams(gain=0.1, lmax=1, include_gaussian=True)
    out = apply_hamiltonian(FockState.vacuum(params.basis()), params)
    assert out.amplitude((2, 0, 0)) == pytest.approx(1 / math.sqrt(2))


def test_annihilation_part_vanishes_on_vacuum():
    params = SpdcParams(gain=0.1, lmax=2)
    out = apply_hamiltonian(FockState.vacuum(params.basis()), params)
    assert out.project_photon_number(0).is_zero()


def test_physical_hamiltonian_hermitian(rng):
    """<a|K b> = -<K a|b>: the generator is anti-Hermitian, so i*K is Hermitian."""
    params = SpdcParams(gain=0.1, lmax=2, include_gaussian=True)
    basis = params.basis()
    occs = [
        (0, 0, 0, 0, 0), (0, 1, 0, 1, 0), (2, 0, 0, 0, 0),
        (0, 0, 1, 1, 0), (0, 1, 1, 1, 1),
    ]
    for _ in range(5):
        a = FockState(basis, {occ: complex(*rng.normal(size=2)) for occ in occs})
        b = FockState(basis, {occ: complex(*rng.normal(size=2)) for occ in occs})
        lhs = a.inner(apply_hamiltonian(b, params))
        rhs = -apply_hamiltonian(a, params).inner(b)
        np.testing.assert_allclose(lhs, rhs, atol=1e-12)


def test_expand_vacuum_order1():
    """Two-photon sector gamma(|1_{+1};1_{-1}> + |1_{+2};1_{-2}>), unnormalized."""
    state = expand_vacuum(SpdcParams(gain=0.07, lmax=2, order=1))
    sector = state.project_photon_number(2)
    assert sector.amplitude((1, 0, 0, 1)) == pytest.approx(0.07)
    assert sector.amplitude((0, 1, 1, 0)) == pytest.approx(0.07)
    assert len(sector.terms) == 2


@pytest.mark.parametrize("lmax", [1, 2, 3])
def test_four_photon_sector_matches_symbolic_oracle(lmax):
    gain = 0.1
    basis, oracle = symbolic_double_pair(lmax, False, gain)
    sector = expand_vacuum(SpdcParams(gain=gain, lmax=lmax)).project_photon_number(4)
    keys = set(oracle) | set(sector.terms)
    for key in keys:
        np.testing.assert_allclose(
            sector.amplitude(key), oracle.get(key, 0.0), rtol=0, atol=1e-12
        )


def test_stimulated_amplitude_ratio():
    """amp(|2_l;2_lbar|) / amp(|1;1;1;1>) = 2 (1/sqrt2)^2 = 1 in Fock normalization.

    The doubled |2;2> coefficient of the ordered double mode sum is what the
    published four-photon superposition exposes as the stimulated factor 2.
    """
    state = expand_vacuum(SpdcParams(gain=0.1, lmax=2)).project_photon_number(4)
    ratio = state.amplitude((0, 2, 2, 0)) / state.amplitude((1, 1, 1, 1))
    np.testing.assert_allclose(ratio, 2 * (1 / math.sqrt(2)) ** 2, atol=1e-12)


@pytest.mark.parametrize("order", [1, 2, 3])
def test_odd_sectors_empty(order):
    state = expand_vacuum(SpdcParams(gain=0.1, lmax=2, include_gaussian=True, order=order))
    for n in (1, 3, 5, 7):
        assert state.project_photon_number(n).is_zero()


def test_four_photon_state_lmax1_is_double_pair():
    state = four_photon_state(SpdcParams(gain=0.1, lmax=1))
    assert state.amplitude((2, 2)) == pytest.approx(1.0, abs=1e-12)
    assert len(state.terms) == 1


def test_four_photon_state_gain_independent():
    a = four_photon_state(SpdcParams(gain=0.02, lmax=2))
    b = four_photon_state(SpdcParams(gain=0.3, lmax=2))
    for occ in a.terms:
        np.testing.assert_allclose(a.amplitude(occ), b.amplitude(occ), atol=1e-12)


def test_four_photon_state_requires_order2():
    with pytest.raises(ValueError):
        four_photon_state(SpdcParams(gain=0.1, lmax=1, order=1))


def test_params_validation():
    with pytest.raises(ValueError):
        SpdcParams(gain=0.0)
    with pytest.raises(ValueError):
        SpdcParams(gain=0.1, lmax=0)
    with pytest.raises(ValueError):
        SpdcParams(gain=0.1, order=4)


@pytest.mark.parametrize("include_gaussian", [False, True])
@pytest.mark.parametrize("lmax", [1, 3])
def test_oam_conservation(lmax, include_gaussian):
    params = SpdcParams(gain=0.1, lmax=lmax, include_gaussian=include_gaussian)
    state = four_photon_state(params)
    basis = params.basis()
    for occ in state.terms:
        assert basis.total_oam(occ) == 0


def test_gain_scaling_exponents():
    """Singles proxy scales as gain^2, four-photon weight as gain^4."""
    gains = np.geomspace(0.01, 0.1, 7)
    singles, four_weight = [], []
    for gain in gains:
        order1 = expand_vacuum(SpdcParams(gain=gain, lmax=3, order=1))
        weights = order1.photon_number_weights()
        singles.append(sum(n * w for n, w in weights.items()))
        order2 = expand_vacuum(SpdcParams(gain=gain, lmax=3, order=2))
        four_weight.append(order2.photon_number_weights()[4])
    slope_singles = np.polyfit(np.log(gains), np.log(singles), 1)[0]
    slope_four = np.polyfit(np.log(gains), np.log(four_weight), 1)[0]
    assert slope_singles == pytest.approx(2.0, abs=0.01)
    assert slope_four == pytest.approx(4.0, abs=0.01)


@pytest.mark.parametrize("lmax", [1, 2, 3])
def test_order3_truncation_error(lmax):
    """Six-photon contamination is gain^2 (lmax+2)/3 of the four-photon weight.

    At gain 0.1 that is percent-level (1.0% at lmax=1, 1.67% at lmax=3),
    which justifies stopping the expansion at two pair emissions.
    """
    gain = 0.1
    state = expand_vacuum(SpdcParams(gain=gain, lmax=lmax, order=3))
    weights = state.photon_number_weights()
    ratio = weights[6] / weights[4]
    np.testing.assert_allclose(ratio, gain**2 * (lmax + 2) / 3.0, rtol=1e-10)
    assert ratio < 0.02
