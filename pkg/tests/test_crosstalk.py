import math

import numpy as np
import pytest

from capsim.cavity import CavityParams, InterfaceOptics, delay_matched_params
from capsim.crosstalk import (MultiAtomScenario, crosstalk_fidelity_approx,
                              crosstalk_fidelity_enumerated,
                              crosstalk_fidelity_exact, matched_scenario,
                              per_atom_infidelity, reflection_multi,
                              required_detuning)
from capsim.errors import DomainError
from capsim.gate import caps_longpulse

GAMMA = 2 * math.pi * 0.24e6


def test_no_spectators_reduces_to_single_atom_reflection():
    sc = matched_scenario(50, GAMMA, n_atoms=4, detuning_spectators=1e4 * GAMMA)
    from capsim.cavity import reflection_r0, reflection_r1

    assert reflection_multi(sc, 0, 0) == pytest.approx(
        reflection_r0(sc.params, 0.0), abs=1e-12)
    assert reflection_multi(sc, 1, 0) == pytest.approx(
        reflection_r1(sc.params, 0.0), abs=1e-12)


def test_far_detuned_spectators_decouple():
    near = matched_scenario(50, GAMMA, 10, 1e3 * GAMMA)
    far = matched_scenario(50, GAMMA, 10, 1e12 * GAMMA)
    for m in (1, 5, 9):
        assert abs(reflection_multi(far, 1, m)
                   - reflection_multi(near, 1, 0)) < 1e-9


def test_cooperativity_form_identity():
    rng = np.random.default_rng(7)
    for _ in range(6):
        g, kin, kex, gm, da = rng.uniform(0.5, 5.0, 5)
        p = CavityParams(g=g, kappa_in=kin, kappa_ex=kex, gamma=gm)
        sc = MultiAtomScenario(params=p, n_atoms=6, detuning_spectators=da, r_m=0.9)
        c = g**2 / (2 * p.kappa * gm)
        eta = kex / p.kappa
        for m in range(5):
            for j in (0, 1):
                form = 1 - 2 * eta / (1 + 2 * j * c + 2 * m * c / (1 + 1j * da / gm))
                assert reflection_multi(sc, j, m) == pytest.approx(form, abs=1e-12)


def test_single_atom_channel_equals_longpulse_gate():
    sc = matched_scenario(100, GAMMA, 1, GAMMA)
    gate = caps_longpulse(sc.params, InterfaceOptics(r_m=sc.r_m))
    out = crosstalk_fidelity_exact(sc)
    assert out.f_c == pytest.approx(gate.f_c, abs=1e-14)
    assert out.p_success == pytest.approx(gate.p_success, abs=1e-14)


@pytest.mark.parametrize("c_in", [10, 100])
@pytest.mark.parametrize("ratio", [2e2, 2e3])
def test_exact_matches_large_detuning_model(c_in, ratio):
    delta_a = ratio * 200 * GAMMA
    exact = crosstalk_fidelity_exact(matched_scenario(c_in, GAMMA, 200, delta_a))
    approx = crosstalk_fidelity_approx(c_in, 200, delta_a, GAMMA)
    assert exact.infidelity == pytest.approx(approx, rel=0.2)


def test_reference_point_near_1e_minus_3():
    delta_a = 2e2 * 200 * GAMMA
    exact = crosstalk_fidelity_exact(matched_scenario(100, GAMMA, 200, delta_a))
    assert exact.infidelity == pytest.approx(9.5e-4, rel=0.2)


def test_inverse_square_scaling_in_detuning():
    base = crosstalk_fidelity_exact(
        matched_scenario(100, GAMMA, 200, 2e2 * 200 * GAMMA)).infidelity
    quad = crosstalk_fidelity_exact(
        matched_scenario(100, GAMMA, 200, 8e2 * 200 * GAMMA)).infidelity
    assert base / quad == pytest.approx(16.0, rel=0.1)


def test_quadratic_scaling_in_atom_number():
    assert crosstalk_fidelity_approx(10, 400, 1e5 * GAMMA, GAMMA) == pytest.approx(
        4 * crosstalk_fidelity_approx(10, 200, 1e5 * GAMMA, GAMMA))
    assert crosstalk_fidelity_approx(10, 200, 1e30, GAMMA) < 1e-30


@pytest.mark.parametrize("n_atoms", [2, 5, 12])
def test_regrouped_sum_equals_enumeration(n_atoms):
    sc = matched_scenario(10, GAMMA, n_atoms, 500 * GAMMA)
    fast = crosstalk_fidelity_exact(sc)
    slow = crosstalk_fidelity_enumerated(sc)
    assert fast.f_c == pytest.approx(slow.f_c, abs=1e-12)
    assert fast.p_success == pytest.approx(slow.p_success, abs=1e-12)


def test_per_atom_composition_round_trip():
    sc = matched_scenario(100, GAMMA, 200, 1e5 * GAMMA)
    collective = crosstalk_fidelity_exact(sc).f_c
    per_atom = 1.0 - per_atom_infidelity(1.0 - collective, 200)
    assert per_atom**200 == pytest.approx(collective, rel=1e-12)


def test_required_detuning_reports_both_accountings():
    coll = required_detuning(100, 200, GAMMA, 5e-4, "collective")
    per = required_detuning(100, 200, GAMMA, 5e-4, "per_atom")
    assert coll == pytest.approx(2 * math.pi * 13.2e9, rel=0.01)
    assert per == pytest.approx(2 * math.pi * 0.936e9, rel=0.01)
    assert coll / per == pytest.approx(math.sqrt(200), rel=1e-12)
    # both land at the GHz scale for the multiplexed reference point
    assert 2 * math.pi * 0.1e9 < per < coll < 2 * math.pi * 100e9
    # inversion consistency against the closed form
    assert crosstalk_fidelity_approx(100, 200, coll, GAMMA) == pytest.approx(5e-4)


def test_degenerate_configurations_rejected():
    p = delay_matched_params(10, GAMMA)
    with pytest.raises(DomainError):
        MultiAtomScenario(params=p, n_atoms=3, detuning_spectators=0.0, r_m=0.5)
    with pytest.raises(DomainError):
        MultiAtomScenario(params=p, n_atoms=0, detuning_spectators=1.0, r_m=0.5)
    sc = matched_scenario(10, GAMMA, 4, GAMMA)
    with pytest.raises(DomainError):
        reflection_multi(sc, 2, 0)
    with pytest.raises(DomainError):
        reflection_multi(sc, 1, 4)
