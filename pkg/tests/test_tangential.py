import math

import numpy as np
import pytest
from scipy.constants import c, hbar

from casimir.lifshitz import MatsubaraConfig, QuadratureConfig
from casimir.materials import (Constant, Drude, DrudeTail, Plasma, Tabulated,
                               Vacuum, drude_synthetic_table, ev_to_radps,
                               fit_power_tail)
from casimir.stack import (DrudeLike, FiveLayerStack, FromModel, Layer,
                           StackSymmetryError)
from casimir.tangential import (drude_vs_plasma_sweep,
                                tangential_force_general,
                                tangential_force_reduced)

VAC = Layer(Vacuum())
GOLD = Layer(Drude(ev_to_radps(9.0), ev_to_radps(0.035)))
ALUMINUM = Layer(Drude(ev_to_radps(12.5), ev_to_radps(0.063)))
MIRROR = Layer(Plasma(1e20))


def tabulated_gold(omega_p_ev, gamma_ev, merge_below=None):
    tab = drude_synthetic_table(9.0, 0.035, 0.01, 100.0, per_decade=60)
    if merge_below is not None:
        low = drude_synthetic_table(omega_p_ev, gamma_ev, 0.01, 100.0,
                                    per_decade=60)
        tab = tab.replace_below(low, merge_below)
    return Layer(Tabulated(tab,
                           low_tail=DrudeTail(ev_to_radps(omega_p_ev),
                                              ev_to_radps(gamma_ev), 0.01),
                           high_tail=fit_power_tail(tab)))


def test_reduced_ideal_mirrors_low_temperature():
    # T -> 0 proxy: xi_1 d / c ~ 3e-3, sum converged well before n_max
    d = 1e-6
    mats = MatsubaraConfig(1.0, n_max=3000, zero_mode=FromModel())
    res = tangential_force_reduced(MIRROR, VAC, d, mats)
    ideal = math.pi ** 2 * hbar * c / (720.0 * d ** 3)
    assert res.force_per_width == pytest.approx(ideal, rel=1e-4)
    assert res.force_per_width == pytest.approx(4.333e-10, rel=1e-3)
    assert res.force_per_width > 0.0  # pulls the plate inward


def test_reduced_identical_media():
    mats = MatsubaraConfig(300.0, n_max=10)
    res = tangential_force_reduced(VAC, VAC, 1e-7, mats)
    assert res.force_per_width == 0.0


def test_reduced_validation():
    with pytest.raises(ValueError):
        tangential_force_reduced(GOLD, VAC, 0.0, MatsubaraConfig(300.0, 10))


def test_result_component_invariant():
    d4 = 1e-7
    stack = FiveLayerStack((GOLD, VAC, GOLD, VAC, GOLD), 5e-7, 5e-7, d4)
    mats = MatsubaraConfig(300.0, n_max=150, zero_mode=DrudeLike())
    res = tangential_force_general(stack, mats)
    assert res.force_per_width == -(res.energy_full - res.energy_retracted
                                    - res.energy_slab)


def test_general_symmetry_required():
    stack = FiveLayerStack((GOLD, VAC, GOLD, Layer(Constant(2.0)), GOLD),
                           1e-7, 1e-7, 1e-7)
    with pytest.raises(StackSymmetryError):
        tangential_force_general(stack, MatsubaraConfig(300.0, 10))


def test_general_all_identical_is_zero():
    stack = FiveLayerStack((VAC,) * 5, 1e-7, 1e-7, 1e-7)
    res = tangential_force_general(stack, MatsubaraConfig(300.0, 10))
    assert res.force_per_width == 0.0


def test_general_without_outer_slabs_is_zero():
    # only the middle plate remains: full term equals the slab term exactly
    stack = FiveLayerStack((VAC, VAC, GOLD, VAC, VAC), 2e-7, 1e-7, 2e-7)
    mats = MatsubaraConfig(300.0, n_max=80, zero_mode=DrudeLike())
    res = tangential_force_general(stack, mats)
    assert res.energy_retracted == 0.0
    assert res.force_per_width == pytest.approx(0.0, abs=1e-9 * abs(res.energy_slab))


def test_general_matches_reduced_in_deep_limit():
    # far interfaces 1000x the near gap: zero-mode corrections ~ (d4/d2)^2
    d4 = 1e-7
    mats = MatsubaraConfig(300.0, n_max=300, zero_mode=DrudeLike())
    quad = QuadratureConfig()
    stack = FiveLayerStack((GOLD, VAC, GOLD, VAC, GOLD),
                           1000 * d4, 1000 * d4, d4)
    gen = tangential_force_general(stack, mats, quad).force_per_width
    red = tangential_force_reduced(GOLD, VAC, d4, mats, quad).force_per_width
    assert gen == pytest.approx(red, rel=1e-6)


def test_gold_regression_goldens():
    # frozen after first computation; n_max=1000 reproduced each value
    mats = MatsubaraConfig(300.0, n_max=500, zero_mode=DrudeLike())
    quad = QuadratureConfig()
    expected = {
        1e-7: 2.206834614777439e-07,
        5e-7: 2.600262269527979e-09,
        1e-6: 3.173382917882819e-10,
    }
    got = {d: tangential_force_reduced(GOLD, VAC, d, mats,
                                       quad).force_per_width
           for d in expected}
    for d, val in expected.items():
        assert got[d] == pytest.approx(val, rel=1e-9)
    forces = [got[d] for d in sorted(got)]
    assert all(a > b > 0.0 for a, b in zip(forces, forces[1:]))


def test_sweep_plasma_dominates_drude():
    pts = drude_vs_plasma_sweep(GOLD, VAC, np.geomspace(1e-7, 1e-6, 5),
                                300.0, n_max=200)
    for p in pts:
        assert abs(p.force_plasma) >= abs(p.force_drude)
        assert p.ratio == p.force_plasma / p.force_drude
        assert p.ratio > 1.0


def test_sweep_ratio_approaches_two_in_ideal_limit():
    # large omega_p, large d: the zero mode dominates and plasma keeps
    # both polarizations while drude keeps one
    big = Layer(Drude(1e19, 1e15))
    pts = drude_vs_plasma_sweep(big, VAC, [2e-6, 5e-6, 1e-5], 300.0,
                                n_max=200)
    ratios = [p.ratio for p in pts]
    assert all(a < b for a, b in zip(ratios, ratios[1:]))
    assert ratios[-1] == pytest.approx(2.0, abs=1e-3)


def test_sweep_identical_media_zero():
    pts = drude_vs_plasma_sweep(Layer(Drude(1e16, 1e13)),
                                Layer(Drude(1e16, 1e13)), [1e-7], 300.0,
                                n_max=20)
    assert pts[0].force_drude == 0.0
    assert pts[0].force_plasma == 0.0
    assert math.isnan(pts[0].ratio)


def test_sweep_requires_plasma_frequency():
    with pytest.raises(ValueError):
        drude_vs_plasma_sweep(Layer(Constant(5.0)), VAC, [1e-7], 300.0,
                              n_max=10)


def test_sweep_parallel_matches_serial():
    grid = [1e-7, 3e-7]
    serial = drude_vs_plasma_sweep(GOLD, VAC, grid, 300.0, n_max=60)
    parallel = drude_vs_plasma_sweep(GOLD, VAC, grid, 300.0, n_max=60,
                                     workers=2)
    assert [(p.d, p.force_drude, p.force_plasma) for p in serial] == \
        [(p.d, p.force_drude, p.force_plasma) for p in parallel]


def test_aluminum_gold_ratio_approaches_one():
    mats = MatsubaraConfig(300.0, n_max=300, zero_mode=DrudeLike())
    quad = QuadratureConfig(rel_tol=1e-7)
    ratios = []
    for d in np.geomspace(1e-7, 1e-5, 5):
        f_al = tangential_force_reduced(ALUMINUM, VAC, float(d), mats,
                                        quad).force_per_width
        f_au = tangential_force_reduced(GOLD, VAC, float(d), mats,
                                        quad).force_per_width
        ratios.append(f_al / f_au)
    gaps = [abs(r - 1.0) for r in ratios]
    assert gaps[-3] > gaps[-2] > gaps[-1]
    assert ratios[-1] == pytest.approx(1.0, abs=0.01)
    assert all(r > 1.0 for r in ratios)  # Al is the better low-freq mirror


def test_tabulated_gold_variants_differ_most_when_close():
    au1 = tabulated_gold(9.0, 0.035)
    au2 = tabulated_gold(8.45, 0.047, merge_below=4.2)
    mats = MatsubaraConfig(300.0, n_max=300, zero_mode=DrudeLike())
    quad = QuadratureConfig(rel_tol=1e-7)
    gaps = []
    for d in (1e-7, 3e-7, 1e-6):
        f1 = tangential_force_reduced(au1, VAC, d, mats, quad).force_per_width
        f2 = tangential_force_reduced(au2, VAC, d, mats, quad).force_per_width
        gaps.append(abs(f2 / f1 - 1.0))
    assert gaps[0] > gaps[1] > gaps[2]
