import math

import pytest

from zzsim.hamiltonian.models import CouplingSpec, DeviceSpec
from zzsim.shared.errors import ConfigError, NoFiniteSolutionError
from zzsim.statics.models import TunableCouplerParams
from zzsim.statics.services import (
    find_zero,
    gamma_closed_form,
    get_evaluator,
    static_zz_effective,
    static_zz_exact,
    static_zz_pt4,
    static_zz_report,
    static_zz_sw,
    zz_freedom_analytic_k,
    zz_freedom_condition,
    zz_sweep,
)
from zzsim.transforms.models import EffectiveTwoQubit
from zzsim.transforms.services import sw_effective


def effective(omega2: float, J10: float = 0.002, J01: float = 0.001) -> EffectiveTwoQubit:
    return EffectiveTwoQubit(
        omega1_bar=5.0,
        omega2_bar=omega2,
        delta1_bar=0.6,
        delta2_bar=-0.33,
        J={(0, 0): 0.0015, (1, 0): J10, (0, 1): J01, (1, 1): 0.0015},
    )


def q_omega(device: DeviceSpec) -> float:
    return device.subsystem('q2').params.omega


# ==================== Exacto y SW ====================

def test_uncoupled_device_has_no_zz(make_bus):
    device = make_bus(g=0.0)
    assert static_zz_exact(device) == pytest.approx(0.0, abs=1e-12)
    report = static_zz_report(device)
    assert report.zeta_sw == pytest.approx(0.0, abs=1e-12)
    assert report.zeta_pt4 is None


def test_exact_and_sw_agree_in_dispersive_regime(make_bus):
    device = make_bus(omega1=5.0, omega2=5.1, omega_c=6.3, g=0.05)
    report = static_zz_report(device)
    assert report.zeta_sw is not None
    assert math.copysign(1, report.zeta_exact) == math.copysign(1, report.zeta_sw)
    assert 0.5 < report.zeta_sw / report.zeta_exact < 2.0


def test_effective_model_matches_sw(make_bus):
    device = make_bus(omega1=5.0, omega2=5.1, omega_c=6.3, g=0.05)
    assert static_zz_effective(device) == pytest.approx(static_zz_sw(sw_effective(device)), rel=0.05)
    assert get_evaluator('effective')(device) == static_zz_effective(device)


def test_sw_closed_form():
    eff = effective(5.2)
    expected = 2 * 0.002 ** 2 / (0.2 - 0.6) - 2 * 0.001 ** 2 / (0.2 - 0.33)
    assert static_zz_sw(eff) == pytest.approx(expected)


def test_requires_two_qubits(make_explicit):
    device = DeviceSpec(subsystems=(make_explicit('q1', 5.0, -0.3),))
    with pytest.raises(ConfigError):
        static_zz_exact(device)


# ==================== Condición de cancelación ====================

def test_freedom_condition_zeroes_sw():
    condition = zz_freedom_condition(effective(5.2))
    assert condition.gamma == pytest.approx(2.0)
    eff = effective(5.0 + condition.delta_bar_required)
    assert static_zz_sw(eff) == pytest.approx(0.0, abs=1e-15)


def test_freedom_condition_without_finite_solution():
    with pytest.raises(NoFiniteSolutionError):
        zz_freedom_condition(effective(5.2, J10=0.001, J01=0.001))
    with pytest.raises(NoFiniteSolutionError):
        zz_freedom_condition(effective(5.2, J01=0.0))


def test_gamma_is_one_without_anharmonicity():
    assert gamma_closed_form(0.1, 1.2, 0.0, 0.0) == pytest.approx(1.0)
    assert gamma_closed_form(0.1, 1.2, 0.6, -0.33) != pytest.approx(1.0)


def test_analytic_k_at_resonance():
    assert zz_freedom_analytic_k(0.0) == pytest.approx(1.0)


# ==================== Cuarto orden ====================

def test_pt4_direct_coupling_only():
    p = TunableCouplerParams(
        omega1=5.12, omega2=5.0, omega_c=6.3,
        delta1=-0.322, delta2=-0.322, delta_c=-0.15,
        g1c=0.0, g2c=0.0, g12=0.008,
    )
    result = static_zz_pt4(p)
    d12 = 0.12
    assert result.zeta2 == pytest.approx(2 * 0.008 ** 2 * (1 / (d12 + 0.322) - 1 / (d12 - 0.322)))
    assert result.zeta3 == 0.0 and result.zeta4 == 0.0


def test_pt4_reported_for_tunable_coupler(make_explicit):
    device = DeviceSpec(
        subsystems=(
            make_explicit('q1', 5.12, -0.322),
            make_explicit('c', 6.345, -0.15, role='coupler'),
            make_explicit('q2', 5.0, -0.322),
        ),
        couplings=(
            CouplingSpec(i='q1', j='c', g=0.12),
            CouplingSpec(i='q2', j='c', g=0.12),
            CouplingSpec(i='q1', j='q2', g=0.008),
        ),
    )
    report = static_zz_report(device)
    assert report.zeta_pt4 is not None
    assert math.isfinite(report.zeta_pt4)


# ==================== Barridos ====================

def test_sweep_preserves_order(make_bus):
    values = [5.05, 5.1, 5.15]
    rows = zz_sweep(make_bus(), 'subsystems.q2.params.omega', values, q_omega, jobs=2)
    assert [row['subsystems.q2.params.omega'] for row in rows] == values
    assert [row['zeta'] for row in rows] == values


def test_find_zero_locates_root(make_bus):
    roots = find_zero(
        make_bus(), 'subsystems.q2.params.omega',
        lambda device: q_omega(device) - 5.123, (5.0, 5.5), tol=1e-7, jobs=1,
    )
    assert roots == [pytest.approx(5.123, abs=1e-6)]


def test_find_zero_discards_poles(make_bus):
    roots = find_zero(
        make_bus(), 'subsystems.q2.params.omega',
        lambda device: 1 / (q_omega(device) - 5.2), (5.0, 5.5), jobs=1,
    )
    assert roots == []


def test_unknown_evaluator():
    with pytest.raises(ConfigError):
        get_evaluator('nope')


def test_coupler_off_point_exact_and_fourth_order(device_file):
    device = device_file('pf_gate_off').device()
    path = 'subsystems.c.params.omega'
    exact = find_zero(device, path, static_zz_exact, (6.2, 6.5), jobs=1)
    fourth = find_zero(device, path, get_evaluator('pt4'), (6.2, 6.5), jobs=1)
    assert exact == [pytest.approx(6.347, abs=0.005)]
    assert fourth == [pytest.approx(6.341, abs=0.005)]
