import math

import numpy as np
import pytest

from quadlandau.core import (
    ConfigError,
    PhysicalParams,
    QuantumNumbers,
    RadialSolution,
    Scenario,
    ScenarioKind,
    parse_kind,
    trapezoid_weights,
    validate,
)


def test_default_landau_configuration_is_valid():
    report = validate(PhysicalParams(), QuantumNumbers(0, 0), Scenario.landau())
    assert report.ok
    assert bool(report)
    report.raise_if_invalid()


def test_negative_quadrupole_rejected():
    report = validate(PhysicalParams(Mq=-1.0), QuantumNumbers(0, 0), Scenario.landau())
    assert "Mq must be > 0" in report.violations
    with pytest.raises(ConfigError):
        report.raise_if_invalid()


def test_potential_scenario_needs_n_at_least_one():
    report = validate(PhysicalParams(alpha=1.0), QuantumNumbers(0, 0), Scenario.inverse_radial())
    assert "n_radial >= 1 for potential scenarios" in report.violations


@pytest.mark.parametrize(
    "params, qn, scenario, message",
    [
        (PhysicalParams(m=0.0), QuantumNumbers(0, 0), Scenario.landau(), "m must be > 0"),
        (PhysicalParams(b=-2.0), QuantumNumbers(0, 0), Scenario.landau(), "b must be > 0"),
        (PhysicalParams(alpha=1.0, eta=1.0), QuantumNumbers(1, 0), Scenario.inverse_radial(),
         "alpha and eta cannot both be active"),
        (PhysicalParams(), QuantumNumbers(0, 0, k=0.3), Scenario.landau(), "k must be 0"),
        (PhysicalParams(), QuantumNumbers(-1, 0), Scenario.landau(), "n_radial must be >= 0"),
        (PhysicalParams(), QuantumNumbers(0, 0), Scenario.hardwall(0.0), "rho0 must satisfy 0 < rho0 < inf"),
        (PhysicalParams(), QuantumNumbers(1, 0), Scenario.linear(), "linear scenario needs a nonzero eta"),
        (PhysicalParams(alpha=math.inf), QuantumNumbers(1, 0), Scenario.inverse_radial(), "alpha must be finite"),
    ],
)
def test_violation_messages(params, qn, scenario, message):
    assert message in validate(params, qn, scenario).violations


def test_all_violations_reported_together():
    report = validate(PhysicalParams(m=-1, Mq=-1), QuantumNumbers(-1, 0), Scenario.landau())
    assert len(report.violations) >= 3


def test_tuned_sets_oscillator_frequency():
    p = PhysicalParams(m=2.0, Mq=0.5, alpha=1.0).tuned(3.0)
    assert p.Mb / p.m == pytest.approx(3.0)
    assert p.alpha == 1.0


def test_parse_kind_aliases():
    assert parse_kind("coulomb") is ScenarioKind.INVERSE_RADIAL
    assert parse_kind(" Hard-Wall ") is ScenarioKind.HARDWALL
    assert not ScenarioKind.LANDAU.is_potential
    assert ScenarioKind.LINEAR.is_potential
    with pytest.raises(ConfigError):
        parse_kind("harmonic")


def test_trapezoid_weights_integrate_rho_exactly():
    rho = np.linspace(0.0, 2.0, 11)
    # int_0^2 rho * 1 drho = 2; trapezoid is exact for linear integrands
    assert np.sum(trapezoid_weights(rho)) == pytest.approx(2.0, rel=1e-14)


def test_radial_solution_norm_and_nodes():
    rho = np.linspace(0.0, 10.0, 4001)
    w = trapezoid_weights(rho)
    values = np.exp(-(rho**2) / 2) * (1 - rho**2)
    values /= math.sqrt(np.sum(w * values**2))
    sol = RadialSolution(rho, values, 0.0, w, QuantumNumbers(1, 0), Scenario.landau(), 1.0, {})
    assert sol.norm() == pytest.approx(1.0, abs=1e-12)
    assert sol.sign_changes() == 1
