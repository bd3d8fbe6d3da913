
import math

import numpy as np
import pytest

from anthill.normattain.model.certificate import CertificateError, SLACK_FLOOR
from anthill.normattain.model.field import MeasureField, field_norm, attainment_defect, oracle_exact_na
from anthill.normattain.model.instance import gen
from anthill.normattain.model.iteration import IterationConfig, IterationError, choose_epsilon0, total_budget, \
    terminal_level, run, verify_trace, EPSILON_MARGIN
from anthill.normattain.model.lift import MODE_EXACT, MODE_FAITHFUL
from anthill.normattain.model.reduction import CASE_TRIVIAL, CASE_BLEND, SELECTION_FIRST

from strategies import random_field


def test_total_budget_closed_form():
    m, eps0, r = 1.5, 1e-4, 0.81
    partial = math.fsum(math.sqrt(2 * m * eps0) * r ** (n / 2) + 2 * eps0 * r ** n for n in range(2000))
    assert total_budget(m, eps0, r) == pytest.approx(partial, rel=1e-12)


def test_choose_epsilon0():
    eps0 = choose_epsilon0(1.0, 0.1, 0.81)
    assert 4.0e-5 < eps0 < 4.03e-5
    assert total_budget(1.0, eps0, 0.81) <= EPSILON_MARGIN * 0.1
    assert total_budget(1.0, eps0, 0.81) == pytest.approx(EPSILON_MARGIN * 0.1, rel=1e-9)


def test_choose_epsilon0_zero_field():
    assert choose_epsilon0(0.0, 0.1, 0.81) == 0.025


def test_choose_epsilon0_validation():
    with pytest.raises(IterationError):
        choose_epsilon0(1.0, 0.0, 0.81)
    with pytest.raises(IterationError):
        choose_epsilon0(1.0, 0.1, 0.5)


def test_terminal_level():
    level, eps = terminal_level(1e-5, 0.81, 1e-8)
    assert eps < 1e-8
    assert eps / 0.81 >= 1e-8
    assert eps == pytest.approx(1e-5 * 0.81 ** level)
    assert terminal_level(1e-9, 0.81, 1e-8) == (0, 1e-9)


def test_config_validation():
    with pytest.raises(IterationError):
        IterationConfig(0)
    with pytest.raises(IterationError):
        IterationConfig(0.1, r=1.0)
    with pytest.raises(IterationError):
        IterationConfig(0.1, eps0=-1)
    with pytest.raises(IterationError):
        IterationConfig(0.1, max_iter=0)
    with pytest.raises(IterationError):
        IterationConfig(0.1, defect_tol=0)


def test_run_rejects_large_eps0():
    mu = random_field(np.random.default_rng(1), norm=1.0)
    with pytest.raises(IterationError):
        run(mu, IterationConfig(0.1, eps0=0.1))


def test_run_zero_field():
    mu = MeasureField.zero(2, 3)
    certificate, trace = run(mu, IterationConfig(0.1))

    assert certificate.passed
    assert certificate.distance == 0.0
    assert certificate.steps == 0
    assert len(trace.rows) == 1
    assert trace.rows[0].case_tag == CASE_TRIVIAL
    assert trace.eps0 == 0.025
    assert verify_trace(trace, trace.nu0_norm, 0.1).passed


def test_run_zero_field_without_shortcut():
    mu = MeasureField.zero(1, 1)
    certificate, trace = run(mu, IterationConfig(0.1, shortcut=False))

    assert certificate.passed
    assert certificate.eps_final < 1e-8
    assert all(row.case_tag == CASE_TRIVIAL and row.perturbation == 0.0 for row in trace.rows)
    assert verify_trace(trace, trace.nu0_norm, 0.1).passed


def test_run_seeded_instance():
    mu, _ = gen(7, 4, 3, 1.0)
    certificate, trace = run(mu, IterationConfig(0.1))

    assert certificate.passed, certificate.sheet.lines()
    assert certificate.complete
    assert certificate.distance < 0.1
    assert certificate.defect < certificate.eps_final <= 1e-8
    assert certificate.oracle_defect <= SLACK_FLOOR * field_norm(certificate.field)
    assert np.all(np.abs(np.abs(certificate.h.values) - 1) < SLACK_FLOOR)
    assert certificate.limit_defect_bound > certificate.eps_final
    assert verify_trace(trace, trace.nu0_norm, 0.1).passed


@pytest.mark.parametrize("mode", [MODE_EXACT, MODE_FAITHFUL])
def test_run_full_chain(mode):
    mu, _ = gen(3, 5, 4, 1.5)
    config = IterationConfig(0.1, mode=mode, shortcut=False)
    certificate, trace = run(mu, config)

    assert certificate.passed, certificate.sheet.lines()
    n_final, eps_final = terminal_level(trace.eps0, config.r, config.defect_tol)
    assert certificate.steps == n_final
    assert certificate.eps_final == eps_final

    for row in trace.rows[:-1]:
        if mode == MODE_EXACT:
            assert row.case_tag == CASE_BLEND
        assert row.perturbation <= row.bound + SLACK_FLOOR
        assert row.defect < row.eps
        assert row.eps <= trace.eps0 * config.r ** row.n * (1 + 1e-9)

    assert trace.total_perturbation <= total_budget(trace.nu0_norm, trace.eps0, config.r)
    assert verify_trace(trace, trace.nu0_norm, 0.1).passed


def test_run_faithful_deep_steps_certify():
    mu, _ = gen(0, 7, 6, 0.547)
    certificate, trace = run(mu, IterationConfig(0.05, mode=MODE_FAITHFUL, shortcut=False))

    assert certificate.passed, certificate.sheet.lines()
    assert certificate.certified
    assert all(row.min_slack > SLACK_FLOOR for row in trace.rows)


def test_reduction_steps_keep_the_run_certified():
    mu, _ = gen(3, 5, 4, 1.5)
    certificate, trace = run(mu, IterationConfig(0.1, shortcut=False))

    assert len(trace.rows) > 1
    assert all(row.certified for row in trace.rows)
    assert certificate.certified and certificate.passed


def test_run_first_selection():
    mu, _ = gen(5, 3, 6, 0.7)
    certificate, trace = run(mu, IterationConfig(0.05, selection=SELECTION_FIRST, shortcut=False))
    assert certificate.passed
    assert verify_trace(trace, trace.nu0_norm, 0.05).passed


def test_run_partial_certificate():
    mu, _ = gen(2, 4, 4, 1.0)
    certificate, trace = run(mu, IterationConfig(0.1, max_iter=3, shortcut=False))

    assert not certificate.complete
    assert not certificate.passed
    assert certificate.steps == 3
    assert len(trace.rows) == 4
    assert certificate.eps_final > 1e-8


def test_run_is_deterministic():
    mu, _ = gen(9, 6, 5, 2.0)
    first, first_trace = run(mu, IterationConfig(0.5, shortcut=False))
    second, second_trace = run(mu, IterationConfig(0.5, shortcut=False))

    assert first.dump() == second.dump()
    assert [row.dump() for row in first_trace.rows] == [row.dump() for row in second_trace.rows]
    assert first.field == second.field


def test_certificate_distance_identity():
    mu, _ = gen(4, 4, 4, 1.0)
    certificate, _ = run(mu, IterationConfig(0.1, shortcut=False))
    inequality = certificate.sheet.find("| ||mu_N - mu|| - ||nu_N - nu0|| |")
    assert inequality.holds


def test_verify_trace_names_tampered_step():
    mu, _ = gen(1, 3, 3, 1.0)
    _, trace = run(mu, IterationConfig(0.1, shortcut=False))

    trace.rows[2].perturbation = trace.rows[2].bound * 2
    report = verify_trace(trace, trace.nu0_norm, 0.1)

    assert not report.passed
    names = [inequality.name for inequality in report.failures]
    assert "step 2: perturbation <= sqrt(2 ||nu0|| eps_n) + 2 eps_n" in names


def test_failed_step_is_reported_with_index(monkeypatch):
    from anthill.normattain.model import iteration

    def broken(mu, surviving, params):
        raise CertificateError("forced")

    monkeypatch.setattr(iteration, "reduce", broken)
    mu, _ = gen(1, 3, 3, 1.0)

    with pytest.raises(CertificateError) as e:
        run(mu, IterationConfig(0.1, shortcut=False))
    assert e.value.step == 0
    assert str(e.value) == "step 0: forced"


@pytest.mark.parametrize("mode", [MODE_EXACT, MODE_FAITHFUL])
def test_pipeline_acceptance(mode):
    rng = np.random.default_rng(2718)

    for seed in range(200):
        k_size = int(rng.integers(1, 9))
        s_size = int(rng.integers(1, 9))
        scale = float(rng.uniform(0.01, 2.0))
        mu, _ = gen(seed, k_size, s_size, scale)

        for rho in (0.05, 0.1, 0.5):
            certificate, trace = run(mu, IterationConfig(rho, mode=mode, shortcut=False))

            assert certificate.passed, (seed, rho, certificate.sheet.lines())
            assert certificate.certified
            assert all(row.certified for row in trace.rows)
            assert certificate.distance < rho
            assert certificate.defect < certificate.eps_final <= 1e-8
            assert certificate.budget <= EPSILON_MARGIN * rho + SLACK_FLOOR
            assert certificate.oracle_defect <= SLACK_FLOOR * field_norm(certificate.field)
            assert attainment_defect(certificate.field, oracle_exact_na(certificate.field)) <= certificate.defect + SLACK_FLOOR

            report = verify_trace(trace, trace.nu0_norm, rho)
            assert report.passed, report.lines()
            for row in trace.rows:
                assert row.defect < trace.eps0 * trace.r ** row.n * (1 + 1e-9)


def test_full_chain_acceptance():
    rng = np.random.default_rng(1618)

    for seed in range(20):
        mu = random_field(rng)
        for mode in (MODE_EXACT, MODE_FAITHFUL):
            certificate, trace = run(mu, IterationConfig(0.1, mode=mode, shortcut=False))
            assert certificate.passed, (seed, mode, certificate.sheet.lines())
            assert certificate.certified
            assert verify_trace(trace, trace.nu0_norm, 0.1).passed
