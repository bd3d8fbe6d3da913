"""
Approximation of an operator by a norm-attaining one.

The field is lifted to nu_0 = h mu, where the defect at the constant function
1 is below eps_0 on U_0. Defect reductions at eps_n = r^n eps_0 then drive it
geometrically to zero while the perturbations sum to less than rho; the last
field is carried back by conj(h), where it nearly attains its norm at h.
"""

import logging
import math

import numpy as np
from scipy.optimize import bisect

from . certificate import CertificateSheet, CertificateError, SLACK_FLOOR
from . field import field_norm, field_distance, scale_rows, row_totals, defect_slacks, apply, \
    attainment_defect, oracle_exact_na
from . lift import lift, MODE_EXACT, LiftError
from . reduction import ReductionParams, HypothesisError, CaseError, QuantizationError, \
    perturbation_bound, reduce, CASE_TRIVIAL, SELECTION_PEAK


DEFAULT_R = 0.81

# share of rho the closed-form budget may use
EPSILON_MARGIN = 0.9


class IterationError(Exception):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


class IterationConfig(object):
    def __init__(self, rho, r=DEFAULT_R, eps0=None, max_iter=500, defect_tol=1e-8,
                 mode=MODE_EXACT, arcs=None, selection=SELECTION_PEAK, shortcut=True):

        if not rho > 0:
            raise IterationError("rho should be positive")
        if not 0.5 < r < 1:
            raise IterationError("r should lie in (1/2, 1)")
        if eps0 is not None and not eps0 > 0:
            raise IterationError("eps0 should be positive")
        if max_iter < 1:
            raise IterationError("max_iter should be at least 1")
        if not defect_tol > 0:
            raise IterationError("defect_tol should be positive")

        self.rho = float(rho)
        self.r = float(r)
        self.eps0 = eps0
        self.max_iter = int(max_iter)
        self.defect_tol = float(defect_tol)
        self.mode = mode
        self.arcs = arcs or None
        self.selection = selection
        self.shortcut = shortcut

    def resolve_eps0(self, m):
        if self.eps0 is not None:
            return float(self.eps0)
        return choose_epsilon0(m, self.rho, self.r)

    def dump(self):
        return {
            "rho": self.rho,
            "r": self.r,
            "eps0": self.eps0,
            "max_iter": self.max_iter,
            "defect_tol": self.defect_tol,
            "mode": self.mode,
            "arcs": self.arcs,
            "selection": self.selection,
            "shortcut": self.shortcut
        }


def total_budget(m, eps0, r):
    """Closed form of sqrt(2 m eps0) sum r^(n/2) + 2 eps0 sum r^n."""
    return math.sqrt(2 * m * eps0) / (1 - math.sqrt(r)) + 2 * eps0 / (1 - r)


def choose_epsilon0(m, rho, r):
    if not rho > 0 or not 0.5 < r < 1:
        raise IterationError("choose_epsilon0 needs rho > 0 and r in (1/2, 1)")

    if m <= 0:
        return rho / 4

    target = EPSILON_MARGIN * rho
    # at this eps0 the linear term alone already spends the target
    upper = target * (1 - r) / 2

    eps0 = bisect(lambda eps: total_budget(m, eps, r) - target, 0.0, upper, xtol=upper * 1e-15, maxiter=500)

    while eps0 > 0 and total_budget(m, eps0, r) > target:
        eps0 = float(np.nextafter(eps0, 0.0))

    return eps0


def terminal_level(eps0, r, defect_tol):
    """(N, eps_N): the first level r^N eps0 below defect_tol."""
    level, eps = 0, eps0
    while eps >= defect_tol:
        eps *= r
        level += 1
    return level, eps


class TraceRow(object):
    def __init__(self, n, eps, norm, case_tag, perturbation, bound, defect, min_slack, certified=True, row=None):
        self.n = n
        self.eps = eps
        self.norm = norm
        self.case_tag = case_tag
        self.perturbation = perturbation
        self.bound = bound
        self.defect = defect
        self.min_slack = min_slack
        self.certified = certified
        self.row = row

    def dump(self):
        return {
            "n": self.n,
            "eps_n": self.eps,
            "norm_nu": self.norm,
            "case": self.case_tag,
            "perturbation": self.perturbation,
            "bound": self.bound,
            "defect_at_one": self.defect,
            "min_slack": self.min_slack
        }


class IterationTrace(object):
    def __init__(self, eps0, r, rho, nu0_norm, lifted):
        self.eps0 = eps0
        self.r = r
        self.rho = rho
        self.nu0_norm = nu0_norm
        self.lifted = lifted
        self.rows = []

    @property
    def total_perturbation(self):
        return math.fsum(row.perturbation for row in self.rows)


class NACertificate(object):
    def __init__(self, h, field, distance, defect, eps_final, complete, certified, steps,
                 eps0, nu0_norm, budget, tail_bound, oracle_defect, sheet):
        self.h = h
        self.field = field
        self.distance = distance
        self.defect = defect
        self.eps_final = eps_final
        self.complete = complete
        self.certified = certified
        self.steps = steps
        self.eps0 = eps0
        self.nu0_norm = nu0_norm
        self.budget = budget
        self.tail_bound = tail_bound
        self.oracle_defect = oracle_defect
        self.sheet = sheet

    @property
    def limit_defect_bound(self):
        """Defect at h of every field within tail_bound of the final one, the limit included."""
        return self.eps_final + 2 * self.tail_bound

    @property
    def passed(self):
        return self.complete and self.certified and self.sheet.passed

    def dump(self):
        return {
            "passed": self.passed,
            "complete": self.complete,
            "certified": self.certified,
            "steps": self.steps,
            "eps0": self.eps0,
            "eps_final": self.eps_final,
            "norm": self.nu0_norm,
            "distance": self.distance,
            "defect": self.defect,
            "oracle_defect": self.oracle_defect,
            "budget": self.budget,
            "tail_bound": self.tail_bound,
            "limit_defect_bound": self.limit_defect_bound,
            "witness": [[value.real, value.imag] for value in self.h.values],
            "certificates": self.sheet.dump()
        }


def defect_at_one(nu, surviving):
    """||nu|| - max over U of Re nu(s)(K), with the row where the max is taken."""
    totals = np.real(row_totals(nu))
    best = max(surviving, key=lambda s: (totals[s], -s))
    return field_norm(nu) - float(totals[best]), best


def run(mu, config):
    m = field_norm(mu)
    eps0 = config.resolve_eps0(m)

    if m > 0 and not total_budget(m, eps0, config.r) < config.rho:
        raise IterationError("eps0={0!r} is too large: budget {1!r} is not below rho={2!r}".format(
            eps0, total_budget(m, eps0, config.r), config.rho))

    logging.info("Approximating a {0}x{1} field of norm {2!r} within rho={3!r} (eps0={4!r}, r={5!r}, {6})".format(
        mu.s_size, mu.k_size, m, config.rho, eps0, config.r, config.mode))

    try:
        lifted = lift(mu, eps0, mode=config.mode, arcs=config.arcs)
    except CertificateError as e:
        e.step = 0
        raise e
    except LiftError as e:
        raise IterationError(e.message)

    h = lifted.h
    nu0 = scale_rows(mu, h.values)
    nu0_norm = field_norm(nu0)

    slacks = defect_slacks(nu0, eps0)
    surviving = [s for s in lifted.surviving if slacks[s] > SLACK_FLOOR]
    if not surviving:
        raise CertificateError("Lifted field has no row with Re nu0(s)(K) > ||nu0|| - eps0", step=0)

    trace = IterationTrace(eps0, config.r, config.rho, nu0_norm, lifted)

    _, eps_final = terminal_level(eps0, config.r, config.defect_tol)

    # a fixed partition cannot follow the shrinking gamma_n, so arcs only shape the lift
    params = ReductionParams(config.r, eps0, mode=config.mode, selection=config.selection)
    nu = nu0
    n = 0
    complete = False

    while True:
        defect, best = defect_at_one(nu, surviving)

        if params.eps < config.defect_tol:
            complete = True
            eps_final = params.eps
        elif config.shortcut and eps_final - defect > SLACK_FLOOR:
            # the zero-cost reductions down to the terminal level apply at once
            complete = True
            final_slacks = defect_slacks(nu, eps_final)
            surviving = [s for s in surviving if final_slacks[s] > SLACK_FLOOR]
        elif n >= config.max_iter:
            eps_final = params.eps

        if complete or n >= config.max_iter:
            trace.rows.append(TraceRow(
                n, params.eps, field_norm(nu), CASE_TRIVIAL, 0.0,
                perturbation_bound(nu0_norm, params.eps), defect, eps_final - defect,
                certified=eps_final - defect > SLACK_FLOOR, row=best))
            break

        try:
            outcome = reduce(nu, surviving, params)
        except CertificateError as e:
            e.step = n
            raise e
        except (HypothesisError, CaseError, QuantizationError) as e:
            raise CertificateError(str(e), step=n)

        logging.debug("step {0}: eps={1!r} case={2} perturbation={3!r} defect={4!r}".format(
            n, params.eps, outcome.case_tag, outcome.perturbation, defect))

        trace.rows.append(TraceRow(
            n, params.eps, field_norm(nu), outcome.case_tag, outcome.perturbation,
            perturbation_bound(nu0_norm, params.eps), defect,
            min(outcome.sheet.strict_min_slack, params.eps - defect),
            certified=outcome.sheet.passed and params.eps - defect > SLACK_FLOOR, row=best))

        nu = outcome.field
        surviving = list(outcome.surviving)
        params = params.following()
        n += 1

    if not complete:
        logging.warning("max_iter={0} reached at eps={1!r} before defect_tol={2!r}: partial certificate".format(
            config.max_iter, params.eps, config.defect_tol))

    certificate = certify(mu, nu0, nu, h, trace, eps_final, complete, config)

    logging.info("Done in {0} steps: distance {1!r}, defect {2!r} (eps_N={3!r}), {4}".format(
        certificate.steps, certificate.distance, certificate.defect, eps_final,
        "passed" if certificate.passed else "FAILED"))

    return certificate, trace


def certify(mu, nu0, nu, h, trace, eps_final, complete, config):
    sheet = CertificateSheet("norm attainment")

    final = scale_rows(nu, h.conjugate().values)
    final_norm = field_norm(final)
    distance = field_distance(mu, final)
    lifted_distance = field_distance(nu0, nu)
    defect = attainment_defect(final, h)
    scale = max(final_norm, 1.0)

    sheet.record("||mu_N - mu|| < rho", distance, config.rho)
    sheet.record("| ||mu_N - mu|| - ||nu_N - nu0|| |", abs(distance - lifted_distance),
                 SLACK_FLOOR * max(distance, 1.0), strict=False)

    if complete:
        sheet.record("defect at h < eps_N", defect, eps_final)
        sheet.record("eps_N <= defect_tol", eps_final, config.defect_tol, strict=False)

    images = apply(final, h)
    sheet.record("|T_N h(s) - nu_N(s)(K)|", float(np.max(np.abs(images - row_totals(nu)))),
                 SLACK_FLOOR * scale, strict=False)
    sheet.record("| |h| - 1 |", float(np.max(np.abs(np.abs(h.values) - 1.0))), SLACK_FLOOR, strict=False)

    total = trace.total_perturbation
    budget = total_budget(trace.nu0_norm, trace.eps0, config.r)
    sheet.record("sum ||nu_(n+1) - nu_n|| <= budget", total, budget, strict=False)
    if trace.nu0_norm > 0:
        sheet.record("budget <= 0.9 rho", budget, EPSILON_MARGIN * config.rho, strict=False)

    tail_bound = total_budget(trace.nu0_norm, eps_final, config.r)
    sheet.record("sum ||nu_(n+1) - nu_n|| + tail < rho", total + tail_bound, config.rho,
                 note="the untruncated limit stays within rho")

    if final_norm > 0:
        oracle_defect = attainment_defect(final, oracle_exact_na(final))
        sheet.record("oracle defect <= 1e-12 ||mu_N||", oracle_defect, SLACK_FLOOR * final_norm, strict=False)
        sheet.record("oracle defect <= defect at h", oracle_defect, defect, strict=False)
    else:
        oracle_defect = 0.0

    certified = all(row.certified for row in trace.rows)

    return NACertificate(h, final, distance, defect, eps_final, complete, certified,
                         len(trace.rows) - 1, trace.eps0, trace.nu0_norm, budget, tail_bound, oracle_defect, sheet)


def verify_trace(trace, nu0_norm, rho):
    """Offline re-check of a trace. Reports every inequality; never raises."""

    sheet = CertificateSheet("trace verification")
    eps0, r = trace.eps0, trace.r
    previous = None

    for row in trace.rows:
        sheet.record("step {0}: perturbation <= sqrt(2 ||nu0|| eps_n) + 2 eps_n".format(row.n),
                     row.perturbation, perturbation_bound(nu0_norm, row.eps), strict=False)
        sheet.record("step {0}: defect at 1 < eps_n".format(row.n), row.defect, row.eps)
        sheet.record("step {0}: eps_n <= r^n eps0".format(row.n), row.eps,
                     eps0 * r ** row.n * (1 + 1e-9), strict=False)
        if previous is not None:
            sheet.record("step {0}: ||nu_n|| <= ||nu_(n-1)||".format(row.n), row.norm, previous.norm, strict=False)
        previous = row

    total = trace.total_perturbation
    sheet.record("sum of perturbations < rho", total, rho)

    if nu0_norm > 0:
        budget = total_budget(nu0_norm, eps0, r)
        sheet.record("sum of perturbations <= budget", total, budget, strict=False)
        sheet.record("budget <= 0.9 rho", budget, EPSILON_MARGIN * rho, strict=False)

    return sheet
