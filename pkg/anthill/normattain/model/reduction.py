"""
One defect-reduction step.

Given a field mu with M = ||mu||, a nonempty row set U, a ratio r in (1/2, 1)
and eps > 0 such that Re mu(s)(K) > M - eps on U, a field mu' and a nonempty
U' subset of U are produced with

    ||mu'|| <= M,
    Re mu'(s)(K) > ||mu'|| - r eps on U',
    ||mu' - mu|| <= sqrt(2 M eps) + 2 eps.

The bump function on S is the indicator of a single row, which is continuous
on a discrete space; every other row is left untouched.
"""

import math

import numpy as np

from . certificate import CertificateSheet, SLACK_FLOOR
from . field import Witness, field_norm, field_distance, row_norms, row_totals, \
    defect_slacks, peak_row
from . lift import CirclePartition, LatticeQuantizer, MODES, MODE_EXACT
from . measure import ComplexMeasure, WeightFunction, polar_decompose, total_variation


CASE_TRIVIAL = 0
CASE_BUMP = 1
CASE_BLEND = 2

SELECTION_PEAK = "peak"
SELECTION_FIRST = "first"

SELECTIONS = (SELECTION_PEAK, SELECTION_FIRST)


class ParamsError(Exception):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


class CaseError(Exception):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


class QuantizationError(Exception):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


class HypothesisError(Exception):
    def __init__(self, message, row=None, slack=None):
        self.message = message
        self.row = row
        self.slack = slack

    def __str__(self):
        return self.message


class ReductionParams(object):
    def __init__(self, r, eps, gamma=None, eta=None, mode=MODE_EXACT, arcs=None, selection=SELECTION_PEAK):
        r = float(r)
        eps = float(eps)

        if not 0.5 < r < 1:
            raise ParamsError("r should lie in (1/2, 1), got {0!r}".format(r))
        if not eps > 0:
            raise ParamsError("eps should be positive, got {0!r}".format(eps))
        if mode not in MODES:
            raise ParamsError("Unknown mode: {0}".format(mode))
        if selection not in SELECTIONS:
            raise ParamsError("Unknown selection: {0}".format(selection))

        default_gamma, default_eta = ReductionParams.defaults(r, eps, gamma)

        self.r = r
        self.eps = eps
        self.a = 1.0 - r
        self.gamma = default_gamma if gamma is None else float(gamma)
        self.eta = default_eta if eta is None else float(eta)
        self.mode = mode
        self.arcs = arcs or None
        self.selection = selection

        if not 0 < self.gamma < (2 * r - 1) * eps:
            raise ParamsError("gamma should lie in (0, (2r - 1) eps) = (0, {0!r}), got {1!r}".format(
                (2 * r - 1) * eps, self.gamma))
        if not self.eta > 0:
            raise ParamsError("eta should be positive, got {0!r}".format(self.eta))
        if not 2 * self.a * eps + self.gamma + 2 * self.eta < 2 * eps:
            raise ParamsError("2 a eps + gamma + 2 eta should stay below 2 eps")

    @staticmethod
    def defaults(r, eps, gamma=None):
        """gamma halfway to (2r - 1) eps, eta a quarter of what the chain leaves."""
        if gamma is None:
            gamma = (2 * r - 1) * eps / 2
        eta = (2 * eps - 2 * (1 - r) * eps - gamma) / 4
        return gamma, eta

    @property
    def reduced_eps(self):
        return self.r * self.eps

    def following(self):
        """Parameters of the next step, at level r eps."""
        return ReductionParams(self.r, self.reduced_eps, mode=self.mode, arcs=self.arcs, selection=self.selection)

    def quantizer(self, nu_norm):
        if self.arcs:
            return CirclePartition(self.arcs)
        return LatticeQuantizer(self.gamma / nu_norm)


class Corrector(object):
    """q = P(u) with u a quantized approximation of conj(theta)."""

    def __init__(self, q, u, error, raw_error, quantizer=None):
        self.q = q
        self.u = u
        self.error = error
        self.raw_error = raw_error
        self.quantizer = quantizer


class ReductionOutcome(object):
    def __init__(self, field, surviving, case_tag, perturbation, bound,
                 pick=None, blend_weight=None, corrector=None, bump_site=None, blend_set=None, sheet=None):
        self.field = field
        self.surviving = tuple(surviving)
        self.case_tag = case_tag
        self.perturbation = perturbation
        self.bound = bound
        self.pick = pick
        self.blend_weight = blend_weight
        self.corrector = corrector
        self.bump_site = bump_site
        self.blend_set = blend_set
        self.sheet = sheet or CertificateSheet("defect reduction")


def perturbation_bound(m, eps):
    return math.sqrt(2 * m * eps) + 2 * eps


def radial_projection(z):
    """Metric projection of C onto the closed unit disc."""
    z = np.asarray(z, dtype=np.complex128)
    moduli = np.abs(z)
    outside = moduli > 1
    projected = np.where(outside, z / np.where(outside, moduli, 1.0), z)
    if projected.ndim == 0:
        return complex(projected)
    return projected


def verify_hypothesis(mu, surviving, eps):
    if not surviving:
        raise HypothesisError("Row set U should be nonempty")

    slacks = defect_slacks(mu, eps)

    for s in surviving:
        if not 0 <= s < mu.s_size:
            raise HypothesisError("Row {0} is outside S".format(s), row=s)
        if not slacks[s] > SLACK_FLOOR:
            raise HypothesisError(
                "Hypothesis Re mu(s)(K) > ||mu|| - eps fails at row {0}, slack {1!r}".format(s, slacks[s]),
                row=s, slack=float(slacks[s]))

    return slacks


def classify_case(mu, surviving, params):
    m = field_norm(mu)
    if m <= 0:
        raise CaseError("Zero field is reduced trivially and has no case")

    verify_hypothesis(mu, surviving, params.eps)

    if np.max(row_norms(mu)[list(surviving)]) <= m - params.a * params.eps:
        return CASE_BUMP
    return CASE_BLEND


def select_row(mu, surviving, params, threshold=None):
    if params.selection == SELECTION_PEAK:
        return peak_row(mu, surviving)

    norms = row_norms(mu)
    for s in sorted(surviving):
        if threshold is None or norms[s] > threshold:
            return s

    raise CaseError("No row of U passes the selection threshold")


def case1_dirac_bump(mu, surviving, params):
    m = field_norm(mu)
    eps = params.eps
    bump = params.a * eps
    norms = row_norms(mu)

    if m <= 0 or np.max(norms[list(surviving)]) > m - bump:
        raise CaseError("Dirac bump needs sup over U of ||mu(s)|| <= M - a eps")

    sheet = CertificateSheet("defect reduction, case 1, eps={0!r}".format(eps))

    s0 = select_row(mu, surviving, params)
    t0 = int(np.argmax(np.abs(mu.matrix[s0])))

    reduced = mu.replace_rows({s0: mu.row(s0) + ComplexMeasure.dirac(mu.k_size, t0, bump)})

    reduced_norm = field_norm(reduced)
    reduced_eps = params.reduced_eps
    totals = np.real(row_totals(reduced))
    perturbation = field_distance(mu, reduced)
    bound = perturbation_bound(m, eps)

    sheet.require("sup_U ||mu(s)|| <= M - a eps", float(np.max(norms[list(surviving)])), m - bump, strict=False)
    sheet.require("||mu'(s0)|| <= ||mu(s0)|| + a eps", total_variation(reduced.row(s0)), norms[s0] + bump,
                  strict=False)
    sheet.require("||mu'|| <= M", reduced_norm, m, strict=False)
    sheet.require("Re mu'(s0)(K) = Re mu(s0)(K) + a eps",
                  abs(totals[s0] - (np.real(row_totals(mu))[s0] + bump)), SLACK_FLOOR * max(m, 1.0),
                  strict=False)
    sheet.require("||mu'|| - r eps < Re mu'(s0)(K)", reduced_norm - reduced_eps, totals[s0])
    sheet.require("||mu' - mu|| <= a eps", perturbation, bump, strict=False)
    sheet.require("||mu' - mu|| <= sqrt(2 M eps) + 2 eps", perturbation, bound, strict=False)

    slacks = defect_slacks(reduced, reduced_eps)
    remaining = [s for s in sorted(surviving) if slacks[s] > SLACK_FLOOR]

    return ReductionOutcome(reduced, remaining, CASE_BUMP, perturbation, bound,
                            pick=s0, bump_site=(s0, t0), sheet=sheet)


def build_q(nu, gamma, mode=MODE_EXACT, quantizer=None):
    if gamma <= 0:
        raise QuantizationError("gamma should be positive")

    phi = polar_decompose(nu).conjugate_phases
    variation = np.abs(nu.atoms)
    nu_norm = total_variation(nu)

    if mode == MODE_EXACT or nu_norm <= 0:
        return Corrector(Witness(phi), phi, 0.0, 0.0)

    if quantizer is None:
        quantizer = LatticeQuantizer(gamma / nu_norm)

    radius = quantizer_radius(quantizer)
    if radius * nu_norm >= gamma:
        raise QuantizationError(
            "Quantization radius {0!r} cannot reach gamma={1!r} on a measure of norm {2!r}, use a finer grid".format(
                radius, gamma, nu_norm))

    u = quantizer.quantize(phi)
    q = radial_projection(u)

    raw_error = float(np.dot(np.abs(u - phi), variation))
    error = float(np.dot(np.abs(q - phi), variation))

    return Corrector(Witness(q), u, error, raw_error, quantizer)


def quantizer_radius(quantizer):
    """Largest distance from a point of the unit circle to its quantized value."""
    if isinstance(quantizer, CirclePartition):
        return 2 * math.sin(math.pi / (2 * quantizer.arc_count))
    return quantizer.spacing / math.sqrt(2)


def case2_phase_blend(mu, surviving, params):
    m = field_norm(mu)
    eps = params.eps
    a_eps = params.a * eps
    norms = row_norms(mu)

    if m <= 0 or not np.max(norms[list(surviving)]) > m - a_eps:
        raise CaseError("Phase blend needs some row of U with ||mu(s)|| > M - a eps")

    sheet = CertificateSheet("defect reduction, case 2, eps={0!r}".format(eps))

    s1 = select_row(mu, surviving, params, threshold=m - a_eps)
    nu = mu.row(s1)
    nu_norm = norms[s1]
    variation = np.abs(nu.atoms)
    phi = polar_decompose(nu).conjugate_phases

    corrector = build_q(nu, params.gamma, params.mode,
                        params.quantizer(nu_norm) if params.mode != MODE_EXACT and nu_norm > 0 else None)
    q = corrector.q.values

    # lower bound of Re int q dmu(s1)
    pairing = float(np.real(np.dot(q, nu.atoms)))
    sheet.require("M - a eps < ||mu(s1)||", m - a_eps, nu_norm)
    sheet.require("int |P(u) - conj(theta)| d|mu(s1)| <= int |u - conj(theta)| d|mu(s1)|",
                  corrector.error, corrector.raw_error, strict=False)
    sheet.require("int |q - conj(theta)| d|mu(s1)| < gamma", corrector.error, params.gamma)
    sheet.require("||mu(s1)|| - gamma < Re int q dmu(s1)", nu_norm - params.gamma, pairing)
    sheet.require("M - r eps < Re int q dmu(s1)", m - params.reduced_eps, pairing)

    # perturbation cost at s1
    phase_gaps = np.abs(phi - 1)
    phase_cost = float(np.dot(phase_gaps, variation))
    # ||mu(s1)|| - Re mu(s1)(K), summed atom by atom as |phi - 1|^2 / 2
    row_defect = float(np.dot(variation, phase_gaps ** 2)) / 2
    cauchy = math.sqrt(2 * nu_norm * row_defect)
    root = math.sqrt(2 * m * eps)
    blend_cost = float(np.dot(np.abs(q - 1), variation))

    sheet.require("int |conj(theta) - 1| d|mu(s1)| <= sqrt(2 ||mu(s1)|| (||mu(s1)|| - Re mu(s1)(K)))",
                  phase_cost, cauchy, strict=False)
    sheet.require("sqrt(2 ||mu(s1)|| (||mu(s1)|| - Re mu(s1)(K))) < sqrt(2 M eps)", cauchy, root)
    sheet.require("int |q - 1| d|mu(s1)| < gamma + sqrt(2 M eps)", blend_cost, params.gamma + root)

    # rows whose phi-weighted variation stays close to that of s1
    blend_weight = WeightFunction(np.clip(np.abs(q - 1) / 2, 0.0, 1.0))
    retained = np.abs(mu.matrix).dot(blend_weight.complement().values)
    blend_set = [s for s in sorted(surviving) if retained[s] - (retained[s1] - params.eta) > SLACK_FLOOR]
    costs = np.abs(mu.matrix).dot(np.abs(q - 1))
    chain = 2 * a_eps + blend_cost + 2 * params.eta
    bound = perturbation_bound(m, eps)

    for s in blend_set:
        sheet.require("int |q - 1| d|mu({0})| < 2 a eps + int |q - 1| d|mu(s1)| + 2 eta".format(s),
                      costs[s], chain)
        sheet.require("int |q - 1| d|mu({0})| < sqrt(2 M eps) + 2 eps".format(s), costs[s], bound)

    reduced = mu.replace_rows({s1: q * nu.atoms})

    reduced_norm = field_norm(reduced)
    reduced_eps = params.reduced_eps
    totals = np.real(row_totals(reduced))
    perturbation = field_distance(mu, reduced)

    sheet.require("||mu'(s1)|| <= ||mu(s1)||", total_variation(reduced.row(s1)), nu_norm, strict=False)
    sheet.require("||mu'|| <= M", reduced_norm, m, strict=False)
    sheet.require("||mu'|| - r eps < Re mu'(s1)(K)", reduced_norm - reduced_eps, totals[s1])
    sheet.require("||mu' - mu|| <= int |q - 1| d|mu(s1)|", perturbation, blend_cost, strict=False)
    sheet.require("||mu' - mu|| <= sqrt(2 M eps) + 2 eps", perturbation, bound, strict=False)

    slacks = defect_slacks(reduced, reduced_eps)
    remaining = [s for s in blend_set if slacks[s] > SLACK_FLOOR]

    return ReductionOutcome(reduced, remaining, CASE_BLEND, perturbation, bound,
                            pick=s1, blend_weight=blend_weight, corrector=corrector,
                            blend_set=blend_set, sheet=sheet)


def reduce(mu, surviving, params):
    surviving = sorted(set(surviving))
    m = field_norm(mu)

    if m <= 0:
        verify_hypothesis(mu, surviving, params.eps)
        sheet = CertificateSheet("defect reduction, trivial, eps={0!r}".format(params.eps))
        sheet.record("||mu' - mu|| <= sqrt(2 M eps) + 2 eps", 0.0, perturbation_bound(0.0, params.eps),
                     strict=False, note="M = 0: mu' = mu, U' = U")
        return ReductionOutcome(mu, surviving, CASE_TRIVIAL, 0.0, perturbation_bound(0.0, params.eps), sheet=sheet)

    if classify_case(mu, surviving, params) == CASE_BUMP:
        outcome = case1_dirac_bump(mu, surviving, params)
    else:
        outcome = case2_phase_blend(mu, surviving, params)

    if not outcome.surviving:
        raise HypothesisError("Reduction left no surviving rows")

    return outcome
