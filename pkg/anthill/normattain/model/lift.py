"""
Unimodular phase lift: a function h with |h| = 1 and a nonempty set U of
rows on which Re int h dmu(s) > ||mu|| - delta.

On a finite discrete K the compact pieces, Urysohn functions and circle paths
of the continuous construction collapse to "h is the constant lambda_j on the
atoms whose conjugate phase lies in arc j", which is what `quantize_phases`
builds.
"""

import math

import numpy as np

from . certificate import CertificateSheet, SLACK_FLOOR
from . field import UnimodularFunction, field_norm, peak_row, NoPeakRowError
from . measure import polar_decompose, total_variation


MODE_EXACT = "exact"
MODE_FAITHFUL = "faithful"

MODES = (MODE_EXACT, MODE_FAITHFUL)

# arc diameter is taken this fraction of the largest admissible one
ARC_MARGIN = 0.9


class LiftError(Exception):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


class CirclePartition(object):
    """
    N arcs of length 2 pi / N centred at lambda_j = exp(2 pi i j / N). Every
    point of arc j lies within chord distance 2 sin(pi / 2N) of lambda_j, and
    every arc has chord diameter 2 sin(pi / N) < 2 pi / N.
    """

    def __init__(self, arc_count):
        arc_count = int(arc_count)
        if arc_count < 1:
            raise LiftError("Circle partition needs at least one arc")
        self.arc_count = arc_count

    @staticmethod
    def for_diameter(eta):
        if eta <= 0:
            raise LiftError("Arc diameter should be positive")
        return CirclePartition(int(math.ceil(2 * math.pi / eta)))

    @property
    def diameter(self):
        return 2 * math.pi / self.arc_count

    @property
    def representatives(self):
        return np.exp(2j * np.pi * np.arange(self.arc_count) / self.arc_count)

    def locate(self, z):
        angles = np.angle(np.asarray(z, dtype=np.complex128))
        return np.mod(np.rint(angles * self.arc_count / (2 * np.pi)), self.arc_count).astype(np.int64)

    def quantize(self, z):
        return np.exp(2j * np.pi * self.locate(z) / self.arc_count)


class LatticeQuantizer(object):
    """
    Rounds real and imaginary parts to a square grid of the given spacing.
    Quantized phases may fall outside the closed unit disc.
    """

    def __init__(self, spacing):
        if spacing <= 0:
            raise LiftError("Lattice spacing should be positive")
        self.spacing = float(spacing)

    @property
    def diameter(self):
        return self.spacing * math.sqrt(2)

    def quantize(self, z):
        z = np.asarray(z, dtype=np.complex128)
        return self.spacing * (np.rint(z.real / self.spacing) + 1j * np.rint(z.imag / self.spacing))


class LiftResult(object):
    def __init__(self, h, surviving, slack, delta, s0=None, partition=None, sheet=None):
        self.h = h
        self.surviving = tuple(surviving)
        self.slack = slack
        self.delta = delta
        self.s0 = s0
        self.partition = partition
        self.sheet = sheet or CertificateSheet("phase lift")


def select_peak_point(mu, delta):
    if field_norm(mu) <= 0:
        raise NoPeakRowError()
    return peak_row(mu)


def quantize_phases(nu, partition):
    """h = lambda_j on the atoms whose conjugate phase lies in arc j."""
    return UnimodularFunction(partition.quantize(polar_decompose(nu).conjugate_phases))


def lift(mu, delta, mode=MODE_EXACT, arcs=None):
    if delta <= 0:
        raise LiftError("delta should be positive")
    if mode not in MODES:
        raise LiftError("Unknown lift mode: {0}".format(mode))

    sheet = CertificateSheet("phase lift, delta={0!r}, {1}".format(delta, mode))
    norm = field_norm(mu)

    if norm <= 0:
        h = UnimodularFunction.ones(mu.k_size)
        slack = np.real(mu.matrix.dot(h.values)) - (norm - delta)
        sheet.record("||mu|| - delta < Re int h dmu(s) on all of S", norm - delta,
                     float(np.min(np.real(mu.matrix.dot(h.values)))), note="zero field: h = 1, U = S")
        return LiftResult(h, range(mu.s_size), slack, delta, sheet=sheet)

    s0 = select_peak_point(mu, delta)
    nu = mu.row(s0)
    nu_norm = total_variation(nu)

    sheet.require("||mu|| - delta/4 < ||mu(s0)||", norm - delta / 4, nu_norm)

    partition = None

    if mode == MODE_EXACT:
        h = UnimodularFunction(polar_decompose(nu).conjugate_phases)
    else:
        if arcs:
            partition = CirclePartition(arcs)
            if partition.diameter * nu_norm >= delta / 8:
                raise LiftError("{0} arcs are too coarse for delta={1!r}, use at least {2}".format(
                    arcs, delta, CirclePartition.for_diameter(ARC_MARGIN * delta / (8 * nu_norm)).arc_count))
        else:
            partition = CirclePartition.for_diameter(ARC_MARGIN * delta / (8 * nu_norm))

        h = quantize_phases(nu, partition)
        phi = polar_decompose(nu).conjugate_phases
        quantization_error = float(np.dot(np.abs(h.values - phi), np.abs(nu.atoms)))

        sheet.require("eta |nu|(K) < delta/8", partition.diameter * nu_norm, delta / 8)
        sheet.require("|nu|(K \\ F) < delta/16", 0.0, delta / 16, note="F = K on a finite space")
        sheet.require("int |h - phi| d|nu| < delta/4", quantization_error, delta / 4)

    totals = np.real(mu.matrix.dot(h.values))
    slack = totals - (norm - delta)

    sheet.require("||mu|| - delta/2 < Re int h dmu(s0)", norm - delta / 2, totals[s0])
    if mode == MODE_EXACT:
        sheet.require("|Re int h dmu(s0) - ||mu(s0)|||", abs(totals[s0] - nu_norm),
                      SLACK_FLOOR * max(nu_norm, 1.0), strict=False)

    surviving = [s for s in range(mu.s_size) if slack[s] > SLACK_FLOOR]
    sheet.require("||mu|| - delta < Re int h dmu(s0)", norm - delta, totals[s0])

    return LiftResult(h, surviving, slack, delta, s0=s0, partition=partition, sheet=sheet)
