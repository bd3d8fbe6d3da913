"""
Complex measures on a finite point set K = {0, ..., k_size - 1}.

A measure is its vector of atom weights; integration against a function over K
is the dot product with that vector. Values are immutable once constructed.
"""

import math

import numpy as np

from . certificate import CertificateSheet, IDENTITY_TOLERANCE


class MeasureError(Exception):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


def frozen(values, dtype):
    array = np.array(values, dtype=dtype)
    array.flags.writeable = False
    return array


def function_values(g):
    """
    Accepts a raw sequence, an ndarray or any of the function wrappers and
    returns a complex vector.
    """
    values = getattr(g, "values", g)
    return np.asarray(values, dtype=np.complex128)


def ensure_compatible(values, measure):
    if values.ndim != 1 or values.shape[0] != measure.k_size:
        raise MeasureError("Incompatible spaces: function over {0} points, measure over {1}".format(
            values.shape[0] if values.ndim == 1 else values.shape, measure.k_size))


class ComplexMeasure(object):
    def __init__(self, atoms):
        atoms = frozen(atoms, np.complex128)

        if atoms.ndim != 1:
            raise MeasureError("Atoms should be a flat sequence")
        if atoms.shape[0] < 1:
            raise MeasureError("A measure needs at least one point (k_size >= 1)")
        if not np.all(np.isfinite(atoms)):
            raise MeasureError("Atoms should be finite complex numbers")

        self.atoms = atoms

    @staticmethod
    def zero(k_size):
        return ComplexMeasure(np.zeros(k_size, dtype=np.complex128))

    @staticmethod
    def dirac(k_size, t, mass=1.0):
        atoms = np.zeros(k_size, dtype=np.complex128)
        atoms[t] = mass
        return ComplexMeasure(atoms)

    @property
    def k_size(self):
        return self.atoms.shape[0]

    def mass(self):
        """nu(K)"""
        return complex(np.sum(self.atoms))

    def integrate(self, g):
        values = function_values(g)
        ensure_compatible(values, self)
        return complex(np.dot(values, self.atoms))

    def __add__(self, other):
        ensure_compatible(other.atoms, self)
        return ComplexMeasure(self.atoms + other.atoms)

    def __sub__(self, other):
        ensure_compatible(other.atoms, self)
        return ComplexMeasure(self.atoms - other.atoms)

    def __eq__(self, other):
        return isinstance(other, ComplexMeasure) and np.array_equal(self.atoms, other.atoms)

    def __hash__(self):
        return hash(self.atoms.tobytes())

    def __repr__(self):
        return "ComplexMeasure({0})".format(list(self.atoms))


class PolarDecomposition(object):
    def __init__(self, phases, variation):
        self.phases = frozen(phases, np.complex128)
        self.variation = frozen(variation, np.float64)

    @property
    def conjugate_phases(self):
        """The unimodular function conj(theta), which integrates nu to |nu|(K)."""
        return np.conj(self.phases)

    def reconstruct(self):
        return ComplexMeasure(self.phases * self.variation)


class WeightFunction(object):
    def __init__(self, values):
        values = frozen(values, np.float64)

        if values.ndim != 1:
            raise MeasureError("Weight function values should be a flat sequence")
        if not np.all(np.isfinite(values)):
            raise MeasureError("Weight function values should be finite")
        if np.any(values < 0):
            raise MeasureError("Weight function should be nonnegative")

        self.values = values

    @staticmethod
    def constant(k_size, value=1.0):
        return WeightFunction(np.full(k_size, value, dtype=np.float64))

    def complement(self):
        """1 - f, for weights bounded by one."""
        return WeightFunction(np.clip(1.0 - self.values, 0.0, None))


def total_variation(nu):
    return float(np.sum(np.abs(nu.atoms)))


def polar_decompose(nu):
    variation = np.abs(nu.atoms)
    # zero atoms carry phase 1 so that theta is total and unimodular
    safe = np.where(variation > 0, variation, 1.0)
    phases = np.where(variation > 0, nu.atoms / safe, 1.0 + 0j)
    return PolarDecomposition(phases, variation)


def weighted_variation(f, nu):
    values = np.asarray(getattr(f, "values", f), dtype=np.float64)
    ensure_compatible(values, nu)
    return float(np.dot(values, np.abs(nu.atoms)))


def dual_sup_bruteforce(f, nu, grid):
    """
    max Re sum g_i nu_i over g_i = f_i exp(2 pi i k_i / grid). The supremum
    factorizes over atoms, so each atom is maximized over the grid on its own.
    """
    if grid < 4:
        raise MeasureError("Phase grid should have at least 4 points")

    values = np.asarray(getattr(f, "values", f), dtype=np.float64)
    ensure_compatible(values, nu)

    grid_phases = np.exp(2j * np.pi * np.arange(grid) / grid)
    candidates = np.real(values[:, None] * grid_phases[None, :] * nu.atoms[:, None])
    return float(np.sum(np.max(candidates, axis=1)))


def dual_sup_closed_form(f, nu):
    """Re sum g_i nu_i at the attaining choice g = f * conj(theta)."""
    values = np.asarray(getattr(f, "values", f), dtype=np.float64)
    ensure_compatible(values, nu)
    g = values * polar_decompose(nu).conjugate_phases
    return float(np.real(np.dot(g, nu.atoms)))


def dual_gap_bound(f, nu, grid):
    return weighted_variation(f, nu) * (1.0 - math.cos(math.pi / grid))


def scale_by_function(g, nu):
    values = function_values(g)
    ensure_compatible(values, nu)
    return ComplexMeasure(values * nu.atoms)


def variation_identity_check(f, nu):
    """
    |f nu|(K) against int f d|nu|. Returns (passed, deviation) with the
    absolute deviation of the two sides.
    """
    lhs = total_variation(scale_by_function(f, nu))
    rhs = weighted_variation(f, nu)
    deviation = abs(lhs - rhs)
    return deviation <= IDENTITY_TOLERANCE * max(abs(lhs), abs(rhs)), deviation


def duality_report(f, nu, grid):
    """
    Certificates of the dual description of int f d|nu| on one instance.
    Weak-star lower semicontinuity is not checked: on a finite K the
    functional is norm continuous and the statement has no finite content.
    """

    sheet = CertificateSheet("weighted variation duality")

    weighted = weighted_variation(f, nu)
    brute = dual_sup_bruteforce(f, nu, grid)
    closed = dual_sup_closed_form(f, nu)

    values = np.asarray(getattr(f, "values", f), dtype=np.float64)
    grid_phases = np.exp(2j * np.pi * np.arange(grid) / grid)
    candidates = values[:, None] * grid_phases[None, :]
    best = candidates[np.arange(nu.k_size), np.argmax(np.real(candidates * nu.atoms[:, None]), axis=1)]
    pairing = complex(np.dot(best, nu.atoms))

    sheet.record("Re int g dnu <= |int g dnu|", pairing.real, abs(pairing), strict=False)
    sheet.record("|int g dnu| <= int |g| d|nu|", abs(pairing),
                 float(np.dot(np.abs(best), np.abs(nu.atoms))), strict=False)
    sheet.record("int |g| d|nu| <= int f d|nu|", float(np.dot(np.abs(best), np.abs(nu.atoms))),
                 weighted, strict=False)
    sheet.record("grid supremum <= int f d|nu|", brute, weighted, strict=False)
    sheet.record("int f d|nu| - grid supremum <= gap bound", weighted - brute,
                 dual_gap_bound(f, nu, grid), strict=False)

    tolerance = IDENTITY_TOLERANCE * max(weighted, 1.0)
    sheet.record("attaining g = f conj(theta): |closed form - int f d|nu||",
                 abs(closed - weighted), tolerance, strict=False)

    _, deviation = variation_identity_check(f, nu)
    sheet.record("|f nu|(K) = int f d|nu|", deviation, tolerance, strict=False)

    return sheet
