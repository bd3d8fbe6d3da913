"""
Operators C(K) -> C(S) on finite K and S, represented by their measure field:
row s of the field is the measure mu(s), and (T f)(s) = int f dmu(s).
"""

import numpy as np

from . measure import ComplexMeasure, MeasureError, frozen, function_values, polar_decompose


# sup-modulus slack tolerated on witnesses
WITNESS_TOLERANCE = 1e-12


class FieldError(Exception):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


class NoPeakRowError(Exception):
    pass


class MeasureField(object):
    def __init__(self, rows):
        if isinstance(rows, np.ndarray) and rows.ndim == 2:
            matrix = frozen(rows, np.complex128)
        else:
            rows = list(rows)
            if not rows:
                raise FieldError("A field needs at least one row (s_size >= 1)")
            try:
                matrix = frozen([getattr(row, "atoms", row) for row in rows], np.complex128)
            except (ValueError, TypeError):
                raise FieldError("Rows should have the same number of atoms")

        if matrix.ndim != 2:
            raise FieldError("Rows should have the same number of atoms")
        if matrix.shape[0] < 1 or matrix.shape[1] < 1:
            raise FieldError("A field needs s_size >= 1 and k_size >= 1")
        if not np.all(np.isfinite(matrix)):
            raise FieldError("Field entries should be finite complex numbers")

        self.matrix = matrix

    @staticmethod
    def zero(s_size, k_size):
        return MeasureField(np.zeros((s_size, k_size), dtype=np.complex128))

    @property
    def s_size(self):
        return self.matrix.shape[0]

    @property
    def k_size(self):
        return self.matrix.shape[1]

    @property
    def rows(self):
        return [ComplexMeasure(row) for row in self.matrix]

    def row(self, s):
        return ComplexMeasure(self.matrix[s])

    def replace_rows(self, replacements):
        """A copy with the given {s: atoms} rows substituted; other rows are bit-identical."""
        matrix = np.array(self.matrix)
        for s, atoms in replacements.items():
            matrix[s] = getattr(atoms, "atoms", atoms)
        return MeasureField(matrix)

    def __sub__(self, other):
        ensure_same_shape(self, other)
        return MeasureField(self.matrix - other.matrix)

    def __eq__(self, other):
        return isinstance(other, MeasureField) and np.array_equal(self.matrix, other.matrix)

    def __hash__(self):
        return hash(self.matrix.tobytes())


class Witness(object):
    """A function over K in the closed unit ball of C(K)."""

    def __init__(self, values):
        values = frozen(values, np.complex128)

        if values.ndim != 1 or values.shape[0] < 1:
            raise FieldError("Witness values should be a nonempty flat sequence")
        if not np.all(np.isfinite(values)):
            raise FieldError("Witness values should be finite")
        if np.max(np.abs(values)) > 1.0 + WITNESS_TOLERANCE:
            raise FieldError("Witness should have sup-modulus at most 1")

        self.values = values

    @property
    def k_size(self):
        return self.values.shape[0]


class UnimodularFunction(Witness):
    """A function over K with |h(t)| = 1 at every point."""

    def __init__(self, values):
        values = np.array(values, dtype=np.complex128)
        moduli = np.abs(values)

        if np.any(moduli == 0) or not np.all(np.isfinite(values)):
            raise FieldError("Unimodular function cannot vanish or be infinite")

        super(UnimodularFunction, self).__init__(values / moduli)

    @staticmethod
    def ones(k_size):
        return UnimodularFunction(np.ones(k_size, dtype=np.complex128))

    def conjugate(self):
        return UnimodularFunction(np.conj(self.values))


def ensure_same_shape(mu, other):
    if mu.matrix.shape != other.matrix.shape:
        raise FieldError("Incompatible fields: {0} against {1}".format(mu.matrix.shape, other.matrix.shape))


def ensure_over_k(mu, values):
    if values.ndim != 1 or values.shape[0] != mu.k_size:
        raise MeasureError("Incompatible spaces: function over {0} points, field over {1}".format(
            values.shape[0] if values.ndim == 1 else values.shape, mu.k_size))


def row_norms(mu):
    return np.sum(np.abs(mu.matrix), axis=1)


def row_totals(mu):
    """mu(s)(K) for every s, the image of the constant function 1."""
    return np.sum(mu.matrix, axis=1)


def field_norm(mu):
    return float(np.max(row_norms(mu)))


def field_distance(mu, other):
    """sup_s ||other(s) - mu(s)||, the metric all perturbation bounds are measured in."""
    return field_norm(other - mu)


def apply(mu, f):
    values = function_values(f)
    ensure_over_k(mu, values)
    return mu.matrix.dot(values)


def attainment_defect(mu, f):
    """||T|| - ||T f||; zero exactly when f is a norm-attaining witness."""
    values = function_values(f)
    if values.size and np.max(np.abs(values)) > 1.0 + WITNESS_TOLERANCE:
        raise FieldError("Attainment defect needs a witness of sup-modulus at most 1")
    return field_norm(mu) - float(np.max(np.abs(apply(mu, values))))


def scale_rows(mu, g):
    """The field g * mu(s), row by row."""
    values = function_values(g)
    ensure_over_k(mu, values)
    return MeasureField(mu.matrix * values[None, :])


def defect_slacks(mu, eps):
    """Re mu(s)(K) - (||mu|| - eps); positive where the defect at 1 is below eps."""
    return np.real(row_totals(mu)) - (field_norm(mu) - eps)


def peak_row(mu, indices=None):
    """The row of largest variation among indices; ties go to the lowest index."""
    norms = row_norms(mu)
    if indices is None:
        return int(np.argmax(norms))
    indices = sorted(indices)
    return int(indices[int(np.argmax(norms[indices]))])


def oracle_exact_na(mu):
    """
    Every operator between finite-dimensional C-spaces attains its norm: at
    the conjugate phases of its peak row.
    """
    if field_norm(mu) <= 0:
        raise NoPeakRowError()

    s_star = peak_row(mu)
    return UnimodularFunction(polar_decompose(mu.row(s_star)).conjugate_phases)
