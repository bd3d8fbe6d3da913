
import csv
import math

import numpy as np
import ujson

from . field import MeasureField, FieldError, field_norm


TRACE_VERSION = 1
TRACE_COLUMNS = ["n", "eps_n", "norm_nu", "case", "perturbation", "bound", "defect_at_one", "min_slack"]


class InstanceError(Exception):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


def is_integer(value):
    return isinstance(value, (int, np.integer)) and not isinstance(value, bool)


def is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


class InstanceAdapter(object):
    def __init__(self, data):
        try:
            self.k_size = data["k_size"]
            self.s_size = data["s_size"]
            grid = data["mu"]
        except (KeyError, TypeError):
            raise InstanceError("Instance should have integer 'k_size', 's_size' and a 'mu' grid")

        if not (is_integer(self.k_size) and is_integer(self.s_size)):
            raise InstanceError("Instance sizes should be integers")

        self.meta = data.get("meta", {})
        if self.meta is None:
            self.meta = {}
        if not isinstance(self.meta, dict):
            raise InstanceError("'meta' should be an object")

        if self.k_size < 1 or self.s_size < 1:
            raise InstanceError("Instance sizes should be positive")
        if not isinstance(grid, list) or len(grid) != self.s_size:
            raise InstanceError("'mu' should have {0} rows".format(self.s_size))

        matrix = np.zeros((self.s_size, self.k_size), dtype=np.complex128)

        for s, row in enumerate(grid):
            if not isinstance(row, list) or len(row) != self.k_size:
                raise InstanceError("Row {0} of 'mu' should have {1} entries".format(s, self.k_size))
            for t, entry in enumerate(row):
                if not isinstance(entry, list) or len(entry) != 2:
                    raise InstanceError("Entry ({0}, {1}) should be a [re, im] pair".format(s, t))
                if not (is_number(entry[0]) and is_number(entry[1])):
                    raise InstanceError("Entry ({0}, {1}) is not numeric".format(s, t))
                re, im = float(entry[0]), float(entry[1])
                if not (math.isfinite(re) and math.isfinite(im)):
                    raise InstanceError("Entry ({0}, {1}) is not finite".format(s, t))
                matrix[s, t] = complex(re, im)

        try:
            self.field = MeasureField(matrix)
        except FieldError as e:
            raise InstanceError(e.message)

    @property
    def seed(self):
        return self.meta.get("seed")


def dump_instance(mu, meta=None):
    return {
        "k_size": mu.k_size,
        "s_size": mu.s_size,
        "mu": [[[float(value.real), float(value.imag)] for value in row] for row in mu.matrix],
        "meta": meta or {}
    }


def dumps_instance(mu, meta=None):
    # shortest round-trip decimals: at most 17 significant digits, lossless
    return ujson.dumps(dump_instance(mu, meta))


def loads_instance(text):
    try:
        data = ujson.loads(text)
    except (ValueError, TypeError) as e:
        raise InstanceError("Corrupted instance: {0}".format(e))

    if not isinstance(data, dict):
        raise InstanceError("Instance should be a JSON object")

    return InstanceAdapter(data)


def read_instance(path):
    try:
        with open(path, "r") as f:
            return loads_instance(f.read())
    except (IOError, OSError) as e:
        raise InstanceError("Failed to read instance {0}: {1}".format(path, e))


def write_instance(path, mu, meta=None):
    with open(path, "w") as f:
        f.write(dumps_instance(mu, meta))


def gen(seed, k_size, s_size, norm_scale):
    """
    Uniform magnitudes and phases, scaled to the requested operator norm.
    Identical arguments give bit-identical fields.
    """
    if not is_integer(seed) or seed < 0:
        raise InstanceError("Seed should be a nonnegative integer, got {0!r}".format(seed))
    if k_size < 1 or s_size < 1:
        raise InstanceError("Instance sizes should be positive")
    if norm_scale < 0 or not math.isfinite(norm_scale):
        raise InstanceError("norm_scale should be a finite nonnegative number")

    rng = np.random.default_rng(seed)
    magnitudes = rng.random((s_size, k_size))
    phases = rng.random((s_size, k_size)) * 2 * np.pi
    mu = MeasureField(magnitudes * np.exp(1j * phases))

    norm = field_norm(mu)
    if norm_scale == 0 or norm == 0:
        mu = MeasureField.zero(s_size, k_size)
    else:
        mu = MeasureField(mu.matrix * (norm_scale / norm))

    meta = {
        "seed": seed,
        "generator": "uniform-polar",
        "norm_scale": norm_scale
    }

    return mu, meta


def trace_rows(trace):
    return [[row.n, row.eps, row.norm, row.case_tag, row.perturbation, row.bound, row.defect, row.min_slack]
            for row in trace.rows]


def write_trace(path, trace):
    with open(path, "w", newline="") as f:
        f.write("# normattain trace v{0}\n".format(TRACE_VERSION))
        writer = csv.writer(f)
        writer.writerow(TRACE_COLUMNS)
        for row in trace_rows(trace):
            writer.writerow([repr(float(value)) if isinstance(value, float) else value for value in row])


def read_trace(path):
    with open(path, "r", newline="") as f:
        lines = [line for line in f if not line.startswith("#")]
    return list(csv.DictReader(lines))


class RunRecord(object):
    def __init__(self, config, certificate, trace, report, seed=None):
        self.config = config
        self.certificate = certificate
        self.trace = trace
        self.report = report
        self.seed = seed

    @property
    def passed(self):
        return self.certificate.passed and self.report.passed

    def dump(self):
        config = self.config.dump()
        config["eps0"] = self.certificate.eps0
        config["seed"] = self.seed

        return {
            "config": config,
            "certificate": self.certificate.dump(),
            "verification": self.report.dump(),
            "trace": [row.dump() for row in self.trace.rows]
        }

    def dumps(self):
        return ujson.dumps(self.dump(), indent=2)
