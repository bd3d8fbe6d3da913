
from . model.certificate import CertificateError, SLACK_FLOOR
from . model.field import defect_slacks, scale_rows
from . model.instance import InstanceError, RunRecord, gen, read_instance, write_instance, dumps_instance, \
    write_trace
from . model.iteration import IterationConfig, IterationError, run, verify_trace
from . model.lift import lift, LiftError
from . model.measure import WeightFunction, MeasureError, duality_report
from . model.reduction import ReductionParams, ParamsError, HypothesisError, CaseError, QuantizationError, \
    reduce
from . model.sweep import SweepError, run_sweep, sweep_points, write_sweep, STATUS_PASSED, \
    SWEEP_COLUMNS

import logging

import numpy as np


EXIT_PASS = 0
EXIT_CERTIFICATE = 1
EXIT_INPUT = 2


class UsageError(Exception):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


def parse_list(value, kind):
    """'1,2,5-7' style lists; ranges only for nonnegative integers."""
    result = []
    for chunk in (value or "").split(","):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            if kind is int and "-" in chunk:
                start, end = chunk.split("-", 1)
                result.extend(range(int(start), int(end) + 1))
            else:
                result.append(kind(chunk))
        except ValueError:
            raise UsageError("Cannot parse '{0}' in '{1}'".format(chunk, value))
    return result


def parse_sizes(value):
    sizes = []
    for chunk in (value or "").split(","):
        chunk = chunk.strip().lower()
        if not chunk:
            continue
        try:
            k_size, s_size = chunk.split("x")
            sizes.append((int(k_size), int(s_size)))
        except ValueError:
            raise UsageError("Sizes should look like KxS, got '{0}'".format(chunk))
    return sizes


class CommandHandler(object):
    def __init__(self, application, arguments):
        self.application = application
        self.arguments = arguments

    def write(self, text):
        self.application.stdout.write(text)
        if not text.endswith("\n"):
            self.application.stdout.write("\n")

    def iteration_config(self, rho):
        a = self.arguments
        return IterationConfig(
            rho, r=a.r, eps0=a.eps0, max_iter=a.max_iter, defect_tol=a.defect_tol,
            mode=a.mode, arcs=a.arcs, selection=a.selection, shortcut=a.shortcut)

    def execute(self):
        raise NotImplementedError()


class GenHandler(CommandHandler):
    def execute(self):
        a = self.arguments

        try:
            mu, meta = gen(a.seed, a.k_size, a.s_size, a.norm_scale)
        except InstanceError as e:
            raise UsageError(e.message)

        if a.out:
            write_instance(a.out, mu, meta)
            logging.info("Instance written to {0}".format(a.out))
        else:
            self.write(dumps_instance(mu, meta))

        return EXIT_PASS


class RunHandler(CommandHandler):
    def execute(self):
        a = self.arguments

        instance = read_instance(a.instance)

        try:
            config = self.iteration_config(a.rho)
            certificate, trace = run(instance.field, config)
        except CertificateError as e:
            logging.error("Certificate failure: {0}".format(e))
            return EXIT_CERTIFICATE

        report = verify_trace(trace, trace.nu0_norm, config.rho)
        record = RunRecord(config, certificate, trace, report, seed=instance.seed)

        if a.trace:
            write_trace(a.trace, trace)
            logging.info("Trace written to {0}".format(a.trace))

        if a.out:
            with open(a.out, "w") as f:
                f.write(record.dumps())
            logging.info("Certificate written to {0}".format(a.out))
        else:
            self.write(record.dumps())

        if not record.passed:
            for inequality in certificate.sheet.failures + report.failures:
                logging.error("Failed: {0}".format(inequality.describe()))
            return EXIT_CERTIFICATE

        return EXIT_PASS


class CheckHandler(CommandHandler):
    def execute(self):
        a = self.arguments
        mu = read_instance(a.instance).field

        checks = {
            1: self.check_duality,
            2: self.check_lift,
            3: self.check_reduction
        }

        if a.lemma not in checks:
            raise UsageError("Lemma should be 1, 2 or 3")

        try:
            sheets = checks[a.lemma](mu)
        except CertificateError as e:
            logging.error("Certificate failure: {0}".format(e))
            return EXIT_CERTIFICATE

        for sheet in sheets:
            self.write("== " + sheet.title)
            for line in sheet.lines():
                self.write("  " + line)

        return EXIT_PASS if all(sheet.passed for sheet in sheets) else EXIT_CERTIFICATE

    def check_duality(self, mu):
        a = self.arguments

        if a.seed is None:
            f = WeightFunction.constant(mu.k_size)
        else:
            f = WeightFunction(np.random.default_rng(a.seed).random(mu.k_size))

        sheets = []
        for s, nu in enumerate(mu.rows):
            sheet = duality_report(f, nu, a.grid)
            sheet.title = "row {0}: {1}".format(s, sheet.title)
            sheets.append(sheet)
        return sheets

    def check_lift(self, mu):
        a = self.arguments

        try:
            lifted = lift(mu, a.delta, mode=a.mode, arcs=a.arcs)
        except LiftError as e:
            raise UsageError(e.message)

        self.write("U = {0}".format(list(lifted.surviving)))
        if lifted.partition is not None:
            self.write("arcs = {0}".format(lifted.partition.arc_count))
        return [lifted.sheet]

    def check_reduction(self, mu):
        a = self.arguments

        try:
            params = ReductionParams(a.r, a.eps, mode=a.mode, arcs=a.arcs, selection=a.selection)
        except ParamsError as e:
            raise UsageError(e.message)

        if not np.any(mu.matrix):
            surviving = range(mu.s_size)
            lifted_field = mu
        else:
            # the hypothesis set comes from an exact lift at delta = eps
            lifted = lift(mu, a.eps)
            lifted_field = scale_rows(mu, lifted.h.values)
            slacks = defect_slacks(lifted_field, a.eps)
            surviving = [s for s in lifted.surviving if slacks[s] > SLACK_FLOOR]

        try:
            outcome = reduce(lifted_field, surviving, params)
        except QuantizationError as e:
            raise UsageError(e.message)
        except (HypothesisError, CaseError) as e:
            raise CertificateError(str(e))

        self.write("case = {0}, pick = {1}, U' = {2}".format(outcome.case_tag, outcome.pick, list(outcome.surviving)))
        self.write("perturbation = {0!r} <= bound = {1!r}".format(outcome.perturbation, outcome.bound))
        return [outcome.sheet]


class SweepHandler(CommandHandler):
    def execute(self):
        a = self.arguments

        seeds = parse_list(a.seeds, int)
        sizes = parse_sizes(a.sizes)
        rhos = parse_list(a.rhos, float)
        rs = parse_list(a.rs, float) or [a.r]

        try:
            points = sweep_points(seeds, sizes, rhos, rs)
        except SweepError as e:
            raise UsageError(e.message)

        settings = {
            "eps0": None,
            "max_iter": a.max_iter,
            "defect_tol": a.defect_tol,
            "mode": a.mode,
            "arcs": a.arcs,
            "selection": a.selection,
            "shortcut": a.shortcut
        }

        rows = run_sweep(points, norm_scale=a.norm_scale, workers=a.workers, **settings)

        if a.out:
            write_sweep(a.out, rows)
            logging.info("Sweep written to {0}".format(a.out))
        else:
            self.write(",".join(SWEEP_COLUMNS))
            for row in rows:
                self.write(",".join(str(row[column]) for column in SWEEP_COLUMNS))

        return EXIT_PASS if all(row["status"] == STATUS_PASSED for row in rows) else EXIT_CERTIFICATE


INPUT_ERRORS = (UsageError, InstanceError, IterationError, ParamsError, MeasureError, LiftError, SweepError,
                OSError)


def handle(handler_class, application, arguments):
    try:
        return handler_class(application, arguments).execute()
    except INPUT_ERRORS as e:
        logging.error(str(e))
        return EXIT_INPUT
    except CertificateError as e:
        logging.error("Certificate failure: {0}".format(e))
        return EXIT_CERTIFICATE
