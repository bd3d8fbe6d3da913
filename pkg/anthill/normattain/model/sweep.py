
from concurrent.futures import ThreadPoolExecutor

import csv
import itertools
import logging

from tornado.gen import multi
from tornado.ioloop import IOLoop

from . certificate import CertificateError
from . instance import gen
from . iteration import IterationConfig, IterationError, run, verify_trace


SWEEP_COLUMNS = ["seed", "k_size", "s_size", "rho", "r", "mode", "eps0", "steps",
                 "distance", "defect", "eps_final", "status"]

STATUS_PASSED = "passed"
STATUS_FAILED = "failed"
STATUS_ERROR = "error"


class SweepError(Exception):
    def __init__(self, message):
        self.message = message

    def __str__(self):
        return self.message


class SweepPoint(object):
    def __init__(self, seed, k_size, s_size, rho, r):
        self.seed = seed
        self.k_size = k_size
        self.s_size = s_size
        self.rho = rho
        self.r = r


def sweep_points(seeds, sizes, rhos, rs):
    if not seeds or not sizes or not rhos or not rs:
        raise SweepError("Sweep needs nonempty seed, size, rho and r lists")

    return [
        SweepPoint(seed, k_size, s_size, rho, r)
        for seed, (k_size, s_size), rho, r in itertools.product(seeds, sizes, rhos, rs)
    ]


def run_point(point, norm_scale, settings):
    mu, _ = gen(point.seed, point.k_size, point.s_size, norm_scale)
    config = IterationConfig(point.rho, r=point.r, **settings)

    row = {
        "seed": point.seed,
        "k_size": point.k_size,
        "s_size": point.s_size,
        "rho": point.rho,
        "r": point.r,
        "mode": config.mode,
        "eps0": "",
        "steps": "",
        "distance": "",
        "defect": "",
        "eps_final": "",
        "status": STATUS_ERROR
    }

    try:
        certificate, trace = run(mu, config)
    except (CertificateError, IterationError) as e:
        logging.error("Sweep point seed={0} {1}x{2} rho={3!r} r={4!r}: {5}".format(
            point.seed, point.k_size, point.s_size, point.rho, point.r, e))
        return row

    report = verify_trace(trace, trace.nu0_norm, point.rho)

    row.update({
        "eps0": certificate.eps0,
        "steps": certificate.steps,
        "distance": certificate.distance,
        "defect": certificate.defect,
        "eps_final": certificate.eps_final,
        "status": STATUS_PASSED if certificate.passed and report.passed else STATUS_FAILED
    })

    return row


async def sweep(points, norm_scale=1.0, workers=1, **settings):
    """Rows come back in point order whatever the number of workers."""

    executor = ThreadPoolExecutor(max_workers=max(1, workers))
    loop = IOLoop.current()

    try:
        rows = await multi([
            loop.run_in_executor(executor, run_point, point, norm_scale, settings)
            for point in points
        ])
    finally:
        executor.shutdown(wait=True)

    logging.info("Sweep finished: {0} runs, {1} passed".format(
        len(rows), sum(1 for row in rows if row["status"] == STATUS_PASSED)))

    return rows


def run_sweep(points, norm_scale=1.0, workers=1, **settings):
    io_loop = IOLoop(make_current=False)
    try:
        return io_loop.run_sync(lambda: sweep(points, norm_scale=norm_scale, workers=workers, **settings))
    finally:
        io_loop.close()


def write_sweep(path, rows):
    try:
        with open(path, "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=SWEEP_COLUMNS)
            writer.writeheader()
            for row in rows:
                writer.writerow({
                    key: repr(float(value)) if isinstance(value, float) else value
                    for key, value in row.items()
                })
    except (IOError, OSError) as e:
        raise SweepError("Failed to write sweep results to {0}: {1}".format(path, e))
