
from anthill.common.options import options

from tornado.log import enable_pretty_logging
from tornado.options import Error as OptionsError

from . model.lift import MODES
from . model.reduction import SELECTIONS

from . import handler
from . import options as _opts

import argparse
import logging
import sys


LOG_LEVELS = ["debug", "info", "warning", "error"]


def init_logging(level):
    logger = logging.getLogger()
    if not logger.handlers:
        enable_pretty_logging(logger=logger)
    logger.setLevel(getattr(logging, level.upper()))


class NormAttainConsole(object):
    def __init__(self, stdout=None):
        self.stdout = stdout or sys.stdout

    def get_metadata(self):
        return {
            "title": "normattain",
            "description": "Certified approximation of operators C(K) -> C(S) by norm-attaining ones"
        }

    def get_handlers(self):
        return {
            "gen": handler.GenHandler,
            "run": handler.RunHandler,
            "check": handler.CheckHandler,
            "sweep": handler.SweepHandler
        }

    def common_parser(self):
        parser = argparse.ArgumentParser(add_help=False)
        parser.add_argument("--config", default=None, help="Options file loaded before the command line")
        parser.add_argument("--log-level", default="info", choices=LOG_LEVELS)
        return parser

    def iteration_parser(self):
        parser = argparse.ArgumentParser(add_help=False)
        parser.add_argument("--r", type=float, default=options.r,
                            help="Contraction ratio in (1/2, 1)")
        parser.add_argument("--eps0", type=float, default=None,
                            help="Initial tolerance (derived from rho when omitted)")
        parser.add_argument("--mode", default=options.mode, choices=MODES)
        parser.add_argument("--arcs", type=int, default=options.arcs,
                            help="Arc count of the faithful circle partition")
        parser.add_argument("--selection", default=options.selection, choices=SELECTIONS)
        parser.add_argument("--defect-tol", type=float, default=options.defect_tol)
        parser.add_argument("--max-iter", type=int, default=options.max_iter)
        parser.add_argument("--no-shortcut", dest="shortcut", action="store_false", default=options.shortcut,
                            help="Step down to the terminal level even when the defect is already below it")
        return parser

    def build_parser(self):
        common = self.common_parser()
        iteration = self.iteration_parser()
        metadata = self.get_metadata()

        parser = argparse.ArgumentParser(prog=metadata["title"], description=metadata["description"])
        commands = parser.add_subparsers(dest="command")
        commands.required = True

        gen = commands.add_parser("gen", parents=[common], help="Generate a seeded random instance")
        gen.add_argument("--seed", type=int, default=0)
        gen.add_argument("--k-size", type=int, default=options.k_size)
        gen.add_argument("--s-size", type=int, default=options.s_size)
        gen.add_argument("--norm-scale", type=float, default=options.norm_scale)
        gen.add_argument("--out", default=None, help="Instance file (stdout when omitted)")

        run = commands.add_parser("run", parents=[common, iteration], help="Approximate and certify an instance")
        run.add_argument("instance")
        run.add_argument("--rho", type=float, default=0.1)
        run.add_argument("--trace", default=None, help="CSV trace file")
        run.add_argument("--out", default=None, help="JSON certificate summary (stdout when omitted)")

        check = commands.add_parser("check", parents=[common, iteration], help="Certify a single step on an instance")
        check.add_argument("instance")
        check.add_argument("--lemma", type=int, required=True, choices=[1, 2, 3])
        check.add_argument("--seed", type=int, default=None, help="Seed of the random weight of the duality check")
        check.add_argument("--grid", type=int, default=options.dual_grid)
        check.add_argument("--delta", type=float, default=0.1)
        check.add_argument("--eps", type=float, default=0.1)

        sweep = commands.add_parser("sweep", parents=[common, iteration], help="Run a parameter grid")
        sweep.add_argument("--seeds", default="", help="Comma separated seeds, ranges like 1-10 allowed")
        sweep.add_argument("--sizes", default="{0}x{1}".format(options.k_size, options.s_size),
                           help="Comma separated KxS sizes")
        sweep.add_argument("--rhos", default="0.1")
        sweep.add_argument("--rs", default="")
        sweep.add_argument("--norm-scale", type=float, default=options.norm_scale)
        sweep.add_argument("--workers", type=int, default=options.sweep_workers)
        sweep.add_argument("--out", default=None, help="Aggregate CSV (stdout when omitted)")

        return parser

    def load_config(self, argv):
        known, _ = self.common_parser().parse_known_args(argv)
        if known.config:
            options.parse_config_file(known.config, final=False)

    def execute(self, argv=None):
        argv = list(sys.argv[1:] if argv is None else argv)

        try:
            self.load_config(argv)
        except (IOError, OSError, OptionsError) as e:
            logging.error("Failed to load options: {0}".format(e))
            return handler.EXIT_INPUT

        try:
            arguments = self.build_parser().parse_args(argv)
        except SystemExit as e:
            return e.code

        init_logging(arguments.log_level)

        return handler.handle(self.get_handlers()[arguments.command], self, arguments)


def main(argv=None):
    return NormAttainConsole().execute(argv)


if __name__ == "__main__":
    sys.exit(main())
