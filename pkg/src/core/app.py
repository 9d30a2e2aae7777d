import argparse
import logging
import sys

from src.config import Config
from src.core import commands
from src.special.errors import StieltjesError
from src.utils.output_manager import OutputManager

logger = logging.getLogger(__name__)

LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text!r} must be at least 1")
    return value


class StieltjesApp:
    """Command-line front end"""

    def __init__(self):
        Config.load_settings()
        self.parser = self._setup_parser()

    def _setup_common(self):
        """Flags accepted by every subcommand"""
        common = argparse.ArgumentParser(add_help=False)
        common.add_argument("--format", choices=Config.OUTPUT_FORMATS, default="json")
        common.add_argument("--precision", choices=Config.PRECISIONS, default=Config.DEFAULT_PRECISION)
        common.add_argument("--jobs", type=_positive_int, default=1)
        common.add_argument("--log-level", choices=LOG_LEVELS, default="WARNING")
        common.add_argument("--tolerance", type=float, default=None)
        return common

    def _setup_parser(self):
        common = self._setup_common()
        parser = argparse.ArgumentParser(
            prog="stieltjes",
            description="Continued fractions, orthogonal polynomials, moment problems and quadrature")
        sub = parser.add_subparsers(dest="command", required=True)
        families = sorted(Config.AVAILABLE_FAMILIES)

        def command(name, handler, **kwargs):
            p = sub.add_parser(name, parents=[common], **kwargs)
            p.set_defaults(handler=handler)
            return p

        p = command("gauss", commands.cmd_gauss, help="Gauss rule for a family")
        p.add_argument("--family", choices=families, required=True)
        p.add_argument("--n", type=_positive_int, required=True)
        p.add_argument("--params")

        p = command("kronrod", commands.cmd_kronrod, help="Gauss-Kronrod extension")
        p.add_argument("--n", type=_positive_int, required=True)
        p.add_argument("--family", choices=families, default="legendre")
        p.add_argument("--params")

        p = command("zeros", commands.cmd_zeros, help="zeros of p_n")
        p.add_argument("--family", choices=families, required=True)
        p.add_argument("--n", type=_positive_int, required=True)
        p.add_argument("--params")

        p = sub.add_parser("moments", help="moment sequence tools")
        actions = p.add_subparsers(dest="moments_action", required=True)
        check = actions.add_parser("check", parents=[common], help="solvability of a moment document")
        check.set_defaults(handler=commands.cmd_moments_check)
        check.add_argument("--file", required=True)
        check.add_argument("--kind", choices=("stieltjes", "hamburger", "hausdorff"))

        p = command("electro", commands.cmd_electro, help="electrostatic equilibrium")
        p.add_argument("--n", type=_positive_int, required=True)
        p.add_argument("--p", type=float, default=1.0)
        p.add_argument("--q", type=float, default=1.0)
        p.add_argument("--constraint", help="centroid:K or inertia:L")
        p.add_argument("--tol", type=float)

        p = command("verify", commands.cmd_verify, help="run a verification suite")
        p.add_argument("suite", choices=list(commands.SUITES))
        p.add_argument("--family", choices=families)
        p.add_argument("--n", type=_positive_int, nargs="+")
        p.add_argument("--params")
        p.add_argument("--z", type=float)
        p.add_argument("--k", type=float)

        p = command("asymptotic", commands.cmd_asymptotic, help="Legendre asymptotic expansion")
        p.add_argument("kind", choices=("legendre",))
        p.add_argument("--n", type=_positive_int, required=True)
        p.add_argument("--theta", type=float, required=True)
        p.add_argument("--m", type=_positive_int, required=True)

        p = command("elliptic", commands.cmd_elliptic, help="elliptic functions and transforms")
        p.add_argument("action", choices=list(commands.ELLIPTIC_ACTIONS))
        p.add_argument("--k", type=float, required=True)
        p.add_argument("--z", type=float)
        p.add_argument("--u", type=float)
        p.add_argument("--terms", type=_positive_int)

        p = command("selberg", commands.cmd_selberg, help="Selberg integral")
        p.add_argument("--n", type=_positive_int, required=True)
        p.add_argument("--x", type=float, required=True)
        p.add_argument("--y", type=float, required=True)
        p.add_argument("--z", type=float, required=True)

        p = command("fekete", commands.cmd_fekete, help="Fekete points of [-1, 1]")
        p.add_argument("--n", type=_positive_int, required=True)
        p.add_argument("--method", choices=("equilibrium", "search"), default="equilibrium")
        return parser

    def run(self, argv=None):
        """Parse, dispatch and print one envelope; returns the exit code"""
        try:
            args = self.parser.parse_args(argv)
        except SystemExit as e:
            return 2 if e.code not in (0, None) else 0

        Config.setup_logging(args.log_level)
        if Config.get_seed() is not None:
            logger.debug("seed %s accepted; all commands are deterministic", Config.get_seed())

        try:
            envelope = args.handler(args)
        except (StieltjesError, ValueError, OSError) as e:
            logger.debug("command failed", exc_info=True)
            print(f"Error: {e}", file=sys.stderr)
            return 1

        text = OutputManager.render(envelope, args.format)
        print(text, end="" if text.endswith("\n") else "\n")
        return 0 if envelope.passed else 1
