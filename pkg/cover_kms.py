import sys
import traceback
from argparse import ArgumentParser, Namespace
from types import TracebackType
from typing import Type

from loguru import logger

from app import __appname__, __version__
from app.actions import __commands__, __common_options__, __options__
from app.config import RunConfig
from app.controllers.convergence_controller import ConvergenceController
from app.controllers.functor_controller import FunctorController
from app.controllers.kms_controller import KMSController
from app.controllers.logging_controller import LoggingController
from app.controllers.output_controller import OutputController
from app.controllers.table_controller import TableController
from app.enums.exit_status import ExitStatus
from app.exceptions.config import ConfigException
from app.exceptions.correlators import CorrelatorException
from app.exceptions.covariance import CovarianceException
from app.exceptions.geometry import GeometryException
from app.exceptions.kms import KMSException
from app.exceptions.quadrature import QuadratureException
from app.settings import Settings

NUMERICAL_EXCEPTIONS = (
    CorrelatorException,
    CovarianceException,
    GeometryException,
    KMSException,
    QuadratureException
)


class CoverKMS:
    def __init__(self, settings: Settings | None = None) -> None:
        self.settings = settings or Settings()
        self.config: RunConfig | None = None

        self.logging_controller = LoggingController(self)
        self.output_controller = OutputController(self)
        self.table_controller = TableController(self)
        self.convergence_controller = ConvergenceController(self)
        self.kms_controller = KMSController(self)
        self.functor_controller = FunctorController(self)

    def run(self, args: Namespace) -> ExitStatus:
        self.logging_controller.configure(args.verbose, args.log_file)

        try:
            self.config = RunConfig.from_args(args, self.settings)
            table = args.func(self)

        except ConfigException as error:
            logger.error(str(error))
            return ExitStatus.USAGE_ERROR

        except NUMERICAL_EXCEPTIONS as error:
            logger.error(f'{type(error).__name__}: {error}')
            return ExitStatus.VERIFICATION_FAILED

        path = self.output_controller.write(table)
        print(f'{self.config.command}: pass={str(table.passed).lower()} -> {path}')

        return ExitStatus.PASS if table.passed else ExitStatus.VERIFICATION_FAILED

    def on_crash(self,
                 exception_type: Type[BaseException],
                 exception: BaseException,
                 stack_trace: TracebackType
                 ) -> None:
        self.logging_controller.log_crash(''.join(traceback.format_exception(
            exception_type, exception, stack_trace)))

        sys.__excepthook__(exception_type, exception, stack_trace)
        sys.exit(ExitStatus.VERIFICATION_FAILED)


def build_parser() -> ArgumentParser:
    parser = ArgumentParser(prog='cover_kms', description=f'{__appname__} {__version__}')
    parser.add_argument('--version', action='version', version=__version__)

    sub = parser.add_subparsers(dest='command', required=True)

    for name, handler, help_text, options in __commands__:
        command = sub.add_parser(name, help=help_text)

        for option in __common_options__ + options:
            command.add_argument(f'--{option}', **__options__[option])

        command.set_defaults(func=handler)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)

    application = CoverKMS()
    sys.excepthook = application.on_crash

    return int(application.run(args))


if __name__ == '__main__':
    sys.exit(main())
