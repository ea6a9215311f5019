"""Shared option parsing and exit-code translation for the experiment commands.

Exit codes: 2 for invalid configuration or data, 3 for numerical divergence,
4 for I/O failures.
"""
import logging

from django.core.management.base import BaseCommand, CommandError
from rest_framework.exceptions import ValidationError

from networks.exceptions import (DivisionByZero, NonFinite, PoleEncountered, SchemaError,
                                 SingularSystem)

from .config import resolve_spec

logger = logging.getLogger(__name__)

EXIT_VALIDATION = 2
EXIT_DIVERGED = 3
EXIT_IO = 4

NUMERICAL_ERRORS = (NonFinite, PoleEncountered, SingularSystem, DivisionByZero)


def float_list(raw):
    return [float(value) for value in raw.split(',') if value.strip()]


def int_list(raw):
    return [int(value) for value in raw.split(',') if value.strip()]


def describe(exc):
    errors = getattr(exc, 'errors', None)
    return f'{exc} {errors}' if errors else str(exc)


class ExperimentCommand(BaseCommand):
    """Base for commands that resolve a preset or YAML config into an ``ExperimentSpec``."""

    requires_spec = True

    def add_arguments(self, parser):
        if self.requires_spec:
            parser.add_argument('--preset', help='Name of a built-in experiment preset.')
            parser.add_argument('--config', help='Path to a YAML experiment config (version: 1).')
            parser.add_argument(
                '--set', dest='overrides', action='append', default=[], metavar='KEY=VALUE',
                help='Override a config value, e.g. --set train.epochs=50. Repeatable.')
        parser.add_argument('--output', help='Output directory for this run.')
        parser.add_argument('--threads', type=int, default=None, help='Cap on worker threads.')
        parser.add_argument('--plot', action='store_true', help='Also render PNG plots.')

    def resolve(self, options):
        return resolve_spec(
            preset=options.get('preset'),
            config=options.get('config'),
            overrides=options.get('overrides') or (),
        )

    def handle(self, *args, **options):
        try:
            return self.run(*args, **options)
        except CommandError:
            raise
        except NUMERICAL_ERRORS as exc:
            raise CommandError(f'numerical failure: {describe(exc)}', returncode=EXIT_DIVERGED) from exc
        except OSError as exc:
            raise CommandError(f'I/O error: {exc}', returncode=EXIT_IO) from exc
        except (SchemaError, ValidationError, ValueError, KeyError) as exc:
            raise CommandError(f'invalid input: {describe(exc)}', returncode=EXIT_VALIDATION) from exc

    def run(self, *args, **options):
        raise NotImplementedError('subclasses of ExperimentCommand must provide run()')

    def write_table(self, frame):
        self.stdout.write(frame.to_string(index=False))
