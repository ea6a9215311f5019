from django.core.management.base import CommandError
from django.db import DatabaseError

from experiments.commands import EXIT_IO, ExperimentCommand
from experiments.models import ExperimentRun
from experiments.presets import PRESETS, preset_names


class Command(ExperimentCommand):
    help = 'List the built-in experiment presets, or recorded runs with --runs.'
    requires_spec = False

    def add_arguments(self, parser):
        parser.add_argument('--runs', action='store_true', help='List recorded runs instead.')
        parser.add_argument('--limit', type=int, default=20)

    def run(self, *args, **options):
        if options['runs']:
            try:
                runs = list(ExperimentRun.objects.all()[:options['limit']])
            except DatabaseError as exc:
                raise CommandError(f'run records are unavailable: {exc}', returncode=EXIT_IO) from exc
            for run in runs:
                self.stdout.write(
                    f'{run.pk:>5}  {run.name:<14} {run.command:<14} {run.status:<9} {run.output_dir}')
            return
        for name in preset_names():
            self.stdout.write(f'{name:<14} {PRESETS[name].get("description", "")}')
