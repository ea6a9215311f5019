from django.core.management.base import CommandError

from experiments.commands import EXIT_DIVERGED, ExperimentCommand, float_list, int_list
from experiments.records import finish_run, start_run
from experiments.reports import RunWriter
from experiments.runner import default_output_dir
from experiments.specs import SweepConfig
from experiments.sweeps import all_cells_failed, run_sweep_tables


class Command(ExperimentCommand):
    help = 'Sensitivity heat-map tables over hidden size, data size, learning rate and weight decay.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--hidden', type=int_list, default=None)
        parser.add_argument('--sizes', type=int_list, default=None)
        parser.add_argument('--lrs', type=float_list, default=None)
        parser.add_argument('--wds', type=float_list, default=None)

    def run(self, *args, **options):
        spec = self.resolve(options)
        base = spec.sweep or SweepConfig()
        sweep = SweepConfig(**{
            axis: tuple(options[axis]) if options[axis] is not None else getattr(base, axis)
            for axis in ('hidden', 'sizes', 'lrs', 'wds')
        })

        writer = RunWriter(options['output'] or default_output_dir(spec))
        details = {'name': spec.name, 'command': 'sweep', 'seed': spec.seed, 'spec': spec.document}
        run = start_run(spec.name, 'sweep', spec.seed, spec.document, writer.output_dir)
        try:
            tables = run_sweep_tables(spec, sweep, options['threads'])
        except Exception as exc:
            manifest = writer.write_manifest('failed', error=str(exc), **details)
            finish_run(run, 'failed', artifacts=manifest['files'], error=str(exc))
            raise
        for name, frame in tables.items():
            writer.write_frame(f'{name}.csv', frame)

        failed = all(all_cells_failed(frame) for frame in tables.values())
        status = 'failed' if failed else 'complete'
        manifest = writer.write_manifest(status, error=None, **details)
        finish_run(run, status, artifacts=manifest['files'])

        for name, frame in tables.items():
            self.stdout.write(f'{name}:')
            self.write_table(frame)
        if failed:
            raise CommandError('every sweep cell failed', returncode=EXIT_DIVERGED)
        self.stdout.write(self.style.SUCCESS(f'wrote {writer.output_dir}'))
