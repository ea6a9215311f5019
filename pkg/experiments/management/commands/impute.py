from django.core.management.base import CommandError

from experiments.commands import EXIT_VALIDATION, ExperimentCommand
from experiments.runner import run_experiment


class Command(ExperimentCommand):
    help = 'Train on the visible region of a masked experiment and score the hidden region.'

    def run(self, *args, **options):
        spec = self.resolve(options)
        if spec.mask is None:
            raise CommandError(
                f'experiment {spec.name!r} has no mask; use train instead', returncode=EXIT_VALIDATION)
        result = run_experiment(spec, options['output'], command='impute', plot=options['plot'])
        summary = result.imputation
        self.stdout.write(
            f'{spec.name}: {summary["masked_zones"]} masked zone(s), '
            f'{summary["hidden_points"]} hidden points')
        self.stdout.write(
            f'hidden MAE {summary["hidden_mae"]:.6g} '
            f'(constant-mean MAE {summary["constant_mean_mae"]:.6g})')
        self.stdout.write(
            f'signed error range [{summary["signed_error_min"]:.6g}, {summary["signed_error_max"]:.6g}]')
        self.stdout.write(self.style.SUCCESS(f'wrote {result.output_dir}'))
