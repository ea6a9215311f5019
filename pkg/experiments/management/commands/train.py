from experiments.commands import ExperimentCommand, int_list
from experiments.runner import run_experiment, run_seeds


class Command(ExperimentCommand):
    help = 'Train CauchyNet (and optionally the ReLU baseline) on an experiment preset or config.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--seeds', type=int_list, default=None,
            help='Comma-separated seeds; runs once per seed and writes seeds.csv.')

    def run(self, *args, **options):
        spec = self.resolve(options)
        if options['seeds']:
            results = run_seeds(spec, options['seeds'], options['output'], plot=options['plot'])
            for result in results:
                self._summary(result)
            return
        self._summary(run_experiment(spec, options['output'], plot=options['plot']))

    def _summary(self, result):
        for report in result.reports:
            self.stdout.write(
                f'{result.spec.name} seed={result.spec.seed} {report.model} {report.split}: '
                f'mse={report.mse:.6g} mae={report.mae:.6g}')
        self.stdout.write(self.style.SUCCESS(f'wrote {result.output_dir}'))
