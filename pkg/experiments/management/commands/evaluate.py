from experiments.commands import ExperimentCommand
from experiments.runner import evaluate_checkpoint


class Command(ExperimentCommand):
    help = "Score a saved checkpoint on one split of an experiment's dataset."

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('checkpoint', help='Path to checkpoint.json.')
        parser.add_argument('--split', choices=['train', 'val', 'test'], default='test')

    def run(self, *args, **options):
        spec = self.resolve(options)
        report = evaluate_checkpoint(spec, options['checkpoint'], options['split'], options['output'])
        self.stdout.write(
            f'{report.model} {report.split}: mse={report.mse:.6g} mae={report.mae:.6g} '
            f'params={report.real_params}')
