from experiments.commands import ExperimentCommand, float_list
from experiments.records import finish_run, start_run
from experiments.reports import RunWriter
from experiments.runner import default_output_dir
from experiments.specs import AblationConfig
from experiments.sweeps import run_lambda_ablation


class Command(ExperimentCommand):
    help = 'Retrain one experiment for each imaginary-penalty weight and log test MSE per epoch.'

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument(
            '--lambdas', type=float_list, default=None,
            help='Comma-separated lambda values; defaults to the config or 0.1,0.3,0.5,1,1.5.')
        parser.add_argument('--snapshot-every', type=int, default=None)

    def run(self, *args, **options):
        spec = self.resolve(options)
        ablation = spec.ablation or AblationConfig()
        lambdas = options['lambdas'] if options['lambdas'] is not None else ablation.lambdas
        snapshot_every = options['snapshot_every'] or ablation.snapshot_every

        writer = RunWriter(options['output'] or default_output_dir(spec))
        details = {'name': spec.name, 'command': 'ablate_lambda', 'seed': spec.seed,
                   'spec': spec.document, 'lambdas': list(lambdas)}
        run = start_run(spec.name, 'ablate_lambda', spec.seed, spec.document, writer.output_dir)
        try:
            frame = run_lambda_ablation(spec, lambdas, snapshot_every, options['threads'])
        except Exception as exc:
            manifest = writer.write_manifest('failed', error=str(exc), **details)
            finish_run(run, 'failed', artifacts=manifest['files'], error=str(exc))
            raise
        writer.write_frame('lambda_ablation.csv', frame)
        final = frame.groupby('lambda', sort=False).tail(1)
        manifest = writer.write_manifest('complete', error=None, **details)
        finish_run(run, 'complete', metrics=final.to_dict('records'), artifacts=manifest['files'])

        self.write_table(final)
        self.stdout.write(self.style.SUCCESS(f'wrote {writer.path("lambda_ablation.csv")}'))
