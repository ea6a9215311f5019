from pathlib import Path

from django.conf import settings

from datasets.decomposition import seasonal_decompose_multiplicative
from datasets.forecasting import build_trend_dataset
from datasets.io import load_series_csv, write_dataset_csv, write_decomposition_csv
from experiments.commands import ExperimentCommand
from experiments.reports import RunWriter


class Command(ExperimentCommand):
    help = 'Multiplicative seasonal decomposition of one CSV column (trend x seasonal x residual).'
    requires_spec = False

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('input', help='CSV file with a header row.')
        parser.add_argument('--column', default='value')
        parser.add_argument('--period', type=int, required=True)
        parser.add_argument(
            '--window', type=int, default=None,
            help='Also write the scaled trend-forecasting dataset with this lag window (0 = time index).')

    def run(self, *args, **options):
        series = load_series_csv(options['input'], options['column'])
        decomposition = seasonal_decompose_multiplicative(series, options['period'])
        default_dir = Path(settings.CAUCHYNET['OUTPUT_ROOT']) / f'decompose-{Path(options["input"]).stem}'
        writer = RunWriter(options['output'] or default_dir)
        with writer.atomic('decomposition.csv') as tmp:
            write_decomposition_csv(decomposition, tmp)

        if options['window'] is not None:
            dataset, scaler, _ = build_trend_dataset(series, options['period'], options['window'])
            with writer.atomic('trend_dataset.csv') as tmp:
                write_dataset_csv(dataset, tmp)
            writer.write_json('trend_scaler.json', scaler.as_dict())

        writer.write_manifest(
            'complete', command='decompose', input=str(options['input']),
            column=options['column'], period=options['period'])
        defined = int(decomposition.defined.sum())
        self.stdout.write(
            f'{len(series)} observations, trend defined at {defined}, period {options["period"]}')
        self.stdout.write(self.style.SUCCESS(f'wrote {writer.path("decomposition.csv")}'))
