from pathlib import Path

from django.conf import settings

from experiments.commands import ExperimentCommand, int_list
from experiments.reports import RunWriter
from kernels.demos import HOLOMORPHIC_DEMOS, convergence_table
from kernels.quadrature import ellipse_mesh, quadrature_expansion
from kernels.serializers import save_expansion


class Command(ExperimentCommand):
    help = 'Cauchy-integral quadrature convergence on an ellipse for a holomorphic demo target.'
    requires_spec = False

    def add_arguments(self, parser):
        super().add_arguments(parser)
        parser.add_argument('--target', choices=sorted(HOLOMORPHIC_DEMOS), default='square')
        parser.add_argument('--a', type=float, default=2.0, help='Semi-axis along the real line.')
        parser.add_argument('--b', type=float, default=1.0, help='Semi-axis along the imaginary line.')
        parser.add_argument('--center', type=complex, default=0j)
        parser.add_argument('--nodes', type=int_list, default=[16, 32, 64, 128])
        parser.add_argument('--grid', type=int, default=201)
        parser.add_argument('--save-expansion', action='store_true',
                            help='Also write the expansion for the largest node count.')

    def run(self, *args, **options):
        table = convergence_table(
            options['target'], options['a'], options['b'], options['center'],
            options['nodes'], grid=options['grid'],
        )
        default_dir = Path(settings.CAUCHYNET['OUTPUT_ROOT']) / f'kernel-demo-{options["target"]}'
        writer = RunWriter(options['output'] or default_dir)
        writer.write_frame('convergence.csv', table)
        if options['save_expansion']:
            expansion = quadrature_expansion(
                HOLOMORPHIC_DEMOS[options['target']],
                ellipse_mesh(options['a'], options['b'], options['center'], max(options['nodes'])),
            )
            with writer.atomic('expansion.json') as tmp:
                save_expansion(expansion, tmp)
        writer.write_manifest('complete', command='kernel_demo', target=options['target'])
        self.write_table(table)
        self.stdout.write(self.style.SUCCESS(f'wrote {writer.path("convergence.csv")}'))
