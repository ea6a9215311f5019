"""Validated, immutable experiment descriptions.

Instances are produced by ``ExperimentSpecSerializer``; nothing here
re-validates, so build specs through ``experiments.config.resolve_spec``.
"""
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from networks.optim import TrainConfig

CSV_TREND = 'csv_trend'


@dataclass(frozen=True)
class GeneratorConfig:
    target: str
    sampling: str = 'grid'
    n: int = 300
    domain: tuple = ()
    split: str = 'random'
    fractions: tuple = (0.5, 0.25, 0.25)
    path: Optional[str] = None
    column: str = 'value'
    period: Optional[int] = None
    window: int = 0

    @property
    def from_csv(self):
        return self.target == CSV_TREND


@dataclass(frozen=True)
class MaskConfig:
    kind: str
    half_width: float = 0.15
    centers: tuple = ()
    center: tuple = (0.0, 0.0)
    radius: float = 0.3
    visible_fractions: tuple = (0.6, 0.4)


@dataclass(frozen=True)
class ModelConfig:
    h: int = 128
    epsilon: Optional[float] = None
    init: str = 'xavier'
    semi_major: float = 6.0
    semi_minor: float = 2.0


@dataclass(frozen=True)
class AblationConfig:
    lambdas: tuple = (0.1, 0.3, 0.5, 1.0, 1.5)
    snapshot_every: int = 1


@dataclass(frozen=True)
class SweepConfig:
    hidden: tuple = (32, 64, 128, 256, 612, 1224)
    sizes: tuple = (100, 300, 600, 1200)
    lrs: tuple = (0.001, 0.01, 0.1)
    wds: tuple = (0.0, 1e-5, 1e-4)


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    generator: GeneratorConfig
    model: ModelConfig
    train: TrainConfig
    mask: Optional[MaskConfig] = None
    scaler_range: tuple = (0.0, 1.0)
    output_dir: Optional[Path] = None
    compare_baseline: bool = False
    baseline_lr0: Optional[float] = None
    ablation: Optional[AblationConfig] = None
    sweep: Optional[SweepConfig] = None
    description: str = ''
    document: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def seed(self):
        return self.train.seed

    def with_train(self, **changes):
        return replace(self, train=replace(self.train, **changes))

    def with_model(self, **changes):
        return replace(self, model=replace(self.model, **changes))

    def with_generator(self, **changes):
        return replace(self, generator=replace(self.generator, **changes))
