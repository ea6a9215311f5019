from pathlib import Path

from django.conf import settings
from rest_framework import serializers

from datasets.targets import TARGETS
from networks.cauchynet import INITIALIZERS
from networks.optim import TrainConfig
from networks.validators import validate_finite

from .models import ExperimentRun, RunArtifact
from .specs import (CSV_TREND, AblationConfig, ExperimentSpec, GeneratorConfig,
                    MaskConfig, ModelConfig, SweepConfig)

CONFIG_VERSION = 1


def _pair(**kwargs):
    return serializers.ListField(
        child=serializers.FloatField(validators=[validate_finite]),
        min_length=2, max_length=2, **kwargs)


def _fractions_sum_to_one(fractions, name):
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise serializers.ValidationError({name: 'Fractions must sum to 1.'})


class GeneratorSerializer(serializers.Serializer):
    target = serializers.CharField()
    sampling = serializers.ChoiceField(choices=['grid', 'uniform'], default='grid')
    n = serializers.IntegerField(min_value=4, default=300)
    domain = serializers.ListField(child=_pair(), default=None, allow_null=True)
    split = serializers.ChoiceField(
        choices=['random', 'interleaved', 'chronological'], default='random')
    fractions = serializers.ListField(
        child=serializers.FloatField(min_value=0.0), min_length=3, max_length=3,
        default=lambda: [0.5, 0.25, 0.25])
    path = serializers.CharField(default=None, allow_null=True)
    column = serializers.CharField(default='value')
    period = serializers.IntegerField(min_value=2, default=None, allow_null=True)
    window = serializers.IntegerField(min_value=0, default=0)

    def validate_target(self, value):
        if value not in TARGETS and value != CSV_TREND:
            choices = ', '.join(sorted(TARGETS) + [CSV_TREND])
            raise serializers.ValidationError(f'Unknown generator {value!r}; choose from {choices}.')
        return value

    def validate(self, attrs):
        _fractions_sum_to_one(attrs['fractions'], 'fractions')
        if attrs['target'] == CSV_TREND:
            if not attrs.get('path'):
                raise serializers.ValidationError({'path': 'A CSV path is required for csv_trend.'})
            if attrs.get('period') is None:
                raise serializers.ValidationError({'period': 'A seasonal period is required for csv_trend.'})
            return attrs

        _, dim, default_domain = TARGETS[attrs['target']]
        domain = attrs.get('domain') or default_domain
        if len(domain) != dim:
            raise serializers.ValidationError(
                {'domain': f'Target {attrs["target"]!r} needs {dim} interval(s).'})
        if any(not hi > lo for lo, hi in domain):
            raise serializers.ValidationError({'domain': 'Every interval needs hi > lo.'})
        attrs['domain'] = [tuple(interval) for interval in domain]
        return attrs


class MaskSerializer(serializers.Serializer):
    kind = serializers.ChoiceField(choices=['turning_points', 'intervals', 'disk'])
    half_width = serializers.FloatField(min_value=0.0, default=0.15)
    centers = serializers.ListField(
        child=serializers.FloatField(validators=[validate_finite]), default=list)
    center = _pair(default=lambda: [0.0, 0.0])
    radius = serializers.FloatField(min_value=0.0, default=0.3)
    visible_fractions = serializers.ListField(
        child=serializers.FloatField(min_value=0.0), min_length=2, max_length=2,
        default=lambda: [0.6, 0.4])

    def validate(self, attrs):
        _fractions_sum_to_one(attrs['visible_fractions'], 'visible_fractions')
        if attrs['kind'] == 'disk':
            if not attrs['radius'] > 0:
                raise serializers.ValidationError({'radius': 'Must be positive.'})
        elif not attrs['half_width'] > 0:
            raise serializers.ValidationError({'half_width': 'Must be positive.'})
        if attrs['kind'] == 'intervals' and not attrs['centers']:
            raise serializers.ValidationError({'centers': 'At least one interval center is required.'})
        return attrs


class ModelConfigSerializer(serializers.Serializer):
    h = serializers.IntegerField(min_value=1, default=128)
    epsilon = serializers.FloatField(
        min_value=0.0, default=None, allow_null=True, validators=[validate_finite])
    init = serializers.ChoiceField(choices=sorted(INITIALIZERS), default='xavier')
    semi_major = serializers.FloatField(default=6.0, validators=[validate_finite])
    semi_minor = serializers.FloatField(default=2.0, validators=[validate_finite])

    def validate(self, attrs):
        if not (attrs['semi_major'] > 0 and attrs['semi_minor'] > 0):
            raise serializers.ValidationError({'semi_major': 'Ellipse semi-axes must be positive.'})
        return attrs


class TrainConfigSerializer(serializers.Serializer):
    epochs = serializers.IntegerField(min_value=1, default=200)
    batch_size = serializers.IntegerField(min_value=1, default=32)
    lr0 = serializers.FloatField(default=0.01, validators=[validate_finite])
    lr_decay_factor = serializers.FloatField(default=0.5)
    lr_decay_every = serializers.IntegerField(min_value=1, default=100)
    weight_decay = serializers.FloatField(min_value=0.0, default=1e-4, validators=[validate_finite])
    lam = serializers.FloatField(min_value=0.0, default=0.1, validators=[validate_finite])
    seed = serializers.IntegerField(min_value=0, default=10)

    def validate_lr0(self, value):
        if not value > 0:
            raise serializers.ValidationError('Must be positive.')
        return value

    def validate_lr_decay_factor(self, value):
        if not 0 < value <= 1:
            raise serializers.ValidationError('Must lie in (0, 1].')
        return value


class AblationSerializer(serializers.Serializer):
    lambdas = serializers.ListField(
        child=serializers.FloatField(min_value=0.0, validators=[validate_finite]),
        allow_empty=False)
    snapshot_every = serializers.IntegerField(min_value=1, default=1)


class SweepSerializer(serializers.Serializer):
    hidden = serializers.ListField(child=serializers.IntegerField(min_value=1), allow_empty=False)
    sizes = serializers.ListField(child=serializers.IntegerField(min_value=4), allow_empty=False)
    lrs = serializers.ListField(child=serializers.FloatField(min_value=0.0), allow_empty=False)
    wds = serializers.ListField(child=serializers.FloatField(min_value=0.0), allow_empty=False)

    def validate_lrs(self, value):
        if any(not lr > 0 for lr in value):
            raise serializers.ValidationError('Learning rates must be positive.')
        return value


class ExperimentSpecSerializer(serializers.Serializer):
    """Validates a version-1 experiment document and builds an ``ExperimentSpec``."""

    version = serializers.IntegerField()
    name = serializers.SlugField(max_length=100)
    description = serializers.CharField(default='', allow_blank=True)
    generator = GeneratorSerializer()
    mask = MaskSerializer(default=None, allow_null=True)
    model = ModelConfigSerializer()
    train = TrainConfigSerializer()
    scaler_range = _pair(default=lambda: list(settings.CAUCHYNET['SCALER_RANGE']))
    output_dir = serializers.CharField(default=None, allow_null=True)
    compare_baseline = serializers.BooleanField(default=False)
    baseline_lr0 = serializers.FloatField(default=None, allow_null=True, validators=[validate_finite])
    ablation = AblationSerializer(default=None, allow_null=True)
    sweep = SweepSerializer(default=None, allow_null=True)

    def to_internal_value(self, data):
        if isinstance(data, dict):
            data = {'model': {}, 'train': {}, **data}
            data['model'] = data['model'] or {}
            data['train'] = data['train'] or {}
        return super().to_internal_value(data)

    def validate_version(self, value):
        if value != CONFIG_VERSION:
            raise serializers.ValidationError(
                f'Unsupported config version {value}; expected {CONFIG_VERSION}.')
        return value

    def validate_scaler_range(self, value):
        if not value[1] > value[0]:
            raise serializers.ValidationError('Upper bound must exceed the lower bound.')
        return value

    def validate_baseline_lr0(self, value):
        if value is not None and not value > 0:
            raise serializers.ValidationError('Must be positive.')
        return value

    def validate(self, attrs):
        generator, mask = attrs['generator'], attrs.get('mask')
        if mask is not None:
            if generator['target'] == CSV_TREND:
                raise serializers.ValidationError({'mask': 'Masks apply to synthetic generators only.'})
            dim = TARGETS[generator['target']][1]
            wanted = 2 if mask['kind'] == 'disk' else 1
            if dim != wanted:
                raise serializers.ValidationError(
                    {'mask': f'A {mask["kind"]} mask needs a {wanted}-dimensional target.'})
        return attrs

    def create(self, validated_data):
        generator = dict(validated_data['generator'])
        generator['domain'] = tuple(generator.get('domain') or ())
        generator['fractions'] = tuple(generator['fractions'])
        mask = validated_data.get('mask')
        if mask is not None:
            mask = MaskConfig(**dict(
                mask,
                centers=tuple(mask['centers']),
                center=tuple(mask['center']),
                visible_fractions=tuple(mask['visible_fractions']),
            ))
        ablation = validated_data.get('ablation')
        sweep = validated_data.get('sweep')
        output_dir = validated_data.get('output_dir')
        return ExperimentSpec(
            name=validated_data['name'],
            description=validated_data['description'],
            generator=GeneratorConfig(**generator),
            model=ModelConfig(**validated_data['model']),
            train=TrainConfig(**validated_data['train']),
            mask=mask,
            scaler_range=tuple(validated_data['scaler_range']),
            output_dir=Path(output_dir) if output_dir else None,
            compare_baseline=validated_data['compare_baseline'],
            baseline_lr0=validated_data.get('baseline_lr0'),
            ablation=AblationConfig(
                lambdas=tuple(ablation['lambdas']),
                snapshot_every=ablation['snapshot_every'],
            ) if ablation else None,
            sweep=SweepConfig(**{key: tuple(values) for key, values in sweep.items()}) if sweep else None,
            document=dict(self.initial_data),
        )


# RUN RECORDS


class RunArtifactSerializer(serializers.ModelSerializer):
    class Meta:
        model = RunArtifact
        fields = [
            'filename',
            'sha256',
            'size',
        ]


class ExperimentRunListSerializer(serializers.ModelSerializer):
    artifacts_count = serializers.IntegerField(
        source='artifacts.count',
        read_only=True,
    )

    class Meta:
        model = ExperimentRun
        fields = [
            'id',
            'name',
            'command',
            'status',
            'seed',
            'created_at',
            'updated_at',
            'artifacts_count',
        ]


class ExperimentRunDetailSerializer(serializers.ModelSerializer):
    artifacts = RunArtifactSerializer(many=True, read_only=True)

    class Meta:
        model = ExperimentRun
        fields = [
            'id',
            'name',
            'command',
            'status',
            'seed',
            'spec',
            'metrics',
            'output_dir',
            'error',
            'created_at',
            'updated_at',
            'artifacts',
        ]


class PresetSerializer(serializers.Serializer):
    name = serializers.CharField()
    description = serializers.CharField()
    document = serializers.DictField()
