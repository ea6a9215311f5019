"""Versioned JSON checkpoints for CauchyNet and the ReLU baseline.

Complex arrays are stored as separate real and imaginary nested lists. Floats
are written with ``repr`` precision, which round-trips every float64 exactly.
"""
import json

import numpy as np
from rest_framework import serializers

from datasets.serializers import ScalerSerializer

from .baseline import MlpModel
from .cauchynet import CauchyNetModel
from .exceptions import SchemaError
from .linalg import COMPLEX
from .validators import validate_finite, validate_matrix_shape, validate_vector_length

CHECKPOINT_VERSION = 1


def real_vector_field():
    return serializers.ListField(child=serializers.FloatField(validators=[validate_finite]))


def real_matrix_field():
    return serializers.ListField(child=real_vector_field())


def complex_from_parts(re, im):
    re, im = np.asarray(re, dtype=float), np.asarray(im, dtype=float)
    values = np.empty(re.shape, dtype=COMPLEX)
    values.real = re
    values.imag = im
    return values


class CheckpointSerializer(serializers.Serializer):
    version = serializers.IntegerField()
    h = serializers.IntegerField(min_value=1)
    m = serializers.IntegerField(min_value=1)
    scaler = ScalerSerializer(required=False, allow_null=True)
    seed = serializers.IntegerField(required=False, allow_null=True)

    def validate_version(self, value):
        if value != CHECKPOINT_VERSION:
            raise serializers.ValidationError(
                f'Unsupported checkpoint version {value}; expected {CHECKPOINT_VERSION}.')
        return value

    def scaler_state(self):
        scaler = self.validated_data.get('scaler')
        return ScalerSerializer().create(scaler) if scaler else None


class CauchyNetCheckpointSerializer(CheckpointSerializer):
    model_type = serializers.ChoiceField(choices=['cauchynet'], default='cauchynet')
    epsilon = serializers.FloatField(min_value=0.0, validators=[validate_finite])
    B_re = real_matrix_field()
    B_im = real_matrix_field()
    C_re = real_vector_field()
    C_im = real_vector_field()

    def validate(self, attrs):
        h, m = attrs['h'], attrs['m']
        validate_matrix_shape(attrs['B_re'], h, m, 'B_re')
        validate_matrix_shape(attrs['B_im'], h, m, 'B_im')
        validate_vector_length(attrs['C_re'], h, 'C_re')
        validate_vector_length(attrs['C_im'], h, 'C_im')
        return attrs

    def create(self, validated_data):
        return CauchyNetModel(
            B=complex_from_parts(validated_data['B_re'], validated_data['B_im']),
            C=complex_from_parts(validated_data['C_re'], validated_data['C_im']),
            epsilon=validated_data['epsilon'],
        )

    @staticmethod
    def document(model, scaler=None, seed=None):
        return {
            'version': CHECKPOINT_VERSION,
            'model_type': 'cauchynet',
            'h': model.h,
            'm': model.m,
            'epsilon': model.epsilon,
            'B_re': model.B.real.tolist(),
            'B_im': model.B.imag.tolist(),
            'C_re': model.C.real.tolist(),
            'C_im': model.C.imag.tolist(),
            'scaler': scaler.as_dict() if scaler else None,
            'seed': seed,
        }


class MlpCheckpointSerializer(CheckpointSerializer):
    model_type = serializers.ChoiceField(choices=['relu_mlp'])
    W1 = real_matrix_field()
    b1 = real_vector_field()
    W2 = real_vector_field()
    b2 = serializers.FloatField(validators=[validate_finite])

    def validate(self, attrs):
        h, m = attrs['h'], attrs['m']
        validate_matrix_shape(attrs['W1'], h, m, 'W1')
        validate_vector_length(attrs['b1'], h, 'b1')
        validate_vector_length(attrs['W2'], h, 'W2')
        return attrs

    def create(self, validated_data):
        return MlpModel(
            W1=validated_data['W1'],
            b1=validated_data['b1'],
            W2=validated_data['W2'],
            b2=validated_data['b2'],
        )

    @staticmethod
    def document(model, scaler=None, seed=None):
        return {
            'version': CHECKPOINT_VERSION,
            'model_type': 'relu_mlp',
            'h': model.h,
            'm': model.m,
            'W1': model.W1.tolist(),
            'b1': model.b1.tolist(),
            'W2': model.W2.tolist(),
            'b2': float(model.b2),
            'scaler': scaler.as_dict() if scaler else None,
            'seed': seed,
        }


CHECKPOINT_SERIALIZERS = {
    'cauchynet': CauchyNetCheckpointSerializer,
    'relu_mlp': MlpCheckpointSerializer,
}


def checkpoint_document(model, scaler=None, seed=None):
    return CHECKPOINT_SERIALIZERS[model.model_type].document(model, scaler, seed)


def save_checkpoint(model, scaler, path, seed=None):
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(checkpoint_document(model, scaler, seed), handle, indent=1)
        handle.write('\n')


def parse_checkpoint(document):
    """Validate a checkpoint document; returns ``(model, scaler)``."""
    if not isinstance(document, dict):
        raise SchemaError('checkpoint must be a JSON object')
    model_type = document.get('model_type', 'cauchynet')
    serializer_class = CHECKPOINT_SERIALIZERS.get(model_type)
    if serializer_class is None:
        raise SchemaError(f'unknown model_type {model_type!r}', {'model_type': model_type})
    serializer = serializer_class(data=document)
    if not serializer.is_valid():
        raise SchemaError('invalid checkpoint', serializer.errors)
    return serializer.save(), serializer.scaler_state()


def load_checkpoint(path):
    with open(path, encoding='utf-8') as handle:
        try:
            document = json.load(handle)
        except json.JSONDecodeError as exc:
            raise SchemaError(f'checkpoint is not valid JSON: {exc}') from exc
    return parse_checkpoint(document)
