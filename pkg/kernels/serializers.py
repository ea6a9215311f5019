import json

import numpy as np
from rest_framework import serializers

from networks.exceptions import SchemaError
from networks.serializers import complex_from_parts, real_matrix_field, real_vector_field
from networks.validators import validate_vector_length

from .quadrature import KernelExpansion


class KernelExpansionSerializer(serializers.Serializer):
    xi_re = real_matrix_field()
    xi_im = real_matrix_field()
    theta_re = real_vector_field()
    theta_im = real_vector_field()

    def validate(self, attrs):
        count = len(attrs['theta_re'])
        validate_vector_length(attrs['theta_im'], count, 'theta_im')
        validate_vector_length(attrs['xi_re'], count, 'xi_re')
        validate_vector_length(attrs['xi_im'], count, 'xi_im')
        dims = {len(row) for row in attrs['xi_re'] + attrs['xi_im']}
        if len(dims) > 1 or 0 in dims:
            raise serializers.ValidationError({'xi_re': 'Every point needs the same non-zero dimension.'})
        return attrs

    def create(self, validated_data):
        points = complex_from_parts(validated_data['xi_re'], validated_data['xi_im'])
        if points.size == 0:
            points = np.zeros((0, 1), dtype=complex)
        return KernelExpansion(points, complex_from_parts(validated_data['theta_re'], validated_data['theta_im']))

    @staticmethod
    def document(expansion):
        return {
            'xi_re': expansion.points.real.tolist(),
            'xi_im': expansion.points.imag.tolist(),
            'theta_re': expansion.weights.real.tolist(),
            'theta_im': expansion.weights.imag.tolist(),
        }


def save_expansion(expansion, path):
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(KernelExpansionSerializer.document(expansion), handle, indent=1)
        handle.write('\n')


def load_expansion(path):
    with open(path, encoding='utf-8') as handle:
        serializer = KernelExpansionSerializer(data=json.load(handle))
    if not serializer.is_valid():
        raise SchemaError('invalid kernel expansion', serializer.errors)
    return serializer.save()
