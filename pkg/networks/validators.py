import math

from rest_framework import serializers


def validate_finite(value):
    if not math.isfinite(value):
        raise serializers.ValidationError('Value must be finite.')
    return value


def validate_matrix_shape(matrix, rows, cols, name):
    if len(matrix) != rows or any(len(row) != cols for row in matrix):
        raise serializers.ValidationError({
            name: f'Expected a {rows}x{cols} nested array.'
        })


def validate_vector_length(vector, length, name):
    if len(vector) != length:
        raise serializers.ValidationError({
            name: f'Expected {length} entries, got {len(vector)}.'
        })
