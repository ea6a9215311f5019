from rest_framework import serializers

from networks.validators import validate_finite

from .scaling import ScalerState


class ScalerSerializer(serializers.Serializer):
    min = serializers.FloatField(validators=[validate_finite])
    max = serializers.FloatField(validators=[validate_finite])
    range_lo = serializers.FloatField(validators=[validate_finite])
    range_hi = serializers.FloatField(validators=[validate_finite])

    def validate(self, attrs):
        if not attrs['max'] > attrs['min']:
            raise serializers.ValidationError({'max': 'Must be greater than min.'})
        if not attrs['range_hi'] > attrs['range_lo']:
            raise serializers.ValidationError({'range_hi': 'Must be greater than range_lo.'})
        return attrs

    def create(self, validated_data):
        return ScalerState(**validated_data)
