from django.conf import settings
from rest_framework import serializers

from .environments import TASKS
from .harness import EVOLVED, READOUT_RULES, STRUCTURES
from .plasticity import DA_BCM, LEARNING_RULES


class OverridesField(serializers.DictField):
    """Engine settings keyed like settings.LSM; unknown keys are rejected."""

    def to_internal_value(self, data):
        values = super().to_internal_value(data)
        unknown = sorted(set(values) - set(settings.LSM))
        if unknown:
            raise serializers.ValidationError(f'unknown parameters: {", ".join(unknown)}')
        return values


class RunSerializer(serializers.Serializer):
    task = serializers.ChoiceField(choices=TASKS)
    structure = serializers.ChoiceField(choices=STRUCTURES, default=EVOLVED)
    liquid_rule = serializers.ChoiceField(choices=LEARNING_RULES, default=DA_BCM)
    readout_rule = serializers.ChoiceField(choices=READOUT_RULES, default=DA_BCM)
    horizon = serializers.IntegerField(min_value=1, required=False)
    seed = serializers.IntegerField(min_value=0, default=0)
    overrides = OverridesField(required=False, default=dict)


class BaselineSerializer(serializers.Serializer):
    task = serializers.ChoiceField(choices=TASKS)
    horizon = serializers.IntegerField(min_value=1, required=False)
    runs = serializers.IntegerField(min_value=1, default=1)
    seed = serializers.IntegerField(min_value=0, default=0)
    overrides = OverridesField(required=False, default=dict)
