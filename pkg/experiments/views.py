from rest_framework import generics, permissions
from rest_framework.response import Response
from rest_framework.views import APIView

from .models import ExperimentRun
from .presets import PRESETS, preset_document, preset_names
from .serializers import (ExperimentRunDetailSerializer, ExperimentRunListSerializer,
                          PresetSerializer)


class PresetListAPIView(APIView):
    permission_classes = [permissions.AllowAny]

    def get(self, request, format=None):
        presets = [
            {
                'name': name,
                'description': PRESETS[name].get('description', ''),
                'document': preset_document(name),
            }
            for name in preset_names()
        ]
        return Response(PresetSerializer(presets, many=True).data)


class ExperimentRunListAPIView(generics.ListAPIView):
    permission_classes = [permissions.AllowAny]
    serializer_class = ExperimentRunListSerializer
    queryset = ExperimentRun.objects.all()

    def get_queryset(self):
        queryset = super().get_queryset()
        name = self.request.GET.get('name')
        status = self.request.GET.get('status')
        if name:
            queryset = queryset.filter(name=name)
        if status:
            queryset = queryset.filter(status=status)
        return queryset


class ExperimentRunRetrieveAPIView(generics.RetrieveAPIView):
    permission_classes = [permissions.AllowAny]
    serializer_class = ExperimentRunDetailSerializer
    queryset = ExperimentRun.objects.prefetch_related('artifacts')
