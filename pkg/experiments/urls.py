from django.urls import path

from . import views

urlpatterns = [
    path('presets/', views.PresetListAPIView.as_view()),
    path('runs/', views.ExperimentRunListAPIView.as_view()),
    path('runs/<int:pk>/', views.ExperimentRunRetrieveAPIView.as_view()),
]
