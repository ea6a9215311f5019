from django.db import models


class ExperimentRun(models.Model):
    RUNNING = 'running'
    COMPLETE = 'complete'
    PARTIAL = 'partial'
    FAILED = 'failed'
    STATUS_CHOICES = [
        (RUNNING, 'Running'),
        (COMPLETE, 'Complete'),
        (PARTIAL, 'Partial'),
        (FAILED, 'Failed'),
    ]

    created_at = models.DateTimeField(
        auto_now_add=True, editable=False, null=False, blank=False)
    updated_at = models.DateTimeField(
        auto_now=True, editable=False, null=False, blank=False)
    name = models.CharField(max_length=100)
    # management command that produced the run: train, impute, sweep, ...
    command = models.CharField(max_length=30)
    status = models.CharField(max_length=10, choices=STATUS_CHOICES, default=RUNNING)
    seed = models.IntegerField(null=True, blank=True)
    spec = models.JSONField(default=dict, blank=True)
    metrics = models.JSONField(default=list, blank=True)
    output_dir = models.CharField(max_length=500, default='', blank=True)
    error = models.TextField(default='', blank=True)

    class Meta:
        ordering = ['-created_at', '-id']

    def __str__(self):
        return f'{self.name} [{self.command}] {self.status}'


class RunArtifact(models.Model):
    run = models.ForeignKey(ExperimentRun, on_delete=models.CASCADE, related_name='artifacts')
    filename = models.CharField(max_length=200)
    sha256 = models.CharField(max_length=64)
    size = models.PositiveBigIntegerField(default=0)

    class Meta:
        unique_together = ('run', 'filename',)
        ordering = ['filename']
